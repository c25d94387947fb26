import argparse
from pathlib import Path

from dependency_injector.wiring import Provide, inject
from pydantic import ValidationError

from common.errors import ConfigurationError, TorusFoldError
from common.logger import logger
from containers import Container
from experiment.application.sweep_service import SweepService
from experiment.domain.experiment_config import Cell, ExperimentConfig
from placement.domain.plan import PolicyKind
from shapes.application.embedding_oracle import brute_force_embeddable
from shapes.domain.mapping import MappingMode
from simulator.application.metrics import jct_percentile, mean_utilization
from simulator.application.simulator_service import SimulatorService
from simulator.domain.repository.report_repo import IReportRepository
from workload.application.trace_service import TraceService
from workload.domain.gen_config import GenConfig
from workload.domain.job import Shape

NOT_EMBEDDABLE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(f"{self.prog}: {message}")


def _wrap_flags(text: str) -> tuple[bool, bool, bool]:
    if len(text) != 3 or set(text) - {"0", "1"}:
        raise ValueError(f"wrap flags are three 0/1 digits, got {text!r}")
    return tuple(flag == "1" for flag in text)


def _gen_config(config: ExperimentConfig, seed: int | None, jobs: int | None) -> GenConfig:
    values = config.gen.model_dump()
    if seed is not None:
        values["seed"] = seed
    if jobs is not None:
        values["job_count"] = jobs
    return GenConfig.model_validate(values)


def _cell(args) -> Cell:
    if args.static is not None:
        return Cell(policy=args.policy, static_extents=args.static.extents)
    return Cell(policy=args.policy, cube_size=args.cube_size, cube_count=args.cubes)


@inject
def cmd_gen_trace(args, trace_service: TraceService = Provide[Container.trace_service]) -> int:
    config = ExperimentConfig.load(args.config)
    gen = _gen_config(config, args.seed, args.jobs)
    trace = trace_service.generate_trace(gen)
    trace_service.save_trace(trace, args.out)
    logger.info(f"wrote {len(trace)} jobs to {args.out}")
    return 0


@inject
def cmd_run(
    args,
    trace_service: TraceService = Provide[Container.trace_service],
    simulator: SimulatorService = Provide[Container.simulator_service],
    report_repo: IReportRepository = Provide[Container.report_repo],
) -> int:
    config = ExperimentConfig.load(args.config)
    cell = _cell(args)
    if args.trace is not None:
        trace, gen, seed = trace_service.load_trace(args.trace), None, args.seed
    else:
        gen = _gen_config(config, args.seed, args.jobs)
        trace, seed = trace_service.generate_trace(gen), gen.seed

    report = simulator.run(
        trace,
        cell.policy,
        cell.spec,
        seed=seed,
        gen_config=gen.model_dump(mode="json") if gen else None,
    )
    out_dir = Path(args.out or config.out_dir)
    report_repo.save(report, out_dir / f"{cell.label}.json")
    report_repo.save_jobs(report, out_dir / f"{cell.label}.csv")

    line = f"{cell.label}: jobs {len(report.records)} jcr {report.jcr:.4f}"
    if report.jcts:
        p50, p90, p99 = (jct_percentile(report.jcts, q) for q in (50, 90, 99))
        line += f" jct p50 {p50:.1f} p90 {p90:.1f} p99 {p99:.1f}"
    if report.samples:
        line += f" utilization {mean_utilization(report):.4f}"
    if report.empty_trace:
        line += " (empty trace)"
    print(line)
    return 0


@inject
def cmd_sweep(args, sweep_service: SweepService = Provide[Container.sweep_service]) -> int:
    config = ExperimentConfig.load(
        args.config,
        base_seed=args.seed,
        trials=args.trials,
        workers=args.workers,
        out_dir=args.out,
    )
    logger.info(f"sweeping {len(config.cells)} cells x {config.trials} trials into {config.out_dir}")
    for result in sweep_service.sweep(config):
        summary = result.summary
        print(
            f"{result.label}: jcr {summary.mean_jcr:.4f} "
            f"jct p50 {summary.jct[50]:.1f} p90 {summary.jct[90]:.1f} p99 {summary.jct[99]:.1f} "
            f"utilization {summary.mean_utilization:.4f}"
        )
    return 0


def cmd_oracle(args) -> int:
    embeddable = brute_force_embeddable(args.shape, args.target.extents, args.wrap, args.mode)
    print("embeddable" if embeddable else "not embeddable")
    return 0 if embeddable else NOT_EMBEDDABLE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="torusfold", description="Job placement on reconfigurable 3D-torus clusters.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = commands.add_parser("gen-trace", help="generate a synthetic job trace")
    gen.add_argument("--config", type=Path)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--jobs", type=int)
    gen.add_argument("--out", type=Path, required=True)
    gen.set_defaults(handler=cmd_gen_trace)

    run = commands.add_parser("run", help="simulate one trace under one policy")
    run.add_argument("--config", type=Path)
    run.add_argument("--trace", type=Path)
    run.add_argument("--seed", type=int)
    run.add_argument("--jobs", type=int)
    run.add_argument("--policy", type=PolicyKind, choices=list(PolicyKind), required=True)
    fabric = run.add_mutually_exclusive_group(required=True)
    fabric.add_argument("--static", type=Shape.parse, metavar="LxLxL")
    fabric.add_argument("--cube-size", type=int)
    run.add_argument("--cubes", type=int, default=64)
    run.add_argument("--out", type=Path)
    run.set_defaults(handler=cmd_run)

    sweep = commands.add_parser("sweep", help="run every configured cell over many traces")
    sweep.add_argument("--config", type=Path)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--trials", type=int)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--out", type=Path)
    sweep.set_defaults(handler=cmd_sweep)

    oracle = commands.add_parser("oracle", help=argparse.SUPPRESS)
    oracle.add_argument("--shape", type=Shape.parse, required=True)
    oracle.add_argument("--target", type=Shape.parse, required=True)
    oracle.add_argument("--wrap", type=_wrap_flags, default=(False, False, False), metavar="XYZ")
    oracle.add_argument("--mode", type=MappingMode, choices=list(MappingMode), default=MappingMode.RING_COMPLETE)
    oracle.set_defaults(handler=cmd_oracle)
    return parser


def _describe(error: ValidationError) -> str:
    detail = error.errors()[0]
    location = ".".join(str(part) for part in detail["loc"]) or "config"
    return f"{location}: {detail['msg']}"


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except ValidationError as e:
        logger.error(f"invalid configuration: {_describe(e)}")
        return 1
    except TorusFoldError as e:
        logger.error(e.message or repr(e))
        return e.exit_code
    except OSError as e:
        logger.error(str(e))
        return 1
