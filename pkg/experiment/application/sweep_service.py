from concurrent.futures import Future, ProcessPoolExecutor, as_completed

from common.errors import SweepFailedError
from common.logger import logger
from config import Settings, get_settings
from experiment.domain.cell_result import CellResult
from experiment.domain.experiment_config import Cell, ExperimentConfig
from experiment.domain.repository.summary_repo import IChartRepository, ISummaryRepository
from simulator.application.metrics import aggregate
from simulator.application.simulator_service import SimulatorService
from simulator.domain.report import RunReport
from workload.application.trace_service import TraceService
from workload.domain.job import Trace


def run_trial(trace: Trace, cell: Cell, seed: int, gen_config: dict) -> RunReport:
    """One simulation; module level so worker processes can pickle it."""
    return SimulatorService().run(trace, cell.policy, cell.spec, seed=seed, gen_config=gen_config)


class SweepService:
    def __init__(
        self,
        trace_service: TraceService,
        summary_repo: ISummaryRepository,
        chart_repo: IChartRepository,
        settings: Settings | None = None,
    ):
        self.trace_service = trace_service
        self.summary_repo = summary_repo
        self.chart_repo = chart_repo
        self.settings = settings or get_settings()

    def run_cells(self, config: ExperimentConfig) -> list[CellResult]:
        """
        Every cell on every trial's trace. Trial t replays the trace generated
        with seed base_seed + t in all cells. A failing trial fails its cell
        only.
        """
        traces = [self.trace_service.generate_trace(config.trial_gen(t)) for t in range(config.trials)]
        tasks = [(c, t) for c in range(len(config.cells)) for t in range(config.trials)]
        reports: dict[tuple[int, int], RunReport] = {}
        errors: dict[int, str] = {}

        def record(key, fn):
            try:
                reports[key] = fn()
            except Exception as e:
                cell = config.cells[key[0]]
                logger.error(f"{cell.label} trial {key[1]} failed: {e!r}")
                errors.setdefault(key[0], f"trial {key[1]}: {e!r}")

        workers = config.workers or self.settings.workers
        args = {
            (c, t): (traces[t], config.cells[c], config.trial_seed(t), config.trial_gen(t).model_dump(mode="json"))
            for c, t in tasks
        }
        if workers == 1:
            for key in tasks:
                record(key, lambda key=key: run_trial(*args[key]))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures: dict[Future, tuple[int, int]] = {
                    pool.submit(run_trial, *args[key]): key for key in tasks
                }
                for done, future in enumerate(as_completed(futures), start=1):
                    record(futures[future], future.result)
                    if done % max(1, len(tasks) // 10) == 0:
                        logger.info(f"{done}/{len(tasks)} runs finished")

        results = []
        for c, cell in enumerate(config.cells):
            if c in errors:
                results.append(CellResult(cell.label, str(cell.policy), cell.cube, error=errors[c]))
                continue
            summary = aggregate([reports[(c, t)] for t in range(config.trials)])
            logger.info(f"{cell.label}: mean jcr {summary.mean_jcr:.4f}")
            results.append(CellResult(cell.label, str(cell.policy), cell.cube, summary=summary))
        return results

    def sweep(self, config: ExperimentConfig) -> list[CellResult]:
        """Run, then write tables and charts under out_dir. Raises SweepFailedError
        after writing when any cell failed."""
        results = self.run_cells(config)
        self.summary_repo.save_tables(results, config.out_dir)
        self.chart_repo.save_charts(results, config.out_dir)

        failed = [result.label for result in results if result.failed]
        if failed:
            raise SweepFailedError(f"{len(failed)} cell(s) failed: {', '.join(failed)}")
        return results
