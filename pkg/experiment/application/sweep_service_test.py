import pytest

from common.errors import SweepFailedError
from config import Settings
from experiment.application.sweep_service import SweepService, run_trial
from experiment.domain.experiment_config import ExperimentConfig
from experiment.domain.repository.summary_repo import IChartRepository, ISummaryRepository
from experiment.infra.repository.summary_repo import CsvSummaryRepository
from experiment.infra.repository.svg_chart import SvgChartRepository
from placement.domain.plan import PolicyKind
from workload.application.trace_service import TraceService
from workload.infra.repository.trace_repo import JsonlTraceRepository

CELLS = [
    {"policy": "FirstFit", "static_extents": (8, 8, 4)},
    {"policy": "Folding", "static_extents": (8, 8, 4)},
    {"policy": "RFold", "cube_size": 4, "cube_count": 4},
]


def _config(tmp_path, **overrides):
    values = {
        "cells": CELLS,
        "trials": 2,
        "workers": 1,
        "out_dir": tmp_path,
        "gen": {"job_count": 15, "footprint_limit": (4, 4), "extent_cap": 16},
    }
    values.update(overrides)
    return ExperimentConfig(**values)


@pytest.fixture
def service():
    return SweepService(
        TraceService(JsonlTraceRepository()),
        CsvSummaryRepository(),
        SvgChartRepository(),
        Settings(workers=1),
    )


def test_every_cell_is_summarized(service, tmp_path):
    results = service.run_cells(_config(tmp_path))

    assert [result.label for result in results] == ["FirstFit-8x8x4", "Folding-8x8x4", "RFold-4^3"]
    assert all(result.summary.runs == 2 for result in results)
    assert all(0.0 <= result.summary.mean_jcr <= 1.0 for result in results)


def test_cells_share_each_trials_trace(mocker, tmp_path):
    trace_service = mocker.Mock(spec=TraceService)
    trace_service.generate_trace.side_effect = lambda gen: TraceService(mocker.Mock()).generate_trace(gen)
    service = SweepService(trace_service, mocker.Mock(spec=ISummaryRepository), mocker.Mock(spec=IChartRepository))

    service.run_cells(_config(tmp_path, base_seed=30, trials=3))

    seeds = [call.args[0].seed for call in trace_service.generate_trace.call_args_list]
    assert seeds == [30, 31, 32]


def test_one_trial_summary_matches_the_run(service, tmp_path):
    config = _config(tmp_path, trials=1, cells=CELLS[2:])
    trace = TraceService(JsonlTraceRepository()).generate_trace(config.trial_gen(0))

    (result,) = service.run_cells(config)
    report = run_trial(trace, config.cells[0], config.trial_seed(0), {})

    assert result.summary.mean_jcr == report.jcr


def test_sweep_writes_tables_and_charts(service, tmp_path):
    service.sweep(_config(tmp_path))

    jcr = (tmp_path / "jcr.csv").read_text().splitlines()
    assert jcr[0] == "cell,policy,cube,metric,value"
    assert len(jcr) == 1 + len(CELLS)
    assert len((tmp_path / "jct.csv").read_text().splitlines()) == 1 + 3 * len(CELLS)
    assert len((tmp_path / "utilization.csv").read_text().splitlines()) == 1 + 22 * len(CELLS)
    assert (tmp_path / "jct.svg").read_text().startswith("<svg")
    assert (tmp_path / "utilization_cdf.svg").exists()


def test_reruns_are_byte_identical(service, tmp_path):
    service.sweep(_config(tmp_path / "a"))
    service.sweep(_config(tmp_path / "b"))

    for name in ("jcr.csv", "jct.csv", "utilization.csv", "jct.svg", "utilization_cdf.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_failed_cell_does_not_stop_the_sweep(service, mocker, tmp_path):
    real = run_trial

    def flaky(trace, cell, seed, gen_config):
        if cell.policy == PolicyKind.FOLDING:
            raise RuntimeError("boom")
        return real(trace, cell, seed, gen_config)

    mocker.patch("experiment.application.sweep_service.run_trial", side_effect=flaky)

    with pytest.raises(SweepFailedError) as excinfo:
        service.sweep(_config(tmp_path))

    assert excinfo.value.exit_code == 2
    assert "Folding-8x8x4" in excinfo.value.message
    rows = (tmp_path / "jcr.csv").read_text().splitlines()
    assert [row.split(",")[0] for row in rows[1:]] == ["FirstFit-8x8x4", "RFold-4^3"]


def test_folding_and_reconfiguration_complete_more_jobs(service, tmp_path):
    cells = [
        {"policy": "FirstFit", "static_extents": (16, 16, 16)},
        {"policy": "Folding", "static_extents": (16, 16, 16)},
        {"policy": "Reconfig", "cube_size": 4, "cube_count": 64},
        {"policy": "RFold", "cube_size": 4, "cube_count": 64},
        {"policy": "Reconfig", "cube_size": 8, "cube_count": 8},
        {"policy": "RFold", "cube_size": 8, "cube_count": 8},
    ]
    config = _config(tmp_path, cells=cells, trials=2, base_seed=11, gen={"job_count": 100})

    jcr = {result.label: result.summary.mean_jcr for result in service.run_cells(config)}

    assert jcr["FirstFit-16x16x16"] < jcr["Folding-16x16x16"]
    assert jcr["Reconfig-4^3"] == jcr["RFold-4^3"] == 1.0
    assert jcr["Reconfig-8^3"] <= jcr["RFold-8^3"]
