import pytest

from common.errors import ConfigurationError
from config import Settings
from placement.domain.plan import PolicyKind
from shapes.domain.mapping import MappingMode
from simulator.application.simulator_service import SimulatorService
from simulator.domain.report import JobStatus
from topology.domain.cluster_state import ClusterState
from topology.domain.fabric import ClusterSpec
from workload.application.trace_service import TraceService
from workload.domain.gen_config import GenConfig
from workload.domain.job import Job, Shape, Trace

SMALL_TORUS = ClusterSpec.static(4, 4, 4)


@pytest.fixture
def simulator():
    return SimulatorService(Settings(debug_invariants=True))


def _trace(*jobs):
    return Trace([Job(f"job-{i}", arrival, duration, Shape.of(shape)) for i, (arrival, duration, shape) in enumerate(jobs)])


def test_single_job_starts_on_arrival(simulator):
    report = simulator.run(_trace((3.0, 7.5, (2, 2, 2))), PolicyKind.FIRST_FIT, SMALL_TORUS)

    (record,) = report.records
    assert report.jcr == 1.0
    assert record.start == 3.0
    assert record.jct == 7.5
    assert record.mode == MappingMode.RING_COMPLETE
    assert record.cubes_used == 1


def test_second_whole_cluster_job_waits(simulator):
    report = simulator.run(
        _trace((0.0, 10.0, (4, 4, 4)), (1.0, 10.0, (4, 4, 4))), PolicyKind.FIRST_FIT, SMALL_TORUS
    )

    first, second = report.records
    assert second.start == 10.0
    assert second.jct == 19.0
    assert report.jcts == [10.0, 19.0]


def test_departure_frees_xpus_for_same_instant_arrival(simulator):
    report = simulator.run(
        _trace((0.0, 5.0, (4, 4, 4)), (5.0, 1.0, (4, 4, 4))), PolicyKind.FIRST_FIT, SMALL_TORUS
    )

    assert report.records[1].start == 5.0


def test_blocked_head_blocks_smaller_jobs(simulator):
    report = simulator.run(
        _trace((0.0, 10.0, (4, 4, 2)), (1.0, 5.0, (4, 4, 4)), (2.0, 1.0, (2, 2, 2))),
        PolicyKind.FIRST_FIT,
        SMALL_TORUS,
    )

    starts = [record.start for record in report.records]
    assert starts == [0.0, 10.0, 15.0]


def test_oversized_job_is_rejected():
    report = SimulatorService().run(
        _trace((0.0, 5.0, (4, 4, 4)), (1.0, 5.0, (17, 1, 1))),
        PolicyKind.FIRST_FIT,
        ClusterSpec.static(16, 16, 16),
    )

    assert report.records[1].status == JobStatus.REJECTED
    assert report.records[1].start is None
    assert report.jcr == 0.5
    assert report.completed + report.rejected == 2


def test_policy_must_suit_the_fabric(simulator):
    with pytest.raises(ConfigurationError):
        simulator.run(_trace((0.0, 1.0, (1, 1, 1))), PolicyKind.FIRST_FIT, ClusterSpec.reconfigurable(8, 2))


def test_empty_trace(simulator):
    report = simulator.run(Trace([]), PolicyKind.RFOLD, ClusterSpec.reconfigurable(8, 2))

    assert report.jcr == 1.0
    assert report.empty_trace
    assert report.samples == []


def test_utilization_is_sampled_at_every_event(simulator):
    report = simulator.run(
        _trace((0.0, 10.0, (4, 4, 2)), (1.0, 5.0, (4, 4, 2))), PolicyKind.FIRST_FIT, SMALL_TORUS
    )

    assert report.samples == [(0.0, 0.5), (1.0, 1.0), (6.0, 0.5), (10.0, 0.0)]


def test_invariants_checked_after_every_event(mocker):
    check = mocker.patch.object(ClusterState, "check_invariants")
    simulator = SimulatorService(Settings(debug_invariants=True))

    simulator.run(_trace((0.0, 2.0, (2, 2, 2)), (1.0, 2.0, (2, 2, 2))), PolicyKind.FIRST_FIT, SMALL_TORUS)

    assert check.call_count == 4


def test_runs_are_deterministic(simulator, mocker):
    trace = TraceService(mocker.Mock()).generate_trace(GenConfig(job_count=40, seed=11))
    spec = ClusterSpec.reconfigurable(8, 4)

    first = simulator.run(trace, PolicyKind.RFOLD, spec, seed=11)
    second = simulator.run(trace, PolicyKind.RFOLD, spec, seed=11)

    assert first.records == second.records
    assert first.samples == second.samples
    assert first.completed + first.rejected == 40
