import itertools

import pytest

from placement.application.reconfig_placer import PieceGrid, reconfig_place, rfold_place
from shapes.application.fold_service import enumerate_folds
from shapes.application.mapping_verifier import verify_mapping
from shapes.domain.comm_graph import comm_graph
from shapes.domain.fold import FoldContext
from shapes.domain.mapping import MappingMode
from topology.domain.cluster_state import build_cluster
from topology.domain.fabric import ClusterSpec, LinkKind, XpuId
from workload.domain.job import Shape


@pytest.fixture
def cluster():
    return build_cluster(ClusterSpec.reconfigurable(64, 4))


def _assert_valid(state, plan):
    view = state.view()
    for out_port, in_port in plan.circuits_to_set:
        view.set_circuit(out_port, in_port)
    assert verify_mapping(plan.mapping, comm_graph(plan.shape), view) == []
    used = {link.circuit_ports for link in plan.mapping.links if link.kind == LinkKind.CIRCUIT}
    assert set(plan.circuits_to_set) <= used


def test_piece_grid_cuts_the_remainder_last():
    grid = PieceGrid(Shape(4, 4, 34), 4)

    assert grid.counts == (1, 1, 9)
    assert grid.block((0, 0, 0), (0, 0, 0)) == ((0, 0, 0), (4, 4, 4))
    assert grid.block((0, 0, 8), (0, 0, 0)) == ((0, 0, 0), (4, 4, 2))
    assert list(grid.offsets()) == [(0, 0, 0)]


def test_piece_grid_offsets_of_thin_dimensions():
    grid = PieceGrid(Shape(2, 1, 8), 4)

    assert grid.counts == (1, 1, 2)
    assert list(grid.offsets()) == [(x, y, 0) for x in range(3) for y in range(4)]
    assert grid.block((0, 0, 1), (2, 3, 0)) == ((2, 3, 0), (2, 1, 4))


def test_chained_cubes_close_the_long_ring(cluster):
    plan = reconfig_place(cluster, Shape(4, 4, 32))

    assert plan.cost.cubes_used == 8
    assert plan.mode == MappingMode.RING_COMPLETE
    identity = enumerate_folds(Shape(4, 4, 32), FoldContext.of(cluster.spec))[0]
    assert plan.cost.ocs_circuits_used == identity.circuit_count(4)
    _assert_valid(cluster, plan)


def test_partial_last_cube_leaves_the_ring_open(cluster):
    plan = reconfig_place(cluster, Shape(4, 4, 34))

    assert plan.cost.cubes_used == 9
    assert plan.mode == MappingMode.LINE_COMPLETE
    _assert_valid(cluster, plan)


def test_small_job_needs_no_circuits(cluster):
    plan = reconfig_place(cluster, Shape(2, 2, 2))

    assert plan.cost.cubes_used == 1
    assert plan.cost.ocs_circuits_used == 0
    assert plan.circuits_to_set == ()
    assert plan.mode == MappingMode.RING_COMPLETE


def test_fragmented_cubes_are_used_first(cluster):
    cluster.allocate("other", [XpuId(5, 3, 3, 3)], ())

    plan = reconfig_place(cluster, Shape(2, 2, 2))

    assert plan.mapping.cubes() == {5}
    assert plan.anchor == XpuId(5, 0, 0, 0)
    _assert_valid(cluster, plan)


def test_pieces_skip_busy_cubes(cluster):
    busy = [XpuId(c, 0, 0, 0) for c in range(0, 64, 2)]
    cluster.allocate("other", busy, ())

    plan = reconfig_place(cluster, Shape(4, 4, 8))

    assert plan.cost.cubes_used == 2
    assert all(cube % 2 == 1 for cube in plan.mapping.cubes())
    _assert_valid(cluster, plan)


def test_not_enough_free_xpus(cluster):
    cluster.allocate("other", [xpu for xpu in cluster.all_xpus() if xpu.cube > 0], ())

    assert reconfig_place(cluster, Shape(4, 4, 8)) is None
    assert rfold_place(cluster, Shape(4, 4, 8)) is None


def test_folding_fits_one_cube(cluster):
    folded = rfold_place(cluster, Shape(4, 8, 2))
    plain = reconfig_place(cluster, Shape(4, 8, 2))

    assert folded.cost.cubes_used == 1
    assert folded.target == Shape(4, 4, 4)
    assert plain.cost.cubes_used == 2
    _assert_valid(cluster, folded)


def test_no_fold_beats_a_full_cube(cluster):
    folded = rfold_place(cluster, Shape(4, 4, 4))
    plain = reconfig_place(cluster, Shape(4, 4, 4))

    assert folded.cost == plain.cost
    assert folded.mode == plain.mode == MappingMode.RING_COMPLETE


def test_long_ring_across_two_nearly_full_cubes(cluster):
    keep = {XpuId(c, x, y, 0) for c in (0, 1) for x, y in itertools.product(range(4), repeat=2)}
    cluster.allocate("other", [xpu for xpu in cluster.all_xpus() if xpu not in keep], ())

    plan = rfold_place(cluster, Shape(18, 1, 1))

    assert plan.mode == MappingMode.RING_COMPLETE
    assert plan.cost.cubes_used == 2
    assert plan.mapping.xpus <= keep
    _assert_valid(cluster, plan)


def test_ring_without_a_box_stays_in_one_cube(cluster):
    plan = rfold_place(cluster, Shape(22, 1, 1))

    assert plan.cost.cubes_used == 1
    assert plan.mode == MappingMode.RING_COMPLETE
    assert plan.variant == "cycle"
    _assert_valid(cluster, plan)


def test_chain_cycle_over_scattered_cubes(cluster):
    keep = {XpuId(c, x, y, 0) for c in (3, 7, 9) for x, y in itertools.product(range(4), repeat=2)}
    keep -= {XpuId(7, 0, 0, 0), XpuId(7, 1, 0, 0)}
    cluster.allocate("other", [xpu for xpu in cluster.all_xpus() if xpu not in keep], ())

    plan = rfold_place(cluster, Shape(26, 1, 1))

    assert plan.variant == "chain-cycle"
    assert plan.mapping.cubes() == {3, 7}
    assert plan.mode == MappingMode.RING_COMPLETE
    assert plan.mapping.xpus <= keep
    _assert_valid(cluster, plan)


def test_long_ring_fits_two_cubes(cluster):
    plan = rfold_place(cluster, Shape(66, 1, 1))

    assert plan.mode == MappingMode.RING_COMPLETE
    assert plan.cost.cubes_used == 2
    _assert_valid(cluster, plan)


def test_long_ring_when_only_two_cubes_have_room(cluster):
    cluster.allocate("other", [xpu for xpu in cluster.all_xpus() if xpu.cube >= 2], ())

    plan = rfold_place(cluster, Shape(66, 1, 1))

    assert plan is not None
    assert plan.mode == MappingMode.RING_COMPLETE
    assert plan.mapping.cubes() == {0, 1}
    _assert_valid(cluster, plan)


def test_planning_never_reprograms_the_fabric(cluster):
    before = cluster.circuits()

    rfold_place(cluster, Shape(4, 4, 32))
    rfold_place(cluster, Shape(18, 1, 1))

    assert cluster.circuits() == before
    assert cluster.busy_count() == 0


def test_plans_are_deterministic(cluster):
    first = rfold_place(cluster, Shape(6, 4, 2))
    second = rfold_place(cluster, Shape(6, 4, 2))

    assert first.mapping.xpu_of == second.mapping.xpu_of
    assert first.circuits_to_set == second.circuits_to_set
