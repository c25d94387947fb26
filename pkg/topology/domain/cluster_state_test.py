import pytest

from common.errors import (
    AlignmentError,
    BusyError,
    ConfigurationError,
    ExclusivityError,
    UnknownResourceError,
    UnsupportedOperationError,
)
from topology.domain.cluster_state import build_cluster
from topology.domain.fabric import (
    ClusterSpec,
    Direction,
    LinkKind,
    PortId,
    XpuId,
)


@pytest.fixture
def one_cube():
    return build_cluster(ClusterSpec.reconfigurable(1, 4))


@pytest.fixture
def two_cubes():
    return build_cluster(ClusterSpec.reconfigurable(2, 4))


def neighbor_xpus(state, xpu):
    return [nb for _, nb in state.neighbors(xpu)]


def test_build_full_cluster():
    state = build_cluster(ClusterSpec.reconfigurable(64, 4))

    assert state.free_count() == 4096
    assert state.spec.ocs_count == 48
    # every face port starts self-wrapped
    assert len(state.circuits()) == 3 * 16 * 64


def test_build_refuses_invalid_spec():
    with pytest.raises(ConfigurationError):
        build_cluster(ClusterSpec.reconfigurable(0, 4))


def test_default_self_wrap(one_cube):
    nbs = neighbor_xpus(one_cube, XpuId(0, 0, 0, 0))

    assert XpuId(0, 3, 0, 0) in nbs
    assert XpuId(0, 0, 3, 0) in nbs
    assert XpuId(0, 0, 0, 3) in nbs
    kinds = [link.kind for link, _ in one_cube.neighbors(XpuId(0, 0, 0, 0))]
    assert kinds.count(LinkKind.INTRA) == 3
    assert kinds.count(LinkKind.CIRCUIT) == 3


def test_interior_xpu_has_six_intra_links(one_cube):
    links = one_cube.neighbors(XpuId(0, 1, 1, 1))

    assert len(links) == 6
    assert all(link.kind == LinkKind.INTRA for link, _ in links)


def test_static_torus_wraps():
    state = build_cluster(ClusterSpec.static(16, 16, 16))

    assert state.free_count() == 4096
    assert state.spec.ocs_count == 0
    links = dict((nb, link) for link, nb in state.neighbors(XpuId(0, 15, 0, 0)))
    assert links[XpuId(0, 0, 0, 0)].kind == LinkKind.WRAP


def test_degree_never_exceeds_six():
    state = build_cluster(ClusterSpec.reconfigurable(2, 2))

    for xpu in state.all_xpus():
        assert len(state.neighbors(xpu)) <= 6


def test_unknown_xpu(one_cube):
    with pytest.raises(UnknownResourceError):
        one_cube.neighbors(XpuId(0, 4, 0, 0))
    with pytest.raises(UnknownResourceError):
        one_cube.neighbors(XpuId(1, 0, 0, 0))


def test_set_circuit_joins_cubes(two_cubes):
    two_cubes.set_circuit(
        PortId(XpuId(0, 0, 0, 3), Direction.Z_PLUS),
        PortId(XpuId(1, 0, 0, 0), Direction.Z_MINUS),
    )

    assert XpuId(1, 0, 0, 0) in neighbor_xpus(two_cubes, XpuId(0, 0, 0, 3))
    # the displaced self-wraps leave the two other ports unconnected
    assert XpuId(0, 0, 0, 3) not in neighbor_xpus(two_cubes, XpuId(0, 0, 0, 0))
    two_cubes.check_invariants()


def test_set_circuit_aligned_ports():
    state = build_cluster(ClusterSpec.reconfigurable(6, 4))

    circuit = state.set_circuit(
        PortId(XpuId(0, 1, 2, 3), Direction.Z_PLUS),
        PortId(XpuId(5, 1, 2, 0), Direction.Z_MINUS),
    )

    assert (circuit.ocs.i, circuit.ocs.j) == (1, 2)


def test_set_circuit_misaligned_ports():
    state = build_cluster(ClusterSpec.reconfigurable(6, 4))

    with pytest.raises(AlignmentError):
        state.set_circuit(
            PortId(XpuId(0, 1, 2, 3), Direction.Z_PLUS),
            PortId(XpuId(5, 2, 1, 0), Direction.Z_MINUS),
        )


def test_set_circuit_different_dimension(two_cubes):
    with pytest.raises(AlignmentError):
        two_cubes.set_circuit(
            PortId(XpuId(0, 0, 0, 3), Direction.Z_PLUS),
            PortId(XpuId(1, 0, 0, 0), Direction.X_MINUS),
        )


def test_set_circuit_refuses_owned_link(two_cubes):
    a, b = XpuId(0, 0, 0, 3), XpuId(0, 0, 0, 0)
    wrap = two_cubes.link_between(a, b)
    wrap = [link for link in wrap if link.kind == LinkKind.CIRCUIT]
    two_cubes.allocate("J1", {a, b}, wrap)
    before = two_cubes.circuits()

    with pytest.raises(BusyError):
        two_cubes.set_circuit(
            PortId(a, Direction.Z_PLUS),
            PortId(XpuId(1, 0, 0, 0), Direction.Z_MINUS),
        )

    assert two_cubes.circuits() == before


def test_set_circuit_on_static_torus():
    state = build_cluster(ClusterSpec.static(4, 4, 4))

    with pytest.raises(UnsupportedOperationError):
        state.set_circuit(
            PortId(XpuId(0, 0, 0, 3), Direction.Z_PLUS),
            PortId(XpuId(0, 0, 0, 0), Direction.Z_MINUS),
        )


def test_allocate_and_release(one_cube):
    a, b = XpuId(0, 0, 0, 0), XpuId(0, 1, 0, 0)
    links = one_cube.link_between(a, b)

    one_cube.allocate("J1", {a, b}, links)

    assert one_cube.xpu_owner[a] == "J1"
    assert one_cube.link_owner[links[0]] == "J1"
    with pytest.raises(ExclusivityError):
        one_cube.allocate("J2", {a}, [])

    one_cube.release("J1")
    one_cube.allocate("J2", {a, b}, links)

    assert one_cube.xpu_owner[b] == "J2"
    one_cube.check_invariants()


def test_release_keeps_circuits(two_cubes):
    out_xpu, in_xpu = XpuId(0, 0, 0, 3), XpuId(1, 0, 0, 0)
    two_cubes.set_circuit(PortId(out_xpu, Direction.Z_PLUS), PortId(in_xpu, Direction.Z_MINUS))
    two_cubes.allocate("J1", {out_xpu, in_xpu}, two_cubes.link_between(out_xpu, in_xpu))

    two_cubes.release("J1")

    assert in_xpu in neighbor_xpus(two_cubes, out_xpu)
    assert two_cubes.free_count() == two_cubes.spec.total_xpus


def test_release_unknown_job(one_cube):
    with pytest.raises(UnknownResourceError):
        one_cube.release("nobody")


def test_view_reprograms_only_its_copy(two_cubes):
    view = two_cubes.view()

    assert view.is_view and not two_cubes.is_view
    view.set_circuit(
        PortId(XpuId(0, 0, 0, 3), Direction.Z_PLUS),
        PortId(XpuId(1, 0, 0, 0), Direction.Z_MINUS),
    )

    assert XpuId(1, 0, 0, 0) in neighbor_xpus(view, XpuId(0, 0, 0, 3))
    assert XpuId(1, 0, 0, 0) not in neighbor_xpus(two_cubes, XpuId(0, 0, 0, 3))
    with pytest.raises(UnsupportedOperationError):
        view.allocate("J1", {XpuId(0, 0, 0, 0)}, [])


def test_builds_are_deterministic():
    spec = ClusterSpec.reconfigurable(4, 2)
    first, second = build_cluster(spec), build_cluster(spec)

    for xpu in first.all_xpus():
        assert first.neighbors(xpu) == second.neighbors(xpu)
