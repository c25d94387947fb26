import pytest

from common.errors import ConfigurationError
from topology.domain.fabric import (
    ClusterSpec,
    Direction,
    LinkId,
    LinkKind,
    XpuId,
    cross_position,
    from_cross_position,
)


def test_reconfigurable_spec_counts():
    spec = ClusterSpec.reconfigurable(64, 4)

    assert spec.total_xpus == 4096
    assert spec.ocs_count == 48
    assert spec.label == "64x4^3"


def test_static_spec_counts():
    spec = ClusterSpec.static(16, 16, 16)

    assert spec.total_xpus == 4096
    assert spec.ocs_count == 0
    assert spec.cubes == 1


def test_rectangular_static_spec():
    spec = ClusterSpec.static(4, 8, 4).validate()

    assert spec.extents == (4, 8, 4)
    assert spec.total_xpus == 128


@pytest.mark.parametrize(
    "spec",
    [
        ClusterSpec.reconfigurable(0, 4),
        ClusterSpec.reconfigurable(4, 1),
        ClusterSpec.static(16, 0, 16),
    ],
)
def test_invalid_specs_are_refused(spec):
    with pytest.raises(ConfigurationError):
        spec.validate()


def test_unit_cube_allowed_with_override():
    spec = ClusterSpec.reconfigurable(8, 1, allow_unit_cube=True).validate()

    assert spec.total_xpus == 8


def test_direction_properties():
    assert Direction.Z_PLUS.dim == 2
    assert Direction.Z_PLUS.is_plus
    assert not Direction.X_MINUS.is_plus
    assert Direction.of(1, False) == Direction.Y_MINUS


def test_cross_position_round_trip():
    for dim in range(3):
        coord = from_cross_position(dim, (1, 2), 3)
        assert coord[dim] == 3
        assert cross_position(dim, coord) == (1, 2)


def test_circuit_ports_of_link():
    link = LinkId(LinkKind.CIRCUIT, XpuId(0, 0, 0, 3), XpuId(1, 0, 0, 0), 2)

    out_port, in_port = link.circuit_ports

    assert out_port.direction == Direction.Z_PLUS
    assert in_port.direction == Direction.Z_MINUS
    assert LinkId(LinkKind.INTRA, XpuId(0, 0, 0, 0), XpuId(0, 1, 0, 0), 0).circuit_ports is None


def test_bipartite_flag():
    assert ClusterSpec.static(16, 16, 16).bipartite
    assert not ClusterSpec.static(5, 4, 4).bipartite
    assert ClusterSpec.reconfigurable(8, 4).bipartite
