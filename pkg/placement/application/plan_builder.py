import numpy as np

from placement.domain.plan import PlacementPlan
from shapes.application.mapping_verifier import realize_rings
from shapes.domain.comm_graph import Coord, comm_graph
from shapes.domain.fold import FoldVariant
from shapes.domain.mapping import MappingMode
from topology.domain.cluster_state import ClusterState
from topology.domain.fabric import PortId, XpuId
from workload.domain.job import Shape


def assign_variant(variant: FoldVariant, locate) -> dict[Coord, XpuId]:
    """Map every source node through the fold, then through locate(target coords array)."""
    targets = variant.node_map.reshape(-1, 3)
    xpus = locate(targets)
    return {coord: xpu for coord, xpu in zip(np.ndindex(variant.source.extents), xpus)}


def plan_from_assignment(
    state: ClusterState,
    shape: Shape,
    xpu_of: dict[Coord, XpuId],
    mode: MappingMode | None,
    *,
    circuits: tuple[tuple[PortId, PortId], ...] = (),
    variant: str = "identity",
    target: Shape | None = None,
) -> PlacementPlan | None:
    mapping = realize_rings(comm_graph(shape), xpu_of, state, mode)
    if mapping is None:
        return None
    return PlacementPlan(shape, mapping, circuits, variant, target)


def plan_from_walk(
    state: ClusterState,
    shape: Shape,
    walk: list[XpuId],
    mode: MappingMode | None,
    *,
    circuits: tuple[tuple[PortId, PortId], ...] = (),
    variant: str = "cycle",
) -> PlacementPlan | None:
    """A 1D job laid along a found cycle or path, ring node k on walk[k]."""
    comm = comm_graph(shape)
    nodes = comm.rings[0].nodes if comm.rings else comm.nodes
    return plan_from_assignment(
        state, shape, dict(zip(nodes, walk)), mode, circuits=circuits, variant=variant
    )
