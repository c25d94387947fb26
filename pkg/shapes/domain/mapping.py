from dataclasses import dataclass, field
from common.compat import StrEnum

from shapes.domain.comm_graph import Coord
from topology.domain.fabric import LinkId, XpuId


class MappingMode(StrEnum):
    RING_COMPLETE = "ring_complete"
    LINE_COMPLETE = "line_complete"


class ViolationKind(StrEnum):
    COVERAGE = "coverage"
    INJECTIVITY = "injectivity"
    BUSY_XPU = "busy_xpu"
    ADJACENCY = "adjacency"
    CLOSURE = "closure"
    EDGE_REUSE = "edge_reuse"
    OWNED_LINK = "owned_link"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str


@dataclass(frozen=True)
class PlacementMapping:
    """
    xpu_of is keyed by the job's own logical coordinates. rings holds, per
    ring of the job's comm graph (same order), the links realizing it: hop k
    joins ring nodes k and k+1, and a final extra link closes the ring.
    """

    mode: MappingMode
    xpu_of: dict[Coord, XpuId]
    rings: tuple[tuple[LinkId, ...], ...] = field(default=())

    @property
    def xpus(self) -> frozenset[XpuId]:
        return frozenset(self.xpu_of.values())

    @property
    def links(self) -> frozenset[LinkId]:
        return frozenset(link for ring in self.rings for link in ring)

    def cubes(self) -> frozenset[int]:
        return frozenset(xpu.cube for xpu in self.xpu_of.values())

    def anchor(self) -> XpuId:
        return min(self.xpu_of.values())
