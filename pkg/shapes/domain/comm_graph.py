import itertools
from dataclasses import dataclass
from functools import lru_cache

from workload.domain.job import Shape

Coord = tuple[int, int, int]


@dataclass(frozen=True)
class Ring:
    """One AllReduce group: nodes along dim, in coordinate order."""

    dim: int
    nodes: tuple[Coord, ...]

    @property
    def length(self) -> int:
        return len(self.nodes)

    def hops(self, closed: bool = True) -> list[tuple[Coord, Coord]]:
        pairs = list(zip(self.nodes, self.nodes[1:]))
        # A ring of two is a single edge; there is nothing to close.
        if closed and self.length >= 3:
            pairs.append((self.nodes[-1], self.nodes[0]))
        return pairs


@dataclass(frozen=True)
class CommGraph:
    shape: Shape
    nodes: tuple[Coord, ...]
    rings: tuple[Ring, ...]

    def rings_along(self, dim: int) -> list[Ring]:
        return [ring for ring in self.rings if ring.dim == dim]

    def node_count(self) -> int:
        return len(self.nodes)


@lru_cache(maxsize=4096)
def comm_graph(shape: Shape) -> CommGraph:
    """
    Rings per dim with extent > 1, one per combination of the other two
    coordinates; rings are ordered by dim, then lexicographically by the
    remaining coordinates.
    """
    extents = shape.extents
    nodes = tuple(itertools.product(*(range(e) for e in extents)))
    rings = []
    for dim in range(3):
        if extents[dim] < 2:
            continue
        others = [d for d in range(3) if d != dim]
        for i, j in itertools.product(range(extents[others[0]]), range(extents[others[1]])):
            members = []
            for t in range(extents[dim]):
                coord = [0, 0, 0]
                coord[dim], coord[others[0]], coord[others[1]] = t, i, j
                members.append(tuple(coord))
            rings.append(Ring(dim, tuple(members)))
    return CommGraph(shape=shape, nodes=nodes, rings=tuple(rings))
