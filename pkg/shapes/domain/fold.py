import math
from dataclasses import dataclass, field
from common.compat import StrEnum

import numpy as np

from common.errors import ContractViolation
from shapes.domain.comm_graph import Coord
from shapes.domain.mapping import MappingMode
from topology.domain.fabric import ClusterSpec
from workload.domain.job import Shape


class FoldKind(StrEnum):
    IDENTITY = "identity"
    ROTATION = "rotation"
    SERPENTINE = "serpentine"
    REFLECTION = "reflection"
    BOX = "box"


@dataclass(frozen=True)
class FoldContext:
    """Where wrap hops exist for a target block, and which targets fit at all."""

    static_extents: tuple[int, int, int] | None = None
    cube_size: int | None = None
    cube_count: int = 1

    @classmethod
    def of(cls, spec: ClusterSpec) -> "FoldContext":
        if spec.static_mode:
            return cls(static_extents=spec.static_extents)
        return cls(cube_size=spec.cube_size, cube_count=spec.cube_count)

    def wrap_available(self, target: Shape, dim: int) -> bool:
        if self.static_extents is not None:
            return target[dim] == self.static_extents[dim]
        return target[dim] % self.cube_size == 0

    def cubes_needed(self, target: Shape) -> int:
        if self.static_extents is not None:
            return 1
        return math.prod(-(-extent // self.cube_size) for extent in target)

    def fits(self, target: Shape) -> bool:
        if self.static_extents is not None:
            return all(t <= e for t, e in zip(target, self.static_extents))
        return self.cubes_needed(target) <= self.cube_count


@dataclass(frozen=True)
class HopTable:
    """Every hop of every ring, in target coordinates."""

    src: np.ndarray
    dst: np.ndarray
    dim: np.ndarray
    wrap: np.ndarray
    closing: np.ndarray


@dataclass(frozen=True, eq=False)
class FoldVariant:
    """
    A homomorphic rewrite of a job shape. node_map[x, y, z] holds the target
    coordinate of source node (x, y, z); each ring of the source walks its
    target coordinates in the same order.
    """

    kind: FoldKind
    source: Shape
    target: Shape
    node_map: np.ndarray
    label: str
    hops: HopTable = field(repr=False)
    closure_wrap_dims: frozenset[int]
    required_wrap_dims: frozenset[int]
    _circuits: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, kind: FoldKind, source: Shape, node_map: np.ndarray, label: str) -> "FoldVariant":
        node_map = np.ascontiguousarray(node_map, dtype=np.int64)
        if node_map.shape != (*source.extents, 3):
            raise ContractViolation(f"{label}: node map does not cover {source}")
        target = Shape.of(node_map.reshape(-1, 3).max(axis=0) + 1)
        flat = node_map.reshape(-1, 3)
        if target.size != source.size or len(np.unique(flat, axis=0)) != source.size:
            raise ContractViolation(f"{label}: node map is not a bijection onto {target}")

        hops = _hop_table(source, target, node_map, label)
        node_map.flags.writeable = False
        return cls(
            kind=kind,
            source=source,
            target=target,
            node_map=node_map,
            label=label,
            hops=hops,
            closure_wrap_dims=frozenset(int(d) for d in hops.dim[hops.wrap & hops.closing]),
            required_wrap_dims=frozenset(int(d) for d in hops.dim[hops.wrap & ~hops.closing]),
        )

    def permuted(self, perm: tuple[int, int, int]) -> "FoldVariant":
        """The same fold with target axes reordered: new axis i is old axis perm[i]."""
        if perm == (0, 1, 2):
            return self
        kind = FoldKind.ROTATION if self.kind == FoldKind.IDENTITY else self.kind
        return FoldVariant.build(kind, self.source, self.node_map[..., list(perm)], self.label)

    def target_of(self, coord: Coord) -> Coord:
        return tuple(int(v) for v in self.node_map[coord])

    def ring_paths(self) -> list[tuple[Coord, ...]]:
        paths = []
        for dim in range(3):
            extent = self.source[dim]
            if extent < 2:
                continue
            for ring in np.moveaxis(self.node_map, dim, -2).reshape(-1, extent, 3):
                paths.append(tuple(tuple(int(v) for v in coord) for coord in ring))
        return paths

    def mode_in(self, context: FoldContext) -> MappingMode | None:
        """None when an interior wrap hop has no link in this context."""
        if not all(context.wrap_available(self.target, d) for d in self.required_wrap_dims):
            return None
        if all(context.wrap_available(self.target, d) for d in self.closure_wrap_dims):
            return MappingMode.RING_COMPLETE
        return MappingMode.LINE_COMPLETE

    def circuit_count(self, cube_size: int) -> int:
        """
        OCS circuit links the rings use once the target is cut into cube
        pieces aligned at multiples of cube_size.
        """
        if cube_size not in self._circuits:
            hops = self.hops
            lo = np.minimum(
                np.take_along_axis(hops.src, hops.dim[:, None], axis=1),
                np.take_along_axis(hops.dst, hops.dim[:, None], axis=1),
            )[:, 0]
            crossing = ~hops.wrap & ((lo + 1) % cube_size == 0)
            extents = np.array(self.target.extents)[hops.dim]
            closed = hops.wrap & (extents % cube_size == 0)
            self._circuits[cube_size] = int(crossing.sum() + closed.sum())
        return self._circuits[cube_size]


def _hop_table(source: Shape, target: Shape, node_map: np.ndarray, label: str) -> HopTable:
    src, dst, closing = [], [], []
    for dim in range(3):
        extent = source[dim]
        if extent < 2:
            continue
        paths = np.moveaxis(node_map, dim, -2).reshape(-1, extent, 3)
        src.append(paths[:, :-1].reshape(-1, 3))
        dst.append(paths[:, 1:].reshape(-1, 3))
        closing.append(np.zeros(len(paths) * (extent - 1), dtype=bool))
        if extent >= 3:
            src.append(paths[:, -1])
            dst.append(paths[:, 0])
            closing.append(np.ones(len(paths), dtype=bool))

    if not src:
        empty = np.zeros((0, 3), dtype=np.int64)
        none = np.zeros(0, dtype=bool)
        return HopTable(empty, empty, np.zeros(0, dtype=np.int64), none, none)

    src = np.concatenate(src)
    dst = np.concatenate(dst)
    closing = np.concatenate(closing)
    diff = dst - src
    moved = diff != 0
    if (moved.sum(axis=1) != 1).any():
        raise ContractViolation(f"{label}: a ring hop moves along more than one dimension")

    dim = moved.argmax(axis=1)
    step = np.abs(diff[np.arange(len(diff)), dim])
    extents = np.array(target.extents)[dim]
    unit = step == 1
    wrap = ~unit & (step == extents - 1) & (extents >= 3)
    if not (unit | wrap).all():
        raise ContractViolation(f"{label}: a ring hop joins non-adjacent target coordinates")
    return HopTable(src=src, dst=dst, dim=dim, wrap=wrap, closing=closing)
