from collections import deque
from collections.abc import Iterable
from functools import cached_property

import numpy as np

from common.logger import logger
from config import get_settings
from shapes.application.fold_service import box_walk, partial_box_walk
from topology.domain.cluster_state import ClusterState
from topology.domain.fabric import XpuId
from utils.block_scan import free_anchor_mask, occupancy_table

Cell3 = tuple[int, int, int]


class FreeGraph:
    """
    The free XPUs of a state (optionally limited to some cubes or to an
    explicit XPU set) and the physical links among them.

    With chain_dim, the cubes are laid end to end in the given order along
    that dimension, so box seeds may span the circuits joining them.
    """

    def __init__(
        self,
        state: ClusterState,
        cubes: Iterable[int] | None = None,
        xpus: Iterable[XpuId] | None = None,
        chain_dim: int | None = None,
    ):
        self.state = state
        if cubes is None:
            self.cubes = list(range(state.spec.cubes))
        elif chain_dim is None:
            self.cubes = sorted(set(cubes))
        else:
            self.cubes = list(dict.fromkeys(cubes))
        self.chain_dim = chain_dim
        self._xpus = frozenset(xpus) if xpus is not None else None

    @cached_property
    def nodes(self) -> list[XpuId]:
        busy = self.state.busy_mask[self.cubes]
        nodes = [
            XpuId(self.cubes[int(c)], int(x), int(y), int(z)) for c, x, y, z in np.argwhere(~busy)
        ]
        if self._xpus is not None:
            nodes = [xpu for xpu in nodes if xpu in self._xpus]
        return nodes

    @cached_property
    def adj(self) -> dict[XpuId, list[XpuId]]:
        members = set(self.nodes)
        return {
            xpu: sorted({nb for _, nb in self.state.neighbors(xpu) if nb in members and nb != xpu})
            for xpu in self.nodes
        }

    @property
    def bipartite(self) -> bool:
        return self.state.spec.bipartite

    def __len__(self):
        return len(self.nodes)

    @cached_property
    def grid(self) -> np.ndarray:
        """Busy mask scanned for box seeds: one block per cube, or one chained block."""
        busy = self.state.busy_mask[self.cubes]
        if self.chain_dim is None:
            return busy
        return np.concatenate(list(busy), axis=self.chain_dim)[None]

    @cached_property
    def _table(self) -> np.ndarray:
        return occupancy_table(self.grid)

    @property
    def extents(self) -> Cell3:
        return tuple(int(e) for e in self.grid.shape[-3:])

    def _locate(self, block: int, coord: list[int]) -> XpuId:
        if self.chain_dim is None:
            return XpuId(self.cubes[block], *coord)
        n = self.state.extents[self.chain_dim]
        link, coord[self.chain_dim] = divmod(coord[self.chain_dim], n)
        return XpuId(self.cubes[link], *coord)

    def place_walk(self, extents: Cell3, cells: list[Cell3]) -> list[XpuId] | None:
        """The first free box of these extents, walked in the order of cells."""
        for block, *anchor in np.argwhere(free_anchor_mask(self.grid, extents, self._table)).tolist():
            xpus = [self._locate(block, [a + d for a, d in zip(anchor, cell)]) for cell in cells]
            if self._xpus is None or all(xpu in self._xpus for xpu in xpus):
                return xpus
        return None

    def distances(self, start: XpuId, allowed) -> dict[XpuId, int]:
        dist = {start: 0}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nb in self.adj[node]:
                if nb not in dist and nb in allowed:
                    dist[nb] = dist[node] + 1
                    queue.append(nb)
        return dist


def _box_shapes(length: int) -> list[Cell3]:
    return [
        (p, q, length // (p * q))
        for p in range(1, length + 1)
        if length % p == 0
        for q in range(1, length // p + 1)
        if (length // p) % q == 0
    ]


def _covering_boxes(length: int, limits: Cell3) -> list[Cell3]:
    """Boxes within limits holding more than length cells (at most twice), smallest first."""
    lx, ly, lz = limits
    boxes = [
        (a, b, c)
        for a in range(1, lx + 1)
        for b in range(1, ly + 1)
        for c in range(1, lz + 1)
        if length < a * b * c <= 2 * length
    ]
    return sorted(boxes, key=lambda box: (box[0] * box[1] * box[2], box))


def _box_seed(graph: FreeGraph, length: int, closed: bool) -> list[XpuId] | None:
    """A walk over a free box: exact volumes first, then part of a larger box."""
    if closed and length % 2:
        return None
    limits = graph.extents
    for extents in _box_shapes(length):
        if closed and sum(e >= 2 for e in extents) < 2:
            continue
        if any(e > limit for e, limit in zip(extents, limits)):
            continue
        found = graph.place_walk(extents, box_walk(extents, closed))
        if found is not None:
            return found
    for extents in _covering_boxes(length, limits):
        cells = partial_box_walk(extents, length, closed)
        if cells is None:
            continue
        found = graph.place_walk(extents, cells)
        if found is not None:
            return found
    return None


def _warnsdorff(graph: FreeGraph, length: int, closed: bool, budget: int) -> list[XpuId] | None:
    expansions = 0
    nodes = graph.nodes
    allowed = set(nodes)
    for index, start in enumerate(nodes):
        # Each cycle is found from its smallest node.
        if closed and index:
            allowed.discard(nodes[index - 1])
        dist = graph.distances(start, allowed)
        expansions += len(dist)
        if expansions > budget:
            break
        if len(dist) < length:
            continue

        path = [start]
        on_path = {start}

        def moves(node: XpuId) -> list[XpuId]:
            steps_left = length - len(path)
            options = [
                nb
                for nb in graph.adj[node]
                if nb not in on_path and nb in dist and (not closed or dist[nb] <= steps_left)
            ]
            return sorted(options, key=lambda nb: (sum(w not in on_path for w in graph.adj[nb]), nb))

        stack = [iter(moves(start))]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            expansions += 1
            if expansions > budget:
                logger.debug(f"search for {length} XPUs gave up after {budget} expansions")
                return None
            path.append(nxt)
            on_path.add(nxt)
            if len(path) == length:
                if not closed or start in graph.adj[nxt]:
                    return path
                on_path.discard(path.pop())
                continue
            stack.append(iter(moves(nxt)))
    return None


def find_cycle(graph: FreeGraph, length: int, budget: int | None = None) -> list[XpuId] | None:
    """
    A simple cycle of exactly length free XPUs, consecutive members (and the
    last and first) physically adjacent. None when there is none or the
    expansion budget runs out.
    """
    budget = budget or get_settings().cycle_search_budget
    if length < 1 or length > len(graph):
        return None
    if length == 1:
        return [graph.nodes[0]]
    if length == 2:
        for node in graph.nodes:
            if graph.adj[node]:
                return [node, graph.adj[node][0]]
        return None
    if length % 2 and graph.bipartite:
        return None
    return _box_seed(graph, length, closed=True) or _warnsdorff(graph, length, True, budget)


def find_path(graph: FreeGraph, length: int, budget: int | None = None) -> list[XpuId] | None:
    """A simple path of exactly length free XPUs."""
    budget = budget or get_settings().cycle_search_budget
    if length < 1 or length > len(graph):
        return None
    if length == 1:
        return [graph.nodes[0]]
    return _box_seed(graph, length, closed=False) or _warnsdorff(graph, length, False, budget)
