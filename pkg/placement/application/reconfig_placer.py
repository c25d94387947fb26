import dataclasses
import itertools
from collections.abc import Iterator

import numpy as np

from common.errors import AlignmentError, BusyError
from common.logger import logger
from config import get_settings
from placement.application.plan_builder import plan_from_assignment, plan_from_walk
from placement.domain.plan import PlacementPlan, rank
from shapes.application.cycle_search import FreeGraph, find_cycle
from shapes.application.fold_service import enumerate_folds
from shapes.domain.fold import FoldContext, FoldKind, FoldVariant
from shapes.domain.mapping import MappingMode
from topology.domain.cluster_state import ClusterState
from topology.domain.fabric import Dim, Direction, LinkKind, PortId, XpuId, from_cross_position
from utils.block_scan import free_anchor_mask
from workload.domain.job import Shape

GridCell = tuple[int, int, int]

# Dimension along which 1D jobs chain extra cubes.
CHAIN_DIM = Dim.Y
# Cycle searches outside the fold variants get the cycle budget divided by this.
EXTRA_SEARCH_SHARE = 10


class _AssignmentExhausted(Exception):
    pass


@dataclasses.dataclass(frozen=True)
class PieceGrid:
    """
    A target block cut into cube pieces on a virtual grid of cubes. Full
    pieces span [0, N); the remainder piece of a chained dimension is the
    last one and starts at 0. Dimensions that fit in one cube (k = 1) may sit
    at any offset.
    """

    target: Shape
    cube_size: int

    @property
    def counts(self) -> tuple[int, int, int]:
        n = self.cube_size
        return tuple(-(-extent // n) for extent in self.target)

    @property
    def cell_count(self) -> int:
        a, b, c = self.counts
        return a * b * c

    def cells(self) -> list[GridCell]:
        return list(itertools.product(*(range(k) for k in self.counts)))

    def offsets(self) -> Iterator[tuple[int, int, int]]:
        n = self.cube_size
        return itertools.product(
            *(range(n - t + 1) if k == 1 else range(1) for t, k in zip(self.target, self.counts))
        )

    def block(self, cell: GridCell, offset) -> tuple[tuple[int, ...], tuple[int, ...]]:
        n = self.cube_size
        start, extents = [], []
        for d in range(3):
            t, k = self.target[d], self.counts[d]
            if k == 1:
                start.append(int(offset[d]))
                extents.append(t)
            elif cell[d] < k - 1:
                start.append(0)
                extents.append(n)
            else:
                start.append(0)
                extents.append(t - (k - 1) * n)
        return tuple(start), tuple(extents)

    def locate(self, targets: np.ndarray, offset, cube_of: dict[GridCell, int]) -> list[XpuId]:
        n = self.cube_size
        single = np.array(self.counts) == 1
        grid = np.where(single, 0, targets // n)
        local = np.where(single, targets + np.asarray(offset), targets % n)
        return [
            XpuId(cube_of[tuple(int(v) for v in g)], *(int(v) for v in xyz))
            for g, xyz in zip(grid, local)
        ]


class CubeScan:
    """Free-block lookups over every cube of one state, cached per block extents."""

    def __init__(self, state: ClusterState):
        self.state = state
        self.busy = state.busy_mask
        counts = state.cube_busy_counts()
        # Most-utilized cubes first keeps empty cubes whole.
        self.order = sorted(range(state.spec.cubes), key=lambda c: (-int(counts[c]), c))
        self._masks: dict[tuple[int, ...], np.ndarray] = {}

    def mask(self, extents: tuple[int, ...]) -> np.ndarray:
        if extents not in self._masks:
            self._masks[extents] = free_anchor_mask(self.busy, extents)
        return self._masks[extents]

    def free_cubes(self, start: tuple[int, ...], extents: tuple[int, ...]) -> list[int]:
        mask = self.mask(extents)
        if mask.size == 0:
            return []
        hits = mask[(slice(None), *start)]
        return [cube for cube in self.order if hits[cube]]

    def assign(self, grid: PieceGrid, budget: int) -> tuple[tuple[int, ...], dict[GridCell, int]] | None:
        if grid.cell_count > len(self.order):
            return None
        cells = grid.cells()

        if len(cells) == 1:
            mask = self.mask(grid.target.extents)
            if mask.size == 0:
                return None
            for cube in self.order:
                hits = np.argwhere(mask[cube])
                if len(hits):
                    return tuple(int(v) for v in hits[0]), {cells[0]: cube}
            return None

        try:
            for offset in grid.offsets():
                candidates = {}
                for cell in cells:
                    candidates[cell] = self.free_cubes(*grid.block(cell, offset))
                if not _hall_condition(grid, cells, offset, candidates):
                    continue
                cube_of = _backtrack(cells, candidates, budget)
                if cube_of is not None:
                    return offset, cube_of
        except _AssignmentExhausted:
            logger.debug(f"cube assignment for {grid.target} gave up after {budget} nodes")
        return None


def _hall_condition(grid: PieceGrid, cells, offset, candidates) -> bool:
    """Pieces of one block type share their candidates, so checking types suffices."""
    by_type: dict[tuple, list[GridCell]] = {}
    for cell in cells:
        by_type.setdefault(grid.block(cell, offset), []).append(cell)
    types = list(by_type.values())
    for size in range(1, len(types) + 1):
        for group in itertools.combinations(types, size):
            needed = sum(len(members) for members in group)
            available = set().union(*(candidates[members[0]] for members in group))
            if len(available) < needed:
                return False
    return True


def _backtrack(cells, candidates, budget: int) -> dict[GridCell, int] | None:
    order = sorted(cells, key=lambda cell: (len(candidates[cell]), cell))
    used: set[int] = set()
    cube_of: dict[GridCell, int] = {}
    visited = 0

    def extend(index: int) -> bool:
        nonlocal visited
        if index == len(order):
            return True
        cell = order[index]
        for cube in candidates[cell]:
            if cube in used:
                continue
            visited += 1
            if visited > budget:
                raise _AssignmentExhausted
            used.add(cube)
            cube_of[cell] = cube
            if extend(index + 1):
                return True
            used.discard(cube)
            del cube_of[cell]
        return False

    return dict(cube_of) if extend(0) else None


def _circuit_requests(variant: FoldVariant, n: int, by_target: dict) -> list[tuple[PortId, PortId]]:
    """Circuits for every hop that leaves a cube: piece boundaries and closable wraps."""
    target = variant.target
    hops = variant.hops
    requests = set()
    for src, dst, dim, wrap in zip(hops.src.tolist(), hops.dst.tolist(), hops.dim.tolist(), hops.wrap.tolist()):
        lo, hi = (tuple(src), tuple(dst)) if src[dim] < dst[dim] else (tuple(dst), tuple(src))
        if wrap:
            if target[dim] % n:
                continue
            out_t, in_t = hi, lo
        else:
            if (lo[dim] + 1) % n:
                continue
            out_t, in_t = lo, hi
        requests.add(
            (
                PortId(by_target[out_t], Direction.of(dim, True)),
                PortId(by_target[in_t], Direction.of(dim, False)),
            )
        )
    return sorted(requests)


def _realize(
    state: ClusterState,
    shape: Shape,
    variant: FoldVariant,
    grid: PieceGrid,
    offset,
    cube_of: dict[GridCell, int],
    mode: MappingMode,
) -> PlacementPlan | None:
    targets = variant.node_map.reshape(-1, 3)
    xpus = grid.locate(targets, offset, cube_of)
    by_target = dict(zip(map(tuple, targets.tolist()), xpus))
    xpu_of = dict(zip(np.ndindex(shape.extents), xpus))

    view = state.view()
    circuits = []
    try:
        for out_port, in_port in _circuit_requests(variant, grid.cube_size, by_target):
            if view.circuit_peer(out_port) == in_port.xpu:
                continue
            view.set_circuit(out_port, in_port)
            circuits.append((out_port, in_port))
    except (AlignmentError, BusyError) as e:
        logger.debug(f"{variant.label} {variant.target}: {e}")
        return None

    return plan_from_assignment(
        view,
        shape,
        xpu_of,
        mode,
        circuits=tuple(circuits),
        variant=variant.label,
        target=variant.target,
    )


def _best_plan(state: ClusterState, shape: Shape, variants, budget: int) -> PlacementPlan | None:
    """
    Variants are ranked on their analytic cost first; only the cheapest group
    with any feasible cube assignment is realized.
    """
    n = state.spec.cube_size
    context = FoldContext.of(state.spec)
    keyed = sorted(
        (
            (
                variant.mode_in(context) != MappingMode.RING_COMPLETE,
                context.cubes_needed(variant.target),
                variant.circuit_count(n),
            ),
            index,
            variant,
        )
        for index, variant in enumerate(variants)
    )

    scan = CubeScan(state)
    for _, group in itertools.groupby(keyed, key=lambda item: item[0]):
        plans = []
        for _, _, variant in group:
            grid = PieceGrid(variant.target, n)
            found = scan.assign(grid, budget)
            if found is None:
                continue
            mode = variant.mode_in(context)
            plan = _realize(state, shape, variant, grid, *found, mode)
            if plan is not None:
                plans.append(plan)
        if plans:
            return rank(plans)
    return None


def reconfig_place(state: ClusterState, shape: Shape, budget: int | None = None) -> PlacementPlan | None:
    """Cheapest rotation cut into cube pieces and chained with circuits."""
    budget = budget or get_settings().assignment_budget
    if state.free_count() < shape.size:
        return None
    context = FoldContext.of(state.spec)
    rotations = [
        variant
        for variant in enumerate_folds(shape, context)
        if variant.kind in (FoldKind.IDENTITY, FoldKind.ROTATION)
    ]
    plan = _best_plan(state, shape, rotations, budget)
    if plan is not None:
        logger.debug(f"reconfig placed {shape} as {plan.target}: {plan.cost}")
    return plan


def rfold_place(
    state: ClusterState,
    shape: Shape,
    budget: int | None = None,
    cycle_budget: int | None = None,
) -> PlacementPlan | None:
    """
    Cheapest plan over every fold variant; 1D jobs also try free cycles
    inside one cube and across a chain of cubes.
    """
    budget = budget or get_settings().assignment_budget
    if state.free_count() < shape.size:
        return None
    context = FoldContext.of(state.spec)
    best = _best_plan(state, shape, enumerate_folds(shape, context), budget)

    if shape.dims() == 1 and shape.size >= 3:
        extras = _cycle_plans(state, shape, best, cycle_budget or get_settings().cycle_search_budget)
        if extras:
            best = rank([best, *extras] if best else extras)

    if best is not None:
        logger.debug(f"rfold placed {shape} via {best.variant}: {best.cost}, {best.mode}")
    return best


def _cycle_plans(state: ClusterState, shape: Shape, best: PlacementPlan | None, budget: int) -> list[PlacementPlan]:
    length = shape.size
    bar = best.rank_key()[:3] if best is not None else None
    per_cube = int(np.prod(state.extents))
    free = per_cube - state.cube_busy_counts()
    order = CubeScan(state).order
    budget = max(1, budget // EXTRA_SEARCH_SHARE)

    plans = []
    roomy = [cube for cube in order if free[cube] >= length]
    if roomy and (bar is None or (False, 1, 0) < bar):
        share = max(1, budget // len(roomy))
        for cube in roomy:
            walk = find_cycle(FreeGraph(state, cubes=[cube]), length, share)
            if walk is None:
                continue
            plan = plan_from_walk(state, shape, walk, MappingMode.RING_COMPLETE)
            if plan is not None:
                plans.append(plan)
                break

    if not plans and (bar is None or (False, 2, 2) < bar):
        plan = _chain_cycle(state, shape, order, free, budget)
        if plan is not None:
            plans.append(plan)
    return plans


def _chain_cycle(state: ClusterState, shape: Shape, order, free, budget: int) -> PlacementPlan | None:
    """
    Chain the fewest cubes (most utilized first) holding enough free XPUs,
    wiring every aligned pair of free face XPUs, and look for a cycle in the
    grid the chained cubes form along CHAIN_DIM.
    Only circuits the cycle uses are emitted.
    """
    length = shape.size
    chain, total = [], 0
    for cube in order:
        if free[cube] == 0:
            continue
        chain.append(cube)
        total += int(free[cube])
        if total >= length:
            break
    if total < length or len(chain) < 2:
        return None

    n = state.spec.cube_size
    view = state.view()
    for a, b in zip(chain, chain[1:]):
        for pos in itertools.product(range(n), repeat=2):
            out_xpu = XpuId(a, *from_cross_position(CHAIN_DIM, pos, n - 1))
            in_xpu = XpuId(b, *from_cross_position(CHAIN_DIM, pos, 0))
            if state.is_free(out_xpu) and state.is_free(in_xpu):
                view.set_circuit(
                    PortId(out_xpu, Direction.of(CHAIN_DIM, True)),
                    PortId(in_xpu, Direction.of(CHAIN_DIM, False)),
                )

    walk = find_cycle(FreeGraph(view, cubes=chain, chain_dim=CHAIN_DIM), length, budget)
    if walk is None:
        return None
    plan = plan_from_walk(view, shape, walk, MappingMode.RING_COMPLETE, variant="chain-cycle")
    if plan is None:
        return None
    circuits = sorted(
        link.circuit_ports
        for link in plan.mapping.links
        if link.kind == LinkKind.CIRCUIT and not state.link_exists(link)
    )
    return dataclasses.replace(plan, circuits_to_set=tuple(circuits))
