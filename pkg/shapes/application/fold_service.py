import itertools
from functools import lru_cache

import numpy as np

from common.logger import logger
from shapes.domain.fold import FoldContext, FoldKind, FoldVariant
from workload.domain.job import Shape

Cell = tuple[int, int]


def rotations(shape: Shape) -> list[Shape]:
    seen: dict[Shape, None] = {}
    for perm in itertools.permutations(range(3)):
        seen.setdefault(Shape.of(shape[d] for d in perm))
    return list(seen)


def grid_cycle(p: int, q: int) -> list[Cell]:
    """Hamiltonian cycle of a p x q grid (p*q even, both >= 2): rows snake over
    columns 1..q-1 and column 0 carries the way back."""
    if p < 2 or q < 2 or (p * q) % 2:
        raise ValueError(f"a {p}x{q} grid has no Hamiltonian cycle")
    if p % 2:
        return [(i, j) for j, i in grid_cycle(q, p)]
    cycle = [(0, 0)]
    for i in range(p):
        cols = range(1, q) if i % 2 == 0 else range(q - 1, 0, -1)
        cycle.extend((i, j) for j in cols)
    cycle.extend((i, 0) for i in range(p - 1, 0, -1))
    return cycle


def spine_path(p: int, q: int) -> list[Cell]:
    """Hamiltonian path of a p x q grid (p odd) from (0, 0) to (0, q-1); a
    wrap hop along the second axis closes it into a ring."""
    if p % 2 == 0:
        raise ValueError("spine paths need an odd row count")
    path = [(i, 0) for i in range(p)]
    path.extend((p - 1, j) for j in range(1, q))
    for n, i in enumerate(range(p - 2, -1, -1)):
        cols = range(q - 1, 0, -1) if n % 2 == 0 else range(1, q)
        path.extend((i, j) for j in cols)
    return path


def snake(q: int, r: int) -> list[Cell]:
    """Boustrophedon walk of a q x r grid."""
    return [(j, k if j % 2 == 0 else r - 1 - k) for j in range(q) for k in range(r)]


def _divisor_pairs(size: int) -> list[Cell]:
    return [(p, size // p) for p in range(2, size // 2 + 1) if size % p == 0 and size // p >= 2]


def _identity(shape: Shape) -> FoldVariant:
    node_map = np.stack(np.indices(shape.extents), axis=-1)
    return FoldVariant.build(FoldKind.IDENTITY, shape, node_map, "identity")


def _fold_ring(shape: Shape, dim: int, cells: dict[int, tuple[int, ...]], path: list[tuple]) -> np.ndarray:
    """Node map sending coordinate t along dim to path[t], spread over the
    axes listed in cells (axis -> position within a path entry)."""
    node_map = np.stack(np.indices(shape.extents), axis=-1)
    t = node_map[..., dim]
    table = np.array(path)
    folded = node_map.copy()
    for axis, slot in cells.items():
        folded[..., axis] = table[t, slot]
    return folded


def _serpentines(shape: Shape) -> list[FoldVariant]:
    variants = []
    units = [d for d in range(3) if shape[d] == 1]
    for dim in range(3):
        if shape[dim] < 4:
            continue
        for unit in units:
            for p, q in _divisor_pairs(shape[dim]):
                cells = {dim: 0, unit: 1}
                label = f"serpentine d{dim}->{p}x{q}@d{unit}"
                if (p * q) % 2 == 0:
                    path = grid_cycle(p, q)
                    variants.append(
                        FoldVariant.build(FoldKind.SERPENTINE, shape, _fold_ring(shape, dim, cells, path), label)
                    )
                    continue
                # Odd blocks close through one wrap hop, along either axis.
                along_unit = spine_path(p, q)
                along_dim = [(i, j) for j, i in spine_path(q, p)]
                for suffix, path in (("wrap-u", along_unit), ("wrap-d", along_dim)):
                    variants.append(
                        FoldVariant.build(
                            FoldKind.SERPENTINE, shape, _fold_ring(shape, dim, cells, path), f"{label} {suffix}"
                        )
                    )
    return variants


def _boxes(shape: Shape) -> list[FoldVariant]:
    if shape.dims() != 1 or shape.size % 2:
        return []
    dim = next(d for d in range(3) if shape[d] > 1)
    u1, u2 = (d for d in range(3) if d != dim)
    variants = []
    for p, rest in _divisor_pairs(shape.size):
        for q, r in _divisor_pairs(rest):
            walk = snake(q, r)
            path = [(i, *walk[m]) for i, m in grid_cycle(p, q * r)]
            cells = {dim: 0, u1: 1, u2: 2}
            variants.append(
                FoldVariant.build(FoldKind.BOX, shape, _fold_ring(shape, dim, cells, path), f"box {p}x{q}x{r}")
            )
    return variants


def _reflections(shape: Shape) -> list[FoldVariant]:
    """
    (A, B, 2) -> (A, B/2, 4): the far half of each B ring is mirrored back.
    Layer 0 lands on the outer layers {0, 3} and closes through the wrap,
    layer 1 on the inner layers {1, 2}.
    """
    variants = []
    for b_dim, c_dim in itertools.permutations(range(3), 2):
        extent = shape[b_dim]
        if shape[c_dim] != 2 or extent < 4 or extent % 2:
            continue
        half = extent // 2
        node_map = np.stack(np.indices(shape.extents), axis=-1)
        y = node_map[..., b_dim]
        z = node_map[..., c_dim]
        far = y >= half
        folded = node_map.copy()
        folded[..., b_dim] = np.where(far, extent - 1 - y, y)
        folded[..., c_dim] = np.where(far, 3 - z, z)
        variants.append(
            FoldVariant.build(FoldKind.REFLECTION, shape, folded, f"reflection d{b_dim}/2 d{c_dim}x2")
        )
    return variants


@lru_cache(maxsize=2048)
def enumerate_folds(shape: Shape, context: FoldContext | None = None) -> tuple[FoldVariant, ...]:
    """
    Identity and rotations first, then serpentine, reflection and box folds
    with every target axis order. Variants equal in target and wrap needs are
    kept once. With a context, only variants that fit and whose interior wrap
    hops exist are returned.
    """
    base = [_identity(shape), *_serpentines(shape), *_reflections(shape), *_boxes(shape)]
    seen = set()
    variants = []
    for fold in base:
        for perm in itertools.permutations(range(3)):
            target = Shape.of(fold.target[d] for d in perm)
            if context is not None and not context.fits(target):
                continue
            variant = fold.permuted(perm)
            key = (variant.target, variant.closure_wrap_dims, variant.required_wrap_dims)
            if key in seen:
                continue
            if context is not None and variant.mode_in(context) is None:
                continue
            seen.add(key)
            variants.append(variant)
    logger.debug(f"{shape}: {len(variants)} fold variants")
    return tuple(variants)


def box_walk(extents: tuple[int, int, int], closed: bool) -> list[tuple[int, int, int]]:
    """
    Visit every cell of a box so consecutive cells are adjacent. With closed,
    the last cell is also adjacent to the first (needs an even volume and at
    least two axes of extent >= 2).
    """
    axes = sorted(range(3), key=lambda d: extents[d] < 2)
    p_axis, q_axis, r_axis = axes
    p, q, r = extents[p_axis], extents[q_axis], extents[r_axis]
    walk = snake(q, r)
    if closed:
        order = [(i, *walk[m]) for i, m in grid_cycle(p, q * r)]
    else:
        order = [(i, *walk[m if i % 2 == 0 else q * r - 1 - m]) for i in range(p) for m in range(q * r)]
    cells = []
    for i, j, k in order:
        cell = [0, 0, 0]
        cell[p_axis], cell[q_axis], cell[r_axis] = i, j, k
        cells.append(tuple(cell))
    return cells


def _pair_widths(half: int, width: int, pairs: int) -> list[int] | None:
    """Row-pair widths in [2, width] summing to half, using at most pairs pairs."""
    count = -(-half // width)
    if half < 2 or count > pairs:
        return None
    widths = [width] * (count - 1) + [half - width * (count - 1)]
    if widths[-1] < 2:
        if count == 1 or width < 3:
            return None
        widths[-2] -= 1
        widths[-1] += 1
    return widths


def partial_box_walk(extents: tuple[int, int, int], length: int, closed: bool) -> list[tuple[int, int, int]] | None:
    """
    Walk length cells of a box, consecutive cells adjacent; with closed the
    last cell is adjacent to the first. Closed walks snake two axes into rows
    and use the third as columns: row pairs cover columns 1..w-1 and column 0
    carries the way back. None when no such walk exists.
    """
    volume = extents[0] * extents[1] * extents[2]
    if length < 1 or length > volume:
        return None
    if not closed:
        return box_walk(extents, False)[:length]
    if length % 2 or length < 4:
        return None
    if length == volume:
        return box_walk(extents, True) if sum(e >= 2 for e in extents) >= 2 else None

    for col_axis in sorted(range(3), key=lambda d: (-extents[d], d)):
        u, v = (d for d in range(3) if d != col_axis)
        rows = snake(extents[u], extents[v])
        widths = _pair_widths(length // 2, extents[col_axis], len(rows) // 2)
        if widths is None:
            continue
        order = [(0, 0)]
        for pair, width in enumerate(widths):
            order.extend((2 * pair, j) for j in range(1, width))
            order.extend((2 * pair + 1, j) for j in range(width - 1, 0, -1))
        order.extend((i, 0) for i in range(2 * len(widths) - 1, 0, -1))

        cells = []
        for row, col in order:
            cell = [0, 0, 0]
            cell[u], cell[v] = rows[row]
            cell[col_axis] = col
            cells.append(tuple(cell))
        return cells
    return None
