import numpy as np


def occupancy_table(busy: np.ndarray) -> np.ndarray:
    """Busy counts summed over the last three axes, zero-padded in front."""
    lx, ly, lz = busy.shape[-3:]
    table = np.zeros((*busy.shape[:-3], lx + 1, ly + 1, lz + 1), dtype=np.int32)
    table[..., 1:, 1:, 1:] = busy.cumsum(-3).cumsum(-2).cumsum(-1)
    return table


def free_anchor_mask(
    busy: np.ndarray,
    extents: tuple[int, int, int],
    table: np.ndarray | None = None,
) -> np.ndarray:
    """
    Windowed free-block search over the last three axes of busy.

    Returns a bool array with one entry per non-wrapping anchor (leading axes
    kept), True where the block of the given extents starting there is free.
    The anchor axes are empty when the block does not fit. Pass the
    occupancy_table of busy to reuse it across many extents.
    """
    a, b, c = extents
    lx, ly, lz = busy.shape[-3:]
    lead = busy.shape[:-3]
    if a > lx or b > ly or c > lz:
        return np.zeros((*lead, 0, 0, 0), dtype=bool)

    if table is None:
        table = occupancy_table(busy)

    window = (
        table[..., a:, b:, c:]
        - table[..., :-a, b:, c:]
        - table[..., a:, :-b, c:]
        - table[..., a:, b:, :-c]
        + table[..., :-a, :-b, c:]
        + table[..., :-a, b:, :-c]
        + table[..., a:, :-b, :-c]
        - table[..., :-a, :-b, :-c]
    )
    return window == 0


def free_anchors(busy: np.ndarray, extents: tuple[int, int, int]) -> list[tuple[int, ...]]:
    """Free anchors in lexicographic order (leading axes first)."""
    return [tuple(int(v) for v in row) for row in np.argwhere(free_anchor_mask(busy, extents))]


def first_free_anchor(busy: np.ndarray, extents: tuple[int, int, int]) -> tuple[int, ...] | None:
    hits = np.argwhere(free_anchor_mask(busy, extents))
    if len(hits) == 0:
        return None
    return tuple(int(v) for v in hits[0])
