import math
from collections.abc import Callable

import numpy as np

from workload.domain.job import Shape


def _divisors(n: int, low: int = 2) -> list[int]:
    return [d for d in range(low, n + 1) if n % d == 0]


def factorize(size: int, dims: int) -> list[Shape]:
    """
    All shapes of the given size whose first `dims` extents are >= 2,
    in lexicographic order. A 1D request always yields (size, 1, 1).
    """
    if size < 1:
        raise ValueError(f"size must be positive, got {size}")
    if dims == 1:
        return [Shape(size, 1, 1)]
    if dims == 2:
        return [Shape(a, size // a, 1) for a in _divisors(size) if size // a >= 2]
    if dims == 3:
        shapes = []
        for a in _divisors(size):
            rest = size // a
            for b in _divisors(rest):
                if rest // b >= 2:
                    shapes.append(Shape(a, b, rest // b))
        return shapes
    raise ValueError(f"dims must be 1, 2 or 3, got {dims}")


def cube_footprint(shape: Shape, cube_size: int) -> int:
    return math.prod(math.ceil(extent / cube_size) for extent in shape)


def shape_filter(
    extent_cap: int | None = None,
    footprint_limit: tuple[int, int] | None = None,
) -> Callable[[Shape], bool]:
    def accepts(shape: Shape) -> bool:
        if extent_cap is not None and max(shape.extents) > extent_cap:
            return False
        if footprint_limit is not None:
            cube_size, cube_count = footprint_limit
            if cube_footprint(shape, cube_size) > cube_count:
                return False
        return True

    return accepts


def sample_shape(
    size: int,
    dims: int,
    rng: np.random.Generator,
    accepts: Callable[[Shape], bool] | None = None,
) -> Shape:
    """
    Uniform draw over factorize(size, dims) after filtering, falling back to
    lower dimensionality when nothing is left. If even the 1D shape is
    filtered out it is returned anyway; callers decide what to do with it.
    """
    for d in range(dims, 0, -1):
        options = factorize(size, d)
        if accepts is not None:
            options = [shape for shape in options if accepts(shape)]
        if options:
            return options[int(rng.integers(len(options)))]
    return Shape(size, 1, 1)


def sample_size(rng: np.random.Generator, scale: float, max_size: int) -> int:
    # Inverse CDF of the exponential truncated to [1, max_size], rounded half-up.
    mass = -math.expm1(-(max_size - 1) / scale)
    u = float(rng.random())
    x = 1.0 - scale * math.log1p(-u * mass)
    return min(max(math.floor(x + 0.5), 1), max_size)


def truncated_mean(scale: float, max_size: int) -> float:
    span = max_size - 1
    tail = math.exp(-span / scale)
    return 1.0 + scale - span * tail / (1.0 - tail)
