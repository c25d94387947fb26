from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

from common.compat import StrEnum

from common.errors import ConfigurationError


class Dim(IntEnum):
    X = 0
    Y = 1
    Z = 2


class Direction(StrEnum):
    X_PLUS = "X+"
    X_MINUS = "X-"
    Y_PLUS = "Y+"
    Y_MINUS = "Y-"
    Z_PLUS = "Z+"
    Z_MINUS = "Z-"

    @property
    def dim(self) -> Dim:
        return Dim("XYZ".index(self.value[0]))

    @property
    def is_plus(self) -> bool:
        return self.value[1] == "+"

    @classmethod
    def of(cls, dim: int, plus: bool) -> "Direction":
        return cls(f"{'XYZ'[dim]}{'+' if plus else '-'}")


class LinkKind(StrEnum):
    INTRA = "intra"
    CIRCUIT = "circuit"
    # Hardwired wrap-around of a static torus.
    WRAP = "wrap"


class XpuId(NamedTuple):
    cube: int
    x: int
    y: int
    z: int

    @property
    def coord(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.z)

    def moved(self, dim: int, value: int, cube: int | None = None) -> "XpuId":
        coord = list(self.coord)
        coord[dim] = value
        return XpuId(self.cube if cube is None else cube, *coord)

    def __str__(self):
        return f"c{self.cube}:({self.x},{self.y},{self.z})"


class PortId(NamedTuple):
    xpu: XpuId
    direction: Direction


class OcsId(NamedTuple):
    dim: Dim
    i: int
    j: int


class Circuit(NamedTuple):
    ocs: OcsId
    out_port: PortId
    in_port: PortId


class LinkId(NamedTuple):
    """
    A physical link. src is always the endpoint whose "+" port carries the
    link along dim, so a link has exactly one identity whichever end asks.
    """

    kind: LinkKind
    src: XpuId
    dst: XpuId
    dim: int

    @property
    def circuit_ports(self) -> tuple[PortId, PortId] | None:
        if self.kind != LinkKind.CIRCUIT:
            return None
        return (
            PortId(self.src, Direction.of(self.dim, True)),
            PortId(self.dst, Direction.of(self.dim, False)),
        )

    def other(self, xpu: XpuId) -> XpuId:
        return self.dst if xpu == self.src else self.src


def cross_position(dim: int, coord: tuple[int, int, int]) -> tuple[int, int]:
    """Coordinates of the two dimensions other than dim, in X, Y, Z order."""
    if dim == 0:
        return (coord[1], coord[2])
    if dim == 1:
        return (coord[0], coord[2])
    return (coord[0], coord[1])


def from_cross_position(dim: int, pos: tuple[int, int], value: int) -> tuple[int, int, int]:
    i, j = pos
    if dim == 0:
        return (value, i, j)
    if dim == 1:
        return (i, value, j)
    return (i, j, value)


@dataclass(frozen=True)
class ClusterSpec:
    cube_count: int = 64
    cube_size: int = 4
    static_mode: bool = False
    static_extents: tuple[int, int, int] | None = None
    # Cubes of edge 1 have no interior links and are refused unless asked for.
    allow_unit_cube: bool = False

    @classmethod
    def reconfigurable(cls, cube_count: int, cube_size: int, **kwargs) -> "ClusterSpec":
        return cls(cube_count=cube_count, cube_size=cube_size, **kwargs)

    @classmethod
    def static(cls, lx: int, ly: int, lz: int) -> "ClusterSpec":
        return cls(cube_count=1, cube_size=0, static_mode=True, static_extents=(lx, ly, lz))

    def validate(self) -> "ClusterSpec":
        if self.static_mode:
            if self.static_extents is None or len(self.static_extents) != 3:
                raise ConfigurationError("static fabric needs three extents")
            if any(extent < 1 for extent in self.static_extents):
                raise ConfigurationError(
                    f"static extents must be positive, got {self.static_extents}"
                )
            return self
        if self.cube_count < 1:
            raise ConfigurationError(f"cube_count must be positive, got {self.cube_count}")
        if self.cube_size < 1:
            raise ConfigurationError(f"cube_size must be positive, got {self.cube_size}")
        if self.cube_size < 2 and not self.allow_unit_cube:
            raise ConfigurationError("cube_size 1 requires allow_unit_cube")
        return self

    @property
    def extents(self) -> tuple[int, int, int]:
        """Extents of one cube, or of the whole torus in static mode."""
        if self.static_mode:
            return self.static_extents
        n = self.cube_size
        return (n, n, n)

    @property
    def cubes(self) -> int:
        return 1 if self.static_mode else self.cube_count

    @property
    def total_xpus(self) -> int:
        lx, ly, lz = self.extents
        return self.cubes * lx * ly * lz

    @property
    def ocs_count(self) -> int:
        return 0 if self.static_mode else 3 * self.cube_size**2

    @property
    def bipartite(self) -> bool:
        # Every cycle of an all-even torus (or of cubes with even edge) is even.
        if self.static_mode:
            return all(extent % 2 == 0 or extent == 1 for extent in self.static_extents)
        return self.cube_size % 2 == 0

    @property
    def label(self) -> str:
        if self.static_mode:
            lx, ly, lz = self.static_extents
            return f"static-{lx}x{ly}x{lz}"
        return f"{self.cube_count}x{self.cube_size}^3"
