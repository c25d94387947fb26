import copy
from collections.abc import Iterable, Iterator

import numpy as np

from common.errors import (
    AlignmentError,
    BusyError,
    ContractViolation,
    ExclusivityError,
    UnknownResourceError,
    UnsupportedOperationError,
)
from topology.domain.fabric import (
    Circuit,
    ClusterSpec,
    Dim,
    Direction,
    LinkId,
    LinkKind,
    OcsId,
    PortId,
    XpuId,
    cross_position,
    from_cross_position,
)


class ClusterState:
    """
    The mutable fabric: XPU and link ownership plus the OCS circuit table.

    Circuits are kept as two arrays indexed [dim, i, j, cube]: out_to_in holds
    the cube whose dim- port the cube's dim+ port at cross-position (i, j) is
    wired to, in_to_out the reverse. -1 marks an unconnected port.
    """

    def __init__(self, spec: ClusterSpec):
        self.spec = spec
        self.extents = spec.extents
        self._busy = np.zeros((spec.cubes, *self.extents), dtype=bool)
        self.xpu_owner: dict[XpuId, str] = {}
        self.link_owner: dict[LinkId, str] = {}
        self._job_xpus: dict[str, frozenset[XpuId]] = {}
        self._job_links: dict[str, frozenset[LinkId]] = {}
        self._read_only = False

        if spec.static_mode:
            self._out_to_in = None
            self._in_to_out = None
        else:
            n = spec.cube_size
            shape = (3, n, n, spec.cubes)
            self._out_to_in = np.full(shape, -1, dtype=np.int32)
            self._in_to_out = np.full(shape, -1, dtype=np.int32)

    # ------------------------------------------------------------------ queries

    @property
    def busy_mask(self) -> np.ndarray:
        mask = self._busy.view()
        mask.flags.writeable = False
        return mask

    @property
    def is_view(self) -> bool:
        return self._read_only

    def has_xpu(self, xpu: XpuId) -> bool:
        if not 0 <= xpu.cube < self.spec.cubes:
            return False
        return all(0 <= c < e for c, e in zip(xpu.coord, self.extents))

    def _check_xpu(self, xpu: XpuId):
        if not self.has_xpu(xpu):
            raise UnknownResourceError(f"no XPU {xpu} in {self.spec.label}")

    def is_free(self, xpu: XpuId) -> bool:
        return not self._busy[xpu]

    def free_count(self) -> int:
        return self._busy.size - int(self._busy.sum())

    def busy_count(self) -> int:
        return int(self._busy.sum())

    def busy_fraction(self) -> float:
        return self.busy_count() / self._busy.size

    def cube_busy_counts(self) -> np.ndarray:
        return self._busy.reshape(self.spec.cubes, -1).sum(axis=1)

    def all_xpus(self) -> Iterator[XpuId]:
        lx, ly, lz = self.extents
        for cube in range(self.spec.cubes):
            for x in range(lx):
                for y in range(ly):
                    for z in range(lz):
                        yield XpuId(cube, x, y, z)

    def jobs(self) -> list[str]:
        return sorted(self._job_xpus)

    def allocation(self, job_id: str) -> tuple[frozenset[XpuId], frozenset[LinkId]]:
        if job_id not in self._job_xpus:
            raise UnknownResourceError(f"job {job_id} holds no allocation")
        return self._job_xpus[job_id], self._job_links[job_id]

    def neighbors(self, xpu: XpuId) -> list[tuple[LinkId, XpuId]]:
        self._check_xpu(xpu)
        return self._neighbors(xpu)

    def _neighbors(self, xpu: XpuId) -> list[tuple[LinkId, XpuId]]:
        result = []
        coord = xpu.coord
        static = self.spec.static_mode
        for dim in (0, 1, 2):
            extent = self.extents[dim]
            value = coord[dim]

            if value + 1 < extent:
                nb = xpu.moved(dim, value + 1)
                result.append((LinkId(LinkKind.INTRA, xpu, nb, dim), nb))
            elif static:
                if extent > 1:
                    nb = xpu.moved(dim, 0)
                    result.append((LinkId(LinkKind.WRAP, xpu, nb, dim), nb))
            else:
                i, j = cross_position(dim, coord)
                peer = int(self._out_to_in[dim, i, j, xpu.cube])
                if peer >= 0:
                    nb = xpu.moved(dim, 0, cube=peer)
                    if nb != xpu:
                        result.append((LinkId(LinkKind.CIRCUIT, xpu, nb, dim), nb))

            if value > 0:
                nb = xpu.moved(dim, value - 1)
                result.append((LinkId(LinkKind.INTRA, nb, xpu, dim), nb))
            elif static:
                if extent > 1:
                    nb = xpu.moved(dim, extent - 1)
                    result.append((LinkId(LinkKind.WRAP, nb, xpu, dim), nb))
            else:
                i, j = cross_position(dim, coord)
                peer = int(self._in_to_out[dim, i, j, xpu.cube])
                if peer >= 0:
                    nb = xpu.moved(dim, extent - 1, cube=peer)
                    if nb != xpu:
                        result.append((LinkId(LinkKind.CIRCUIT, nb, xpu, dim), nb))
        return result

    def link_between(self, a: XpuId, b: XpuId) -> list[LinkId]:
        return [link for link, nb in self._neighbors(a) if nb == b]

    def link_exists(self, link: LinkId) -> bool:
        src, dst, dim = link.src, link.dst, link.dim
        if not (self.has_xpu(src) and self.has_xpu(dst)):
            return False
        if cross_position(dim, src.coord) != cross_position(dim, dst.coord):
            return False
        extent = self.extents[dim]
        if link.kind == LinkKind.INTRA:
            return src.cube == dst.cube and dst.coord[dim] == src.coord[dim] + 1
        if link.kind == LinkKind.WRAP:
            return (
                self.spec.static_mode
                and extent > 1
                and src.coord[dim] == extent - 1
                and dst.coord[dim] == 0
            )
        if self.spec.static_mode or src == dst:
            return False
        if src.coord[dim] != extent - 1 or dst.coord[dim] != 0:
            return False
        i, j = cross_position(dim, src.coord)
        return int(self._out_to_in[dim, i, j, src.cube]) == dst.cube

    def circuits(self) -> list[Circuit]:
        if self.spec.static_mode:
            return []
        result = []
        n = self.spec.cube_size
        for dim, i, j, cube in zip(*np.nonzero(self._out_to_in >= 0)):
            dim, i, j, cube = int(dim), int(i), int(j), int(cube)
            peer = int(self._out_to_in[dim, i, j, cube])
            out_xpu = XpuId(cube, *from_cross_position(dim, (i, j), n - 1))
            in_xpu = XpuId(peer, *from_cross_position(dim, (i, j), 0))
            result.append(_circuit(dim, out_xpu, in_xpu))
        return result

    def circuit_peer(self, port: PortId) -> XpuId | None:
        """The XPU on the other end of the circuit currently holding port."""
        if self.spec.static_mode:
            return None
        dim = port.direction.dim
        i, j = cross_position(dim, port.xpu.coord)
        table = self._out_to_in if port.direction.is_plus else self._in_to_out
        peer = int(table[dim, i, j, port.xpu.cube])
        if peer < 0:
            return None
        value = 0 if port.direction.is_plus else self.extents[dim] - 1
        return port.xpu.moved(dim, value, cube=peer)

    # ---------------------------------------------------------------- mutations

    def view(self) -> "ClusterState":
        """
        Planning snapshot. Ownership is shared and must not change through it;
        the circuit table is private, so set_circuit reprograms only the copy.
        """
        snapshot = copy.copy(self)
        if self._out_to_in is not None:
            snapshot._out_to_in = self._out_to_in.copy()
            snapshot._in_to_out = self._in_to_out.copy()
        snapshot._read_only = True
        return snapshot

    def port_is_settable(self, port: PortId) -> bool:
        peer = self.circuit_peer(port)
        if peer is None:
            return True
        if port.direction.is_plus:
            link = LinkId(LinkKind.CIRCUIT, port.xpu, peer, port.direction.dim)
        else:
            link = LinkId(LinkKind.CIRCUIT, peer, port.xpu, port.direction.dim)
        return link not in self.link_owner

    def set_circuit(self, out_port: PortId, in_port: PortId) -> Circuit:
        if self.spec.static_mode:
            raise UnsupportedOperationError("a static torus has no OCS circuits")
        self._check_xpu(out_port.xpu)
        self._check_xpu(in_port.xpu)

        dim = out_port.direction.dim
        if in_port.direction.dim != dim:
            raise AlignmentError(
                f"{out_port.direction} and {in_port.direction} belong to different OCS groups"
            )
        if not out_port.direction.is_plus or in_port.direction.is_plus:
            raise AlignmentError("a circuit joins a dim+ port to a dim- port")

        n = self.spec.cube_size
        if out_port.xpu.coord[dim] != n - 1 or in_port.xpu.coord[dim] != 0:
            raise AlignmentError("circuits connect face ports only")

        pos = cross_position(dim, out_port.xpu.coord)
        if cross_position(dim, in_port.xpu.coord) != pos:
            raise AlignmentError(
                f"misaligned ports {out_port.xpu} and {in_port.xpu} sit on different OCSes"
            )

        if not self.port_is_settable(out_port) or not self.port_is_settable(in_port):
            raise BusyError(f"a port of {out_port.xpu} / {in_port.xpu} carries an owned link")

        i, j = pos
        out_cube, in_cube = out_port.xpu.cube, in_port.xpu.cube
        old_in = int(self._out_to_in[dim, i, j, out_cube])
        if old_in >= 0:
            self._in_to_out[dim, i, j, old_in] = -1
        old_out = int(self._in_to_out[dim, i, j, in_cube])
        if old_out >= 0:
            self._out_to_in[dim, i, j, old_out] = -1

        self._out_to_in[dim, i, j, out_cube] = in_cube
        self._in_to_out[dim, i, j, in_cube] = out_cube
        return Circuit(OcsId(Dim(dim), i, j), out_port, in_port)

    def allocate(self, job_id: str, xpus: Iterable[XpuId], links: Iterable[LinkId]):
        if self._read_only:
            raise UnsupportedOperationError("cannot allocate through a planning view")
        if job_id in self._job_xpus:
            raise ExclusivityError(f"job {job_id} already holds an allocation")

        xpus = frozenset(xpus)
        links = frozenset(links)
        for xpu in xpus:
            self._check_xpu(xpu)
            if self._busy[xpu]:
                raise ExclusivityError(f"{xpu} is owned by {self.xpu_owner.get(xpu)}")
        for link in links:
            if link in self.link_owner:
                raise ExclusivityError(f"link {link} is owned by {self.link_owner[link]}")
            if link.src not in xpus or link.dst not in xpus:
                raise ContractViolation(f"link {link} leaves the allocation of {job_id}")
            if not self.link_exists(link):
                raise ContractViolation(f"link {link} is not present in the fabric")

        for xpu in xpus:
            self._busy[xpu] = True
            self.xpu_owner[xpu] = job_id
        for link in links:
            self.link_owner[link] = job_id
        self._job_xpus[job_id] = xpus
        self._job_links[job_id] = links

    def release(self, job_id: str):
        if self._read_only:
            raise UnsupportedOperationError("cannot release through a planning view")
        if job_id not in self._job_xpus:
            raise UnknownResourceError(f"job {job_id} holds no allocation")

        for xpu in self._job_xpus.pop(job_id):
            self._busy[xpu] = False
            del self.xpu_owner[xpu]
        for link in self._job_links.pop(job_id):
            del self.link_owner[link]

    # --------------------------------------------------------------- invariants

    def check_invariants(self):
        if self._out_to_in is not None:
            for dim, i, j, cube in zip(*np.nonzero(self._out_to_in >= 0)):
                peer = self._out_to_in[dim, i, j, cube]
                if self._in_to_out[dim, i, j, peer] != cube:
                    raise ContractViolation(f"circuit table is not a matching at OCS {dim},{i},{j}")
            for dim, i, j, cube in zip(*np.nonzero(self._in_to_out >= 0)):
                peer = self._in_to_out[dim, i, j, cube]
                if self._out_to_in[dim, i, j, peer] != cube:
                    raise ContractViolation(f"circuit table is not a matching at OCS {dim},{i},{j}")

        busy = self.busy_count()
        if busy != len(self.xpu_owner) or busy + self.free_count() != self.spec.total_xpus:
            raise ContractViolation(
                f"conservation broken: {busy} busy, {len(self.xpu_owner)} owned"
            )

        for link, job_id in self.link_owner.items():
            if (
                self.xpu_owner.get(link.src) != job_id
                or self.xpu_owner.get(link.dst) != job_id
            ):
                raise ContractViolation(f"link {link} of {job_id} touches a foreign XPU")
            if not self.link_exists(link):
                raise ContractViolation(f"owned link {link} of {job_id} is no longer wired")


def _circuit(dim: int, out_xpu: XpuId, in_xpu: XpuId) -> Circuit:
    i, j = cross_position(dim, out_xpu.coord)
    return Circuit(
        OcsId(Dim(dim), i, j),
        PortId(out_xpu, Direction.of(dim, True)),
        PortId(in_xpu, Direction.of(dim, False)),
    )


def build_cluster(spec: ClusterSpec) -> ClusterState:
    spec.validate()
    state = ClusterState(spec)
    if not spec.static_mode:
        cubes = np.arange(spec.cubes, dtype=np.int32)
        state._out_to_in[...] = cubes
        state._in_to_out[...] = cubes
    return state
