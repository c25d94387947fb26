from collections import Counter

from shapes.domain.comm_graph import CommGraph, Coord
from shapes.domain.mapping import MappingMode, PlacementMapping, Violation, ViolationKind
from topology.domain.cluster_state import ClusterState
from topology.domain.fabric import LinkId, LinkKind, XpuId


def _prefer_intra(link: LinkId) -> bool:
    return link.kind != LinkKind.INTRA


def realize_rings(
    comm: CommGraph,
    xpu_of: dict[Coord, XpuId],
    state: ClusterState,
    mode: MappingMode | None = None,
) -> PlacementMapping | None:
    """
    Pick a physical link for every ring hop: the first link between the two
    XPUs not yet taken by this job or anyone else, hardwired links first. A missing closing hop opens
    the ring; any other missing hop, or an open ring when mode demands
    ring_complete, means no mapping.
    """
    used: set[LinkId] = set()
    rings = []
    closed = True
    for ring in comm.rings:
        links = []
        for k, (a, b) in enumerate(ring.hops()):
            link = next(
                (
                    link
                    for link in sorted(state.link_between(xpu_of[a], xpu_of[b]), key=_prefer_intra)
                    if link not in used and link not in state.link_owner
                ),
                None,
            )
            if link is None:
                if ring.length >= 3 and k == ring.length - 1:
                    closed = False
                    continue
                return None
            used.add(link)
            links.append(link)
        rings.append(tuple(links))

    if mode == MappingMode.RING_COMPLETE and not closed:
        return None
    return PlacementMapping(
        mode=MappingMode.RING_COMPLETE if closed else MappingMode.LINE_COMPLETE,
        xpu_of=dict(xpu_of),
        rings=tuple(rings),
    )


def verify_mapping(mapping: PlacementMapping, comm: CommGraph, state: ClusterState) -> list[Violation]:
    violations = []

    missing = [node for node in comm.nodes if node not in mapping.xpu_of]
    if missing:
        violations.append(Violation(ViolationKind.COVERAGE, f"{len(missing)} nodes unmapped, first {missing[0]}"))

    counts = Counter(mapping.xpu_of.values())
    for xpu, count in counts.items():
        if count > 1:
            violations.append(Violation(ViolationKind.INJECTIVITY, f"{xpu} hosts {count} nodes"))

    for xpu in counts:
        if not state.has_xpu(xpu):
            violations.append(Violation(ViolationKind.BUSY_XPU, f"{xpu} does not exist"))
        elif not state.is_free(xpu):
            violations.append(Violation(ViolationKind.BUSY_XPU, f"{xpu} is owned by {state.xpu_owner.get(xpu)}"))

    if len(mapping.rings) != len(comm.rings):
        violations.append(
            Violation(ViolationKind.ADJACENCY, f"{len(mapping.rings)} realized rings for {len(comm.rings)} rings")
        )

    open_rings = []
    for ring, links in zip(comm.rings, mapping.rings):
        expected = ring.hops()
        for (a, b), link in zip(expected, links):
            ends = {mapping.xpu_of.get(a), mapping.xpu_of.get(b)}
            if {link.src, link.dst} != ends or not state.link_exists(link):
                violations.append(Violation(ViolationKind.ADJACENCY, f"ring {ring.nodes[0]} d{ring.dim}: {a}-{b} has no link {link}"))
        if len(links) < len(expected) - (1 if ring.length >= 3 else 0):
            violations.append(
                Violation(ViolationKind.ADJACENCY, f"ring {ring.nodes[0]} d{ring.dim}: only {len(links)} links")
            )
        elif mapping.mode == MappingMode.RING_COMPLETE and len(links) < len(expected):
            open_rings.append(Violation(ViolationKind.CLOSURE, f"ring {ring.nodes[0]} d{ring.dim} is open"))
    violations.extend(open_rings)

    link_counts = Counter(link for links in mapping.rings for link in links)
    for link, count in link_counts.items():
        if count > 1:
            violations.append(Violation(ViolationKind.EDGE_REUSE, f"{link} carries {count} rings"))
    for link in link_counts:
        if link in state.link_owner:
            violations.append(Violation(ViolationKind.OWNED_LINK, f"{link} is owned by {state.link_owner[link]}"))

    return violations
