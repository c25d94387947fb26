import itertools
from collections import Counter, deque

import networkx as nx

from common.errors import OracleRefusedError
from common.logger import logger
from config import get_settings
from shapes.domain.comm_graph import CommGraph, Coord, comm_graph
from shapes.domain.mapping import MappingMode
from workload.domain.job import Shape


def torus_graph(extents: tuple[int, int, int], wrap_flags: tuple[bool, bool, bool]) -> nx.MultiGraph:
    """Grid of the given extents; a flagged dimension gets its wrap link (a
    parallel link when the extent is 2)."""
    graph = nx.MultiGraph()
    graph.add_nodes_from(itertools.product(*(range(e) for e in extents)))
    for node in list(graph.nodes):
        for dim, extent in enumerate(extents):
            if node[dim] + 1 < extent:
                nb = list(node)
                nb[dim] += 1
                graph.add_edge(node, tuple(nb))
            elif wrap_flags[dim] and extent >= 2:
                nb = list(node)
                nb[dim] = 0
                graph.add_edge(node, tuple(nb))
    return graph


def _search_order(comm: CommGraph, hops: dict[Coord, list[Coord]]) -> tuple[list[Coord], dict[Coord, Coord | None]]:
    """Breadth-first over the hops that must be links, so every node but a
    root is placed next to an already placed neighbor."""
    order, parent = [], {}
    for root in comm.nodes:
        if root in parent:
            continue
        parent[root] = None
        queue = deque([root])
        while queue:
            node = queue.popleft()
            order.append(node)
            for nb in sorted(set(hops[node])):
                if nb not in parent:
                    parent[nb] = node
                    queue.append(nb)
    return order, parent


def brute_force_embeddable(
    shape: Shape,
    target_extents: tuple[int, int, int],
    wrap_flags: tuple[bool, bool, bool],
    mode: MappingMode,
    max_nodes: int | None = None,
) -> bool:
    """
    Exhaustive search for an injective placement of the job's comm graph in a
    free torus of target_extents whose rings map to edge-disjoint links.
    In line_complete mode the closing hop of each ring may be missing.
    """
    max_nodes = max_nodes or get_settings().oracle_max_nodes
    if shape.size > max_nodes:
        raise OracleRefusedError(f"{shape} has {shape.size} nodes, the oracle handles at most {max_nodes}")

    graph = torus_graph(target_extents, wrap_flags)
    if shape.size > graph.number_of_nodes():
        return False

    comm = comm_graph(shape)
    hops: dict[Coord, list[Coord]] = {node: [] for node in comm.nodes}
    for ring in comm.rings:
        for k, (a, b) in enumerate(ring.hops()):
            if mode == MappingMode.LINE_COMPLETE and ring.length >= 3 and k == ring.length - 1:
                continue
            hops[a].append(b)
            hops[b].append(a)

    order, parent = _search_order(comm, hops)
    image: dict[Coord, tuple] = {}
    taken: set[tuple] = set()
    usage: Counter = Counter()
    targets = sorted(graph.nodes)
    nodes_tried = 0

    def fits(node: Coord, cand: tuple) -> list[frozenset] | None:
        pairs = []
        for other in hops[node]:
            if other not in image:
                continue
            pair = frozenset((cand, image[other]))
            if usage[pair] + pairs.count(pair) >= graph.number_of_edges(cand, image[other]):
                return None
            pairs.append(pair)
        return pairs

    def place(index: int) -> bool:
        nonlocal nodes_tried
        if index == len(order):
            return True
        node = order[index]
        above = parent[node]
        candidates = sorted(graph.neighbors(image[above])) if above is not None else targets
        for cand in candidates:
            if cand in taken:
                continue
            pairs = fits(node, cand)
            if pairs is None:
                continue
            nodes_tried += 1
            image[node] = cand
            taken.add(cand)
            usage.update(pairs)
            if place(index + 1):
                return True
            usage.subtract(pairs)
            taken.discard(cand)
            del image[node]
        return False

    found = place(0)
    logger.debug(f"oracle {shape} -> {target_extents} wrap={wrap_flags} {mode}: {found} after {nodes_tried} nodes")
    return found
