"""Shortest-path primitives: masked Dijkstra and Yen's k shortest simple paths.

The Dijkstra inner loop dominates the solver's runtime, so it lives in a
compiled extension (`pathcut._speedups`) with a pure-Python fallback chosen
at import time; both produce bit-identical output.

Tie-breaking is fixed everywhere so runs are reproducible:

* `dijkstra` parents: smaller predecessor node id, then smaller edge index.
* `k_shortest_paths`: paths ordered by (length, lexicographic node sequence).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .graph import EMPTY_MASK, EdgeMask, Path, PathQuery, ValidationError, WeightedGraph

try:
    from ._speedups import dijkstra_csr as _dijkstra_csr

    HAVE_SPEEDUPS = True
except ImportError:  # pragma: no cover - exercised only without the extension
    from ._dijkstra_py import dijkstra_csr as _dijkstra_csr

    HAVE_SPEEDUPS = False


@dataclass
class ShortestPathTree:
    """Single-source result: per-node distance and deterministic parent edge."""

    source: int
    dist: np.ndarray
    parent_node: np.ndarray
    parent_edge: np.ndarray

    def path_to(self, target: int, g: WeightedGraph) -> Path | None:
        """Reconstruct the tree path to `target`, or None if unreachable."""
        if not np.isfinite(self.dist[target]):
            return None
        nodes = [int(target)]
        while nodes[-1] != self.source:
            nodes.append(int(self.parent_node[nodes[-1]]))
        nodes.reverse()
        return Path(tuple(nodes), float(self.dist[target]))


def _deleted_flags(g: WeightedGraph, mask: EdgeMask) -> np.ndarray:
    flags = np.zeros(g.edge_count, dtype=np.uint8)
    for e in mask.deleted:
        flags[e] = 1
    return flags


def dijkstra(g: WeightedGraph, mask: EdgeMask, source: int) -> ShortestPathTree:
    """Exact single-source distances ignoring deleted edges."""
    if not 0 <= source < g.node_count:
        raise ValidationError(f"unknown source node {source}")
    dist, pn, pe = _dijkstra_csr(
        g.node_count, g.indptr, g.nbr, g.eidx, g.weight, _deleted_flags(g, mask), source
    )
    return ShortestPathTree(source=source, dist=dist, parent_node=pn, parent_edge=pe)


def shortest_path(g: WeightedGraph, mask: EdgeMask, query: PathQuery) -> Path | None:
    """The deterministic-tie-break shortest source-target path, if any."""
    return dijkstra(g, mask, query.source).path_to(query.target, g)


def _path_sum(g: WeightedGraph, nodes: tuple[int, ...]) -> float:
    # left-to-right summation; used for all Yen length comparisons so that
    # identical node sequences always compare equal
    total = 0.0
    for a, b in zip(nodes, nodes[1:]):
        total += float(g.weight[g.edge_index(a, b)])
    return total


def _lex_shortest(
    g: WeightedGraph, deleted: np.ndarray, source: int, target: int
) -> tuple[int, ...] | None:
    """Lexicographically smallest shortest path under the deleted-edge flags.

    Distances are computed from the target; the path is then grown from the
    source taking the smallest neighbor that stays on a shortest path.
    """
    dist_t, _, _ = _dijkstra_csr(
        g.node_count, g.indptr, g.nbr, g.eidx, g.weight, deleted, target
    )
    if not np.isfinite(dist_t[source]):
        return None
    nodes = [source]
    u = source
    while u != target:
        lo, hi = g.indptr[u], g.indptr[u + 1]
        nxt = -1
        for k in range(lo, hi):
            e = int(g.eidx[k])
            if deleted[e]:
                continue
            v = int(g.nbr[k])
            if dist_t[u] == g.weight[e] + dist_t[v]:
                nxt = v
                break  # adjacency is sorted by neighbor id: first hit is min
        assert nxt >= 0, "tight edge must exist on a shortest path"
        nodes.append(nxt)
        u = nxt
    return tuple(nodes)


def k_shortest_paths(
    g: WeightedGraph, mask: EdgeMask, source: int, target: int, k: int
) -> list[Path]:
    """Yen's k shortest loopless paths, ties in lexicographic node order.

    Returns fewer than `k` paths iff fewer simple paths exist.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    if not (0 <= source < g.node_count and 0 <= target < g.node_count):
        raise ValidationError("unknown source/target node")
    base = _deleted_flags(g, mask)
    first = _lex_shortest(g, base, source, target)
    if first is None:
        return []
    accepted: list[tuple[int, ...]] = [first]
    seen: set[tuple[int, ...]] = {first}
    candidates: list[tuple[float, tuple[int, ...]]] = []
    while len(accepted) < k:
        prev = accepted[-1]
        for i in range(len(prev) - 1):
            spur = prev[i]
            root = prev[: i + 1]
            flags = base.copy()
            for p in accepted:
                if len(p) > i and p[: i + 1] == root:
                    flags[g.edge_index(p[i], p[i + 1])] = 1
            for node in root[:-1]:
                for kk in range(g.indptr[node], g.indptr[node + 1]):
                    flags[g.eidx[kk]] = 1
            spur_path = _lex_shortest(g, flags, spur, target)
            if spur_path is None:
                continue
            total = root[:-1] + spur_path
            if total not in seen:
                seen.add(total)
                heapq.heappush(candidates, (_path_sum(g, total), total))
        if not candidates:
            break
        _, nxt = heapq.heappop(candidates)
        accepted.append(nxt)
    return [Path(nodes, _path_sum(g, nodes)) for nodes in accepted]
