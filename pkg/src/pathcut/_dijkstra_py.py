"""Pure-Python Dijkstra kernel; drop-in fallback for the compiled version.

Operates on the CSR arrays of a WeightedGraph plus a per-edge deleted flag.
The parent assignment is a separate deterministic pass so the result does
not depend on heap pop order: parent(v) is the minimum (u, edge_index) over
all non-deleted tight edges, i.e. dist[u] + w == dist[v] exactly.
"""

from __future__ import annotations

import heapq

import numpy as np


def dijkstra_csr(
    n: int,
    indptr: np.ndarray,
    nbr: np.ndarray,
    eidx: np.ndarray,
    weight: np.ndarray,
    deleted: np.ndarray,
    source: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Single-source distances; returns (dist, parent_node, parent_edge)."""
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    done = np.zeros(n, dtype=bool)
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for k in range(indptr[u], indptr[u + 1]):
            e = eidx[k]
            if deleted[e]:
                continue
            v = nbr[k]
            nd = d + weight[e]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    parent_node = np.full(n, -1, dtype=np.int64)
    parent_edge = np.full(n, -1, dtype=np.int64)
    for u in range(n):
        du = dist[u]
        if not np.isfinite(du):
            continue
        for k in range(indptr[u], indptr[u + 1]):
            e = eidx[k]
            if deleted[e]:
                continue
            v = nbr[k]
            if v == source:
                continue
            if du + weight[e] == dist[v] and parent_node[v] == -1:
                # u ascends, so the first tight predecessor is the minimum
                parent_node[v] = u
                parent_edge[v] = e
    return dist, parent_node, parent_edge
