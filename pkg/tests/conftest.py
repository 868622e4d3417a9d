"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately avoid the library's own algorithms: distances
come from Bellman-Ford, path lists from exhaustive DFS enumeration, covers
and cuts from subset enumeration.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from pathcut.graph import EMPTY_MASK, EdgeMask, Path, PathQuery, WeightedGraph
from pathcut.paths import dijkstra, shortest_path


def random_graph(rng, n, edge_prob, unit_weights=False, unit_costs=True):
    """Random simple graph; continuous weights avoid length ties by default."""
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < edge_prob:
                w = 1.0 if unit_weights else float(rng.uniform(0.5, 1.5))
                c = 1.0 if unit_costs else float(rng.uniform(0.5, 2.0))
                edges.append((a, b, w, c))
    return WeightedGraph(n, edges)


def bellman_ford(g: WeightedGraph, mask: EdgeMask, source: int) -> np.ndarray:
    dist = np.full(g.node_count, np.inf)
    dist[source] = 0.0
    for _ in range(g.node_count):
        changed = False
        for e in range(g.edge_count):
            if e in mask:
                continue
            a, b, w = int(g.u[e]), int(g.v[e]), float(g.weight[e])
            if dist[a] + w < dist[b]:
                dist[b] = dist[a] + w
                changed = True
            if dist[b] + w < dist[a]:
                dist[a] = dist[b] + w
                changed = True
        if not changed:
            break
    return dist


def path_sum_ltr(g: WeightedGraph, nodes) -> float:
    # left-to-right summation, matching the library's Yen comparisons
    total = 0.0
    for a, b in zip(nodes, nodes[1:]):
        total += float(g.weight[g.edge_index(a, b)])
    return total


def enumerate_simple_paths(g: WeightedGraph, mask: EdgeMask, s: int, t: int):
    """All simple s-t paths sorted by (length, lexicographic node order)."""
    out = []

    def dfs(u, visited, nodes):
        if u == t:
            out.append(tuple(nodes))
            return
        for v, e in g.neighbors(u, mask):
            if v not in visited:
                visited.add(v)
                nodes.append(v)
                dfs(v, visited, nodes)
                nodes.pop()
                visited.remove(v)

    dfs(s, {s}, [s])
    return sorted(out, key=lambda nodes: (path_sum_ltr(g, nodes), nodes))


def brute_force_min_cut(g: WeightedGraph, s: int, t: int) -> float:
    """Min s-t cut capacity by enumerating node bipartitions."""
    others = [v for v in range(g.node_count) if v not in (s, t)]
    best = np.inf
    for bits in itertools.product([0, 1], repeat=len(others)):
        side = {s}
        side.update(v for v, bit in zip(others, bits) if bit)
        cap = sum(
            float(g.weight[e])
            for e in range(g.edge_count)
            if (int(g.u[e]) in side) != (int(g.v[e]) in side)
        )
        best = min(best, cap)
    return best


def brute_force_set_cover(constraints, costs) -> float:
    """Exact minimum cover cost by subset enumeration over the support."""
    support = sorted(set().union(*constraints)) if constraints else []
    best = np.inf
    for r in range(len(support) + 1):
        for combo in itertools.combinations(support, r):
            chosen = set(combo)
            if all(con & chosen for con in constraints):
                best = min(best, sum(costs[e] for e in combo))
        if best < np.inf and all(costs[e] == 1.0 for e in support):
            break  # unit costs: first feasible size is optimal
    return float(best)


def is_target_shortest(g: WeightedGraph, deleted, query: PathQuery) -> bool:
    sp = shortest_path(g, EdgeMask.of(deleted), query)
    return sp is not None and sp.nodes == query.target_path.nodes


def brute_force_force_path_cut(g: WeightedGraph, query: PathQuery) -> float:
    """Minimum removal cost making the target path the deterministic
    shortest path, by enumerating subsets of non-target-path edges."""
    pstar_edges = set(query.target_path.edge_indices(g))
    candidates = [e for e in range(g.edge_count) if e not in pstar_edges]
    best = np.inf
    for r in range(len(candidates) + 1):
        for combo in itertools.combinations(candidates, r):
            cost = sum(float(g.cost[e]) for e in combo)
            if cost >= best:
                continue
            if is_target_shortest(g, combo, query):
                best = min(best, cost)
        if best < np.inf and all(g.cost[e] == 1.0 for e in candidates):
            break  # unit costs: first feasible size is optimal
    return float(best)


def small_instance(rng, n=9, edge_prob=0.4, k_rank=3, unit_weights=False):
    """Random connected-enough instance with the k-th shortest path as target."""
    from pathcut.paths import k_shortest_paths

    for _ in range(200):
        g = random_graph(rng, n, edge_prob, unit_weights=unit_weights)
        if g.edge_count == 0 or g.edge_count > 14:
            continue
        s, t = rng.choice(n, size=2, replace=False)
        paths = k_shortest_paths(g, EMPTY_MASK, int(s), int(t), k_rank)
        if len(paths) >= k_rank:
            return g, PathQuery(int(s), int(t), paths[k_rank - 1])
    raise RuntimeError("could not sample a small instance")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
