"""Seeded synthetic graph families and instance sampling.

Families and parameter ranges follow the benchmark setup: square-ish
lattices, Erdos-Renyi (p in [0.01, 0.017]), Barabasi-Albert (m in [5, 9]),
Watts-Strogatz (k in [11, 15], rewiring probability 0.02).  All edges get
unit weight and unit cost.  The same seed always reproduces the same graph
and instance bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

from .graph import EdgeMask, Path, PathQuery, ValidationError, WeightedGraph
from .paths import k_shortest_paths

FAMILIES = ("lattice", "er", "ba", "ws")

ER_P_RANGE = (0.01, 0.017)
BA_M_RANGE = (5, 9)
WS_K_RANGE = (11, 15)
WS_REWIRE_P = 0.02


class SamplingError(Exception):
    pass


@dataclass
class GeneratorParams:
    family: str
    n: int = 1000
    p: float = 0.014          # er: edge probability
    m: int = 7                # ba: attachment count
    k: int = 12               # ws: ring neighbors
    p_r: float = WS_REWIRE_P  # ws: rewiring probability
    rows: int = 30            # lattice
    cols: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}")
        if self.family == "lattice":
            if self.rows < 1 or self.cols < 1:
                raise ValidationError("lattice needs rows, cols >= 1")
        elif self.n < 2:
            raise ValidationError("n must be >= 2")
        if self.family == "er" and not ER_P_RANGE[0] <= self.p <= ER_P_RANGE[1]:
            raise ValidationError(f"er p must lie in {ER_P_RANGE}")
        if self.family == "ba":
            if not BA_M_RANGE[0] <= self.m <= BA_M_RANGE[1]:
                raise ValidationError(f"ba m must lie in {BA_M_RANGE}")
            if self.m >= self.n:
                raise ValidationError("ba needs m < n")
        if self.family == "ws":
            if not WS_K_RANGE[0] <= self.k <= WS_K_RANGE[1]:
                raise ValidationError(f"ws k must lie in {WS_K_RANGE}")
            if self.k >= self.n:
                raise ValidationError("ws needs k < n")
            if self.p_r != WS_REWIRE_P:
                raise ValidationError(f"ws rewiring probability is fixed at {WS_REWIRE_P}")

    @property
    def node_count(self) -> int:
        return self.rows * self.cols if self.family == "lattice" else self.n


def generate(params: GeneratorParams) -> WeightedGraph:
    """Standard construction for the requested family; unit weights/costs."""
    if params.family == "lattice":
        G = nx.grid_2d_graph(params.rows, params.cols)
        G = nx.convert_node_labels_to_integers(G, ordering="sorted")
    elif params.family == "er":
        G = nx.gnp_random_graph(params.n, params.p, seed=params.seed)
    elif params.family == "ba":
        G = nx.barabasi_albert_graph(params.n, params.m, seed=params.seed)
    else:
        # even ring degree: networkx rounds k down to the nearest even value
        G = nx.watts_strogatz_graph(params.n, params.k, params.p_r, seed=params.seed)
    edges = sorted((min(a, b), max(a, b)) for a, b in G.edges())
    return WeightedGraph(params.node_count, [(a, b, 1.0, 1.0) for a, b in edges])


def _largest_component(g: WeightedGraph) -> list[int]:
    seen = np.zeros(g.node_count, dtype=bool)
    best: list[int] = []
    for start in range(g.node_count):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        stack = [start]
        while stack:
            u = stack.pop()
            for v, _ in g.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        if len(comp) > len(best):
            best = comp
    return sorted(best)


def sample_instance(
    g: WeightedGraph, k_star: int, seed: int, max_tries: int = 100
) -> PathQuery:
    """Random source/target in the largest component; the target path is the
    k_star-th shortest simple path between them (deterministic tie order)."""
    if k_star < 1:
        raise ValidationError("k_star must be >= 1")
    component = _largest_component(g)
    if len(component) < 2:
        raise SamplingError("graph has no component with two nodes")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        s, t = (int(component[i]) for i in rng.choice(len(component), size=2, replace=False))
        paths = k_shortest_paths(g, EdgeMask(), s, t, k_star)
        if len(paths) >= k_star:
            return PathQuery(s, t, paths[k_star - 1])
    raise SamplingError(
        f"no node pair with {k_star} simple paths found in {max_tries} tries"
    )
