"""Node features feeding the learned scorer.

Three families:

* ``structural`` - nine per-node descriptors (degree through betweenness),
  computed with networkx.
* ``flow`` - throughput of an exact source-target max flow with edge
  weights as capacities.
* ``ppr`` - one random-walk-with-restart vector per edge of the target
  path, zero-padded to 64 columns.

Family functions return raw values; :func:`assemble` concatenates and
z-scores per column (zero-variance columns stay all-zero).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .graph import PathQuery, ValidationError, WeightedGraph

PPR_PAD = 64
STRUCTURAL_COLUMNS = (
    "degree",
    "clustering",
    "katz",
    "pagerank",
    "eigenvector",
    "constraint",
    "avg_neighbor_clustering",
    "ego_edges",
    "betweenness",
)


class FeatureError(ValidationError):
    pass


@dataclass
class FeatureMatrix:
    """Per-node feature matrix with named columns and family extents."""

    values: np.ndarray                       # (node_count, cols)
    column_names: list[str]
    family_spans: dict[str, tuple[int, int]]

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise FeatureError("feature matrix contains NaN or infinity")
        if self.values.ndim != 2 or self.values.shape[1] != len(self.column_names):
            raise FeatureError("column names do not match matrix shape")


def _to_networkx(g: WeightedGraph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(g.node_count))
    for a, b, w, c in g.edge_tuples():
        G.add_edge(a, b, weight=w)
    return G


def structural_features(g: WeightedGraph, katz_alpha: float | None = None) -> FeatureMatrix:
    """Nine structural descriptors, columns in STRUCTURAL_COLUMNS order."""
    n = g.node_count
    vals = np.zeros((n, 9))
    if n > 0:
        G = _to_networkx(g)
        vals[:, 0] = [G.degree(i) for i in range(n)]
        clustering = nx.clustering(G)
        vals[:, 1] = [clustering[i] for i in range(n)]
        vals[:, 2] = _katz(G, katz_alpha)
        pr = nx.pagerank(G, alpha=0.85, tol=1e-12, max_iter=10_000) if g.edge_count else {i: 1.0 / n for i in range(n)}
        vals[:, 3] = [pr[i] for i in range(n)]
        vals[:, 4] = _eigenvector(G)
        constraint = nx.constraint(G)
        vals[:, 5] = [0.0 if np.isnan(constraint[i]) else constraint[i] for i in range(n)]
        for i in range(n):
            nbrs = list(G.neighbors(i))
            vals[i, 6] = float(np.mean([clustering[j] for j in nbrs])) if nbrs else 0.0
            vals[i, 7] = G.subgraph([i] + nbrs).number_of_edges()
        bc = nx.betweenness_centrality(G, normalized=False)
        vals[:, 8] = [bc[i] for i in range(n)]
    return FeatureMatrix(vals, list(STRUCTURAL_COLUMNS), {"structural": (0, 9)})


def _katz(G: nx.Graph, alpha: float | None) -> np.ndarray:
    n = G.number_of_nodes()
    if G.number_of_edges() == 0:
        return np.zeros(n)
    A = nx.to_numpy_array(G, nodelist=range(n), weight=None)
    lam = float(np.max(np.abs(np.linalg.eigvalsh(A))))
    safe = 0.9 / lam
    if alpha is None:
        alpha = safe
    elif lam > 0 and alpha >= 1.0 / lam:
        warnings.warn(
            f"katz alpha {alpha:.4g} >= 1/lambda_max {1.0 / lam:.4g}; reducing to {safe:.4g}",
            stacklevel=3,
        )
        alpha = safe
    x = np.linalg.solve(np.eye(n) - alpha * A, np.ones(n))
    norm = np.linalg.norm(x)
    return x / norm if norm > 0 else x


def _eigenvector(G: nx.Graph) -> np.ndarray:
    n = G.number_of_nodes()
    if G.number_of_edges() == 0:
        return np.zeros(n)
    A = nx.to_numpy_array(G, nodelist=range(n), weight=None)
    w, vecs = np.linalg.eigh(A)
    vec = vecs[:, int(np.argmax(w))]
    if vec.sum() < 0:
        vec = -vec
    return np.abs(vec)


def max_flow_feature(g: WeightedGraph, query: PathQuery) -> FeatureMatrix:
    """Node throughput of the exact s-t max flow (capacities = edge weights).

    Interior nodes get half the sum of absolute flow on incident edges;
    source and target get the full flow value.
    """
    if query.source == query.target:
        raise ValidationError("source and target must differ")
    n = g.node_count
    vals = np.zeros((n, 1))
    if g.edge_count:
        D = nx.DiGraph()
        D.add_nodes_from(range(n))
        for a, b, w, c in g.edge_tuples():
            D.add_edge(a, b, capacity=w)
            D.add_edge(b, a, capacity=w)
        value, flow = nx.maximum_flow(D, query.source, query.target)
        if value > 0:
            for a, b, w, c in g.edge_tuples():
                f = abs(flow[a].get(b, 0.0) - flow[b].get(a, 0.0))
                vals[a, 0] += 0.5 * f
                vals[b, 0] += 0.5 * f
            vals[query.source, 0] = value
            vals[query.target, 0] = value
    return FeatureMatrix(vals, ["flow"], {"flow": (0, 1)})


def personalized_pagerank(
    g: WeightedGraph,
    personalization: np.ndarray,
    restart: float = 0.15,
    tol: float = 1e-10,
    max_iter: int = 100000,
) -> np.ndarray:
    """Random walk with restart by power iteration to L1 residual < tol.

    Walk probabilities are proportional to edge weight; mass at dangling
    nodes restarts.  The result is a stochastic vector.
    """
    n = g.node_count
    e = personalization / personalization.sum()
    if g.edge_count == 0:
        return e.copy()
    wdeg = np.zeros(n)
    np.add.at(wdeg, g.u, g.weight)
    np.add.at(wdeg, g.v, g.weight)
    dangling = wdeg == 0
    inv = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, wdeg))
    x = e.copy()
    for _ in range(max_iter):
        px = np.zeros(n)
        contrib = x * inv
        np.add.at(px, g.v, contrib[g.u] * g.weight)
        np.add.at(px, g.u, contrib[g.v] * g.weight)
        nxt = (1.0 - restart) * (px + x[dangling].sum() * e) + restart * e
        if np.abs(nxt - x).sum() < tol:
            return nxt
        x = nxt
    return x


def ppr_along_pstar(
    g: WeightedGraph, query: PathQuery, restart: float = 0.15, pad: int = PPR_PAD
) -> FeatureMatrix:
    """One PPR column per target-path edge, personalization split over the
    edge's endpoints; zero-padded to `pad` columns."""
    edges = list(zip(query.target_path.nodes, query.target_path.nodes[1:]))
    if len(edges) > pad:
        raise FeatureError(
            f"target path has {len(edges)} edges, exceeding the pad width {pad}"
        )
    n = g.node_count
    vals = np.zeros((n, pad))
    for j, (a, b) in enumerate(edges):
        pers = np.zeros(n)
        pers[a] += 0.5
        pers[b] += 0.5
        vals[:, j] = personalized_pagerank(g, pers, restart=restart)
    names = [f"ppr_{j}" for j in range(pad)]
    return FeatureMatrix(vals, names, {"ppr": (0, pad)})


def zscore(values: np.ndarray) -> np.ndarray:
    """Per-column z-score; zero-variance columns become all-zero."""
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    out = values - mean
    nonconst = std > 0
    out[:, nonconst] /= std[nonconst]
    out[:, ~nonconst] = 0.0
    return out


FAMILY_ORDER = ("structural", "flow", "ppr")


def assemble(
    g: WeightedGraph,
    query: PathQuery,
    families: set[str] | frozenset[str] = frozenset(FAMILY_ORDER),
    restart: float = 0.15,
    katz_alpha: float | None = None,
    normalize: bool = True,
) -> FeatureMatrix:
    """Concatenate the requested families (structural, flow, ppr order)."""
    unknown = set(families) - set(FAMILY_ORDER)
    if unknown:
        raise FeatureError(f"unknown feature families: {sorted(unknown)}")
    if not families:
        raise FeatureError("at least one feature family required")
    blocks, names, spans = [], [], {}
    col = 0
    for fam in FAMILY_ORDER:
        if fam not in families:
            continue
        if fam == "structural":
            fm = structural_features(g, katz_alpha=katz_alpha)
        elif fam == "flow":
            fm = max_flow_feature(g, query)
        else:
            fm = ppr_along_pstar(g, query, restart=restart)
        blocks.append(fm.values)
        names.extend(fm.column_names)
        spans[fam] = (col, col + fm.values.shape[1])
        col += fm.values.shape[1]
    values = np.hstack(blocks)
    if normalize:
        values = zscore(values)
    return FeatureMatrix(values, names, spans)


def save_csv(fm: FeatureMatrix, path) -> None:
    header = ",".join(fm.column_names)
    np.savetxt(path, fm.values, delimiter=",", header=header, comments="")


def load_csv(path) -> FeatureMatrix:
    with open(path) as fh:
        names = fh.readline().strip().split(",")
    values = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return FeatureMatrix(values, names, {})
