"""Weighted undirected graph, problem instances, and file I/O.

Every other module works on these types.  A graph is immutable after
construction; deletions are expressed through an :class:`EdgeMask` rather
than by mutating the graph.  Edge `weight` contributes to path length,
edge `cost` is the price of removing the edge.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path as FilePath
from typing import Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)

_LENGTH_TOL = 1e-9


class GraphError(Exception):
    """Base class for graph construction/validation failures."""


class ParseError(GraphError):
    """Malformed edge-list or instance file."""


class ValidationError(GraphError):
    """Data violates a structural invariant (bad ids, non-positive weights...)."""


@dataclass(frozen=True)
class EdgeMask:
    """Set of deleted edge indices, carried across solver iterations.

    Must never contain an edge of the target path; call sites enforce this.
    """

    deleted: frozenset = frozenset()

    @staticmethod
    def of(indices: Iterable[int] | None) -> "EdgeMask":
        if indices is None:
            return EdgeMask()
        return EdgeMask(frozenset(indices))

    def union(self, indices: Iterable[int]) -> "EdgeMask":
        return EdgeMask(self.deleted | frozenset(indices))

    def __contains__(self, edge_index: int) -> bool:
        return edge_index in self.deleted

    def __len__(self) -> int:
        return len(self.deleted)


EMPTY_MASK = EdgeMask()


class WeightedGraph:
    """Undirected simple graph with positive per-edge weight and cost.

    Node ids are dense integers in ``[0, node_count)``.  At most one edge per
    unordered pair, no self-loops.  `external_ids` optionally maps dense ids
    back to the labels found in the source file.
    """

    def __init__(
        self,
        node_count: int,
        edges: Sequence[tuple[int, int, float, float]],
        external_ids: list | None = None,
    ):
        if node_count < 0:
            raise ValidationError("node_count must be non-negative")
        arr = np.asarray(edges, dtype=np.float64).reshape(-1, 4)
        m = len(arr)
        u = arr[:, 0].astype(np.int64)
        v = arr[:, 1].astype(np.int64)
        w = arr[:, 2].copy()
        c = arr[:, 3].copy()
        bad = (u < 0) | (u >= node_count) | (v < 0) | (v >= node_count)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise ValidationError(
                f"edge ({u[i]},{v[i]}) has node id outside [0,{node_count})"
            )
        loops = u == v
        if loops.any():
            raise ValidationError(f"self-loop at node {u[np.flatnonzero(loops)[0]]}")
        key = np.minimum(u, v) * max(node_count, 1) + np.maximum(u, v)
        if len(np.unique(key)) != m:
            order = np.argsort(key, kind="stable")
            i = int(order[np.flatnonzero(np.diff(key[order]) == 0)[0] + 1])
            pair = (min(u[i], v[i]), max(u[i], v[i]))
            raise ValidationError(f"duplicate edge {pair}")
        bad = ~(w > 0) | ~(c > 0)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            pair = (min(u[i], v[i]), max(u[i], v[i]))
            raise ValidationError(f"edge {pair}: weight and cost must be positive")
        self.node_count = int(node_count)
        self.u = u
        self.v = v
        self.weight = w
        self.cost = c
        self.external_ids = external_ids
        self._edge_lookup = {k: i for i, k in enumerate(zip((np.minimum(u, v)).tolist(), (np.maximum(u, v)).tolist()))}
        self._build_csr()

    def _build_csr(self) -> None:
        n, m = self.node_count, len(self.u)
        src = np.concatenate([self.u, self.v])
        dst = np.concatenate([self.v, self.u])
        eidx = np.concatenate([np.arange(m), np.arange(m)])
        # one global sort by (owner, neighbor id, edge index) gives every
        # adjacency run in deterministic order
        order = np.lexsort((eidx, dst, src))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        self.indptr = indptr
        self.nbr = dst[order]
        self.eidx = eidx[order]

    @property
    def edge_count(self) -> int:
        return len(self.u)

    def edge_index(self, a: int, b: int) -> int | None:
        """Edge index of unordered pair (a, b), or None if absent."""
        return self._edge_lookup.get((a, b) if a < b else (b, a))

    def neighbors(self, node: int, mask: EdgeMask = EMPTY_MASK):
        """Yield (neighbor, edge_index) for non-deleted incident edges."""
        lo, hi = self.indptr[node], self.indptr[node + 1]
        for k in range(lo, hi):
            e = int(self.eidx[k])
            if e not in mask:
                yield int(self.nbr[k]), e

    def edge_tuples(self) -> list[tuple[int, int, float, float]]:
        return [
            (int(a), int(b), float(w), float(c))
            for a, b, w, c in zip(self.u, self.v, self.weight, self.cost)
        ]

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.node_count}, m={self.edge_count})"


@dataclass(frozen=True)
class Path:
    """Simple path as an ordered node sequence plus its weight-sum length."""

    nodes: tuple[int, ...]
    length: float

    @staticmethod
    def from_nodes(g: WeightedGraph, nodes: Sequence[int]) -> "Path":
        nodes = tuple(int(x) for x in nodes)
        if len(set(nodes)) != len(nodes):
            raise ValidationError("path repeats a node")
        total = 0.0
        for a, b in zip(nodes, nodes[1:]):
            if not (0 <= a < g.node_count and 0 <= b < g.node_count):
                raise ValidationError(f"unknown node id on path: ({a},{b})")
            e = g.edge_index(a, b)
            if e is None:
                raise ValidationError(f"({a},{b}) is not an edge")
            total += float(g.weight[e])
        return Path(nodes, total)

    def edge_indices(self, g: WeightedGraph) -> list[int]:
        out = []
        for a, b in zip(self.nodes, self.nodes[1:]):
            e = g.edge_index(a, b)
            if e is None:
                raise ValidationError(f"({a},{b}) is not an edge")
            out.append(e)
        return out


@dataclass(frozen=True)
class PathQuery:
    """A Force Path Cut instance: make `target_path` the shortest s-t path."""

    source: int
    target: int
    target_path: Path

    def __post_init__(self):
        if self.source == self.target:
            raise ValidationError("source and target must differ")
        p = self.target_path.nodes
        if not p or p[0] != self.source or p[-1] != self.target:
            raise ValidationError("target_path must run from source to target")


def path_length(g: WeightedGraph, p: Path) -> float:
    """Recompute the weight sum along `p` (validates every hop)."""
    return Path.from_nodes(g, p.nodes).length


def is_path_valid(g: WeightedGraph, mask: EdgeMask, p: Path) -> bool:
    """True iff every consecutive pair of `p` is a non-deleted edge of `g`."""
    for a, b in zip(p.nodes, p.nodes[1:]):
        if not (0 <= a < g.node_count and 0 <= b < g.node_count):
            raise ValidationError(f"unknown node id {max(a, b)}")
        e = g.edge_index(a, b)
        if e is None or e in mask:
            return False
    return True


@dataclass
class SubgraphMap:
    """Bidirectional id remap between a graph and an induced subgraph."""

    full_to_sub: dict[int, int]
    sub_to_full: np.ndarray        # node ids, indexed by sub id
    sub_edge_to_full: np.ndarray   # edge indices, indexed by sub edge id
    full_edge_to_sub: dict[int, int] = field(default_factory=dict)


def induced_subgraph(
    g: WeightedGraph, keep: Iterable[int], mask: EdgeMask = EMPTY_MASK
) -> tuple[WeightedGraph, SubgraphMap]:
    """Subgraph on `keep` nodes, excluding masked edges.

    Sub node ids follow ascending full-graph id order, so keeping every node
    with an empty mask yields an identity remap.
    """
    keep_arr = np.unique(np.fromiter((int(x) for x in keep), dtype=np.int64))
    if len(keep_arr) and (keep_arr[0] < 0 or keep_arr[-1] >= g.node_count):
        bad = keep_arr[0] if keep_arr[0] < 0 else keep_arr[-1]
        raise ValidationError(f"keep set contains unknown node {bad}")
    in_keep = np.zeros(g.node_count, dtype=bool)
    in_keep[keep_arr] = True
    live = np.ones(g.edge_count, dtype=bool)
    if mask.deleted:
        live[np.fromiter(mask.deleted, count=len(mask.deleted), dtype=np.int64)] = False
    sel = live & in_keep[g.u] & in_keep[g.v] if g.edge_count else live
    edge_map = np.flatnonzero(sel)
    new_id = np.full(g.node_count, -1, dtype=np.int64)
    new_id[keep_arr] = np.arange(len(keep_arr))
    edges = np.column_stack(
        [new_id[g.u[sel]], new_id[g.v[sel]], g.weight[sel], g.cost[sel]]
    )
    sub = WeightedGraph(len(keep_arr), edges)
    remap = SubgraphMap(
        full_to_sub={int(x): i for i, x in enumerate(keep_arr)},
        sub_to_full=keep_arr,
        sub_edge_to_full=edge_map,
        full_edge_to_sub={int(f): s for s, f in enumerate(edge_map)},
    )
    return sub, remap


def load_edge_list(path: str | FilePath) -> WeightedGraph:
    """Read a TSV edge list: `u <TAB> v [<TAB> weight [<TAB> cost]]`.

    Lines starting with `#` are ignored.  Duplicate unordered pairs collapse
    to the minimum-weight record; self-loops are dropped with a log entry.
    Non-dense ids (including non-integer labels) are remapped to dense ints
    with the original labels kept in `external_ids`.
    """
    path = FilePath(path)
    records: dict[tuple, tuple[float, float]] = {}
    raw_ids: set = set()
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2 or len(parts) > 4:
                raise ParseError(f"{path}:{lineno}: expected 2-4 fields, got {len(parts)}")
            a_raw, b_raw = parts[0], parts[1]
            try:
                w = float(parts[2]) if len(parts) > 2 else 1.0
                c = float(parts[3]) if len(parts) > 3 else 1.0
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad number: {exc}") from None
            if not w > 0 or not c > 0:
                raise ValidationError(f"{path}:{lineno}: weight and cost must be positive")
            if a_raw == b_raw:
                log.info("%s:%d: dropping self-loop at %s", path, lineno, a_raw)
                continue
            raw_ids.update((a_raw, b_raw))
            key = (a_raw, b_raw) if a_raw <= b_raw else (b_raw, a_raw)
            prev = records.get(key)
            if prev is None or w < prev[0]:
                records[key] = (w, c)
    if not raw_ids:
        return WeightedGraph(0, [])
    try:
        as_int = {s: int(s) for s in raw_ids}
        ints = sorted(set(as_int.values()))
        if ints[0] < 0 or len(ints) < len(raw_ids):
            as_int = None  # negative or colliding labels ("1" vs "01"): remap
    except ValueError:
        as_int = None
    if as_int is not None:
        # integer labels: dense ids are used directly (node_count = max + 1,
        # allowing isolated intermediate ids), sparse ones are remapped
        max_id, n_unique = max(ints), len(ints)
        if max_id + 1 <= 2 * n_unique:
            id_of = as_int
            node_count = max_id + 1
            external = None
        else:
            ordered = sorted(raw_ids, key=lambda s: as_int[s])
            id_of = {s: i for i, s in enumerate(ordered)}
            node_count = len(ordered)
            external = [as_int[s] for s in ordered]
    else:
        ordered = sorted(raw_ids)
        id_of = {s: i for i, s in enumerate(ordered)}
        node_count = len(ordered)
        external = list(ordered)
    pairs = sorted(
        (min(id_of[a], id_of[b]), max(id_of[a], id_of[b]), w, c)
        for (a, b), (w, c) in records.items()
    )
    edges = [(a, b, w, c) for a, b, w, c in pairs]
    return WeightedGraph(node_count, edges, external_ids=external)


def save_edge_list(g: WeightedGraph, path: str | FilePath) -> None:
    """Write the TSV format read by :func:`load_edge_list`."""
    with open(path, "w") as fh:
        fh.write("# u\tv\tweight\tcost\n")
        for a, b, w, c in g.edge_tuples():
            if g.external_ids is not None:
                a, b = g.external_ids[a], g.external_ids[b]
            fh.write(f"{a}\t{b}\t{w!r}\t{c!r}\n")


def load_instance(path: str | FilePath) -> tuple[WeightedGraph, PathQuery]:
    """Read an instance JSON: {graph, source, target, p_star}.

    The graph path is resolved relative to the instance file's directory.
    """
    path = FilePath(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    for key in ("graph", "source", "target", "p_star"):
        if key not in obj:
            raise ParseError(f"{path}: missing key '{key}'")
    graph_path = FilePath(obj["graph"])
    if not graph_path.is_absolute():
        graph_path = path.parent / graph_path
    g = load_edge_list(graph_path)
    p_star = Path.from_nodes(g, obj["p_star"])
    query = PathQuery(int(obj["source"]), int(obj["target"]), p_star)
    return g, query


def save_instance(
    g: WeightedGraph, query: PathQuery, graph_path: str | FilePath, path: str | FilePath
) -> None:
    obj = {
        "graph": str(graph_path),
        "source": query.source,
        "target": query.target,
        "p_star": list(query.target_path.nodes),
    }
    FilePath(path).write_text(json.dumps(obj, indent=2) + "\n")
