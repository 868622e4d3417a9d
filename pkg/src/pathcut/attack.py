"""Force Path Cut solvers.

The constraint-generation loop repeatedly asks the deterministic Dijkstra
for the current shortest path; every competitor found becomes a covering
constraint (its edges off the target path), and a weighted set cover over
all constraints so far picks the next cut.  The loop ends when the
deterministic shortest path *is* the target path.  Covers come from either
a greedy H(|P|)-approximation or an LP relaxation with randomized rounding.

A greedy min-cost baseline (delete the cheapest off-target edge of the
current shortest path, repeat) is included for benchmark comparison.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .graph import EMPTY_MASK, EdgeMask, Path, PathQuery, ValidationError, WeightedGraph, is_path_valid
from .paths import dijkstra, k_shortest_paths, shortest_path
from .simplex import LPInfeasibleError, solve_lp

ROUNDING_TRIALS = 100
MAX_ITERATIONS = 100_000


class InfeasibleError(Exception):
    """No edge set can make the target path shortest (or budget exceeded)."""


@dataclass
class ConstraintSystem:
    """Covering system over removable edges.

    One variable per non-target-path edge (with its removal cost); one
    constraint per competing path, holding that path's edges off the target
    path.  A cover must intersect every constraint.
    """

    costs: np.ndarray                 # full-graph edge costs
    forbidden: frozenset              # target-path edges (never variables)
    constraints: list[frozenset] = field(default_factory=list)
    budget: float | None = None
    _arrays: list = field(default_factory=list, repr=False)

    def constraint_arrays(self) -> list[np.ndarray]:
        """Constraints as int arrays, cached across repeated cover solves."""
        while len(self._arrays) < len(self.constraints):
            con = self.constraints[len(self._arrays)]
            self._arrays.append(np.fromiter(con, count=len(con), dtype=np.int64))
        del self._arrays[len(self.constraints):]
        return self._arrays

    def add_path_constraint(self, g: WeightedGraph, competitor: Path) -> frozenset:
        edges = frozenset(competitor.edge_indices(g)) - self.forbidden
        if not edges:
            raise InfeasibleError(
                f"competing path {list(competitor.nodes)} uses only protected edges"
            )
        self.constraints.append(edges)
        return edges

    @property
    def variable_count(self) -> int:
        return len(self.costs) - len(self.forbidden)


@dataclass
class AttackResult:
    """Outcome of one solver run plus problem-size and timing telemetry."""

    cut_edges: frozenset
    total_cost: float
    valid: bool
    pathattack_calls: int
    constraints_generated: int
    wall_time_ms: float
    subproblem_nodes: int
    subproblem_edges: int


def greedy_set_cover(cs: ConstraintSystem) -> set[int]:
    """Max coverage-per-cost greedy; ties to the smaller edge index."""
    for con in cs.constraints:
        if not con:
            raise InfeasibleError("empty constraint cannot be covered")
    if not cs.constraints:
        return set()
    live = list(zip(cs.constraint_arrays(), cs.constraints))
    chosen: set[int] = set()
    while live:
        counts = np.bincount(
            np.concatenate([arr for arr, _ in live]), minlength=len(cs.costs)
        )
        ratio = counts / cs.costs
        best = int(np.flatnonzero(ratio == ratio.max())[0])
        chosen.add(best)
        live = [(arr, con) for arr, con in live if best not in con]
    return chosen


def _prune_cover(cs: ConstraintSystem, chosen: set[int]) -> set[int]:
    # drop redundant edges, most expensive first
    for e in sorted(chosen, key=lambda e: (-cs.costs[e], e)):
        trial = chosen - {e}
        if all(con & trial for con in cs.constraints):
            chosen = trial
    return chosen


def lp_cover_round(cs: ConstraintSystem, seed: int = 0) -> set[int]:
    """LP relaxation + randomized rounding + greedy repair + prune.

    The LP is min sum(c_e x_e) s.t. sum over each constraint >= 1 and
    0 <= x_e <= 1, restricted to edges appearing in some constraint (all
    other variables are 0 at any optimum).  Each edge is kept independently
    with probability min(1, x_e * ln(2|P|)) for up to 100 trials.
    """
    for con in cs.constraints:
        if not con:
            raise InfeasibleError("empty constraint cannot be covered")
    if not cs.constraints:
        return set()
    support = sorted(set().union(*cs.constraints))
    col = {e: j for j, e in enumerate(support)}
    n = len(support)
    p = len(cs.constraints)
    rows, rhs = [], []
    for con in cs.constraints:
        row = np.zeros(n)
        for e in con:
            row[col[e]] = -1.0
        rows.append(row)
        rhs.append(-1.0)
    rows.append(np.eye(n))
    rhs.extend([1.0] * n)
    if cs.budget is not None:
        rows.append(np.array([[cs.costs[e] for e in support]]))
        rhs.append(float(cs.budget))
    a_ub = np.vstack([np.atleast_2d(r) for r in rows])
    b_ub = np.array(rhs)
    c = np.array([cs.costs[e] for e in support])
    try:
        x, _ = solve_lp(c, a_ub, b_ub)
    except LPInfeasibleError as exc:
        raise InfeasibleError(f"cover LP infeasible: {exc}") from None

    inflate = math.log(2 * p) if p > 0 else 1.0
    keep_prob = np.minimum(1.0, x * max(inflate, 1.0))
    rng = np.random.default_rng(seed)
    chosen: set[int] = set()
    for _ in range(ROUNDING_TRIALS):
        trial = {support[j] for j in range(n) if rng.random() < keep_prob[j]}
        if all(con & trial for con in cs.constraints):
            chosen = trial
            break
    else:
        chosen = {support[j] for j in range(n) if rng.random() < keep_prob[j]}
    # repair any uncovered constraints greedily
    uncovered = [set(con) for con in cs.constraints if not con & chosen]
    while uncovered:
        gain: dict[int, int] = {}
        for con in uncovered:
            for e in con:
                gain[e] = gain.get(e, 0) + 1
        best = min(gain, key=lambda e: (-gain[e] / cs.costs[e], e))
        chosen.add(best)
        uncovered = [con for con in uncovered if best not in con]
    return _prune_cover(cs, chosen)


def _solve_cover(cs: ConstraintSystem, backend: str, seed: int) -> set[int]:
    if backend == "greedy":
        return greedy_set_cover(cs)
    if backend == "lp":
        return lp_cover_round(cs, seed=seed)
    raise ValueError(f"unknown cover backend {backend!r}")


def _is_target_shortest(
    g: WeightedGraph, mask: EdgeMask, query: PathQuery
) -> tuple[bool, Path | None]:
    p = shortest_path(g, mask, query)
    return (p is not None and p.nodes == query.target_path.nodes), p


def pathattack(
    g: WeightedGraph,
    mask: EdgeMask,
    query: PathQuery,
    cover_backend: str = "greedy",
    seed: int = 0,
    strict_unique: bool = False,
    budget: float | None = None,
    lp_dump_path=None,
) -> AttackResult:
    """Constraint-generation attack making the target path shortest.

    With `strict_unique` the loop additionally cuts equal-length
    competitors until the target path is strictly shorter than any other.
    """
    t0 = time.perf_counter()
    pstar = query.target_path
    if not is_path_valid(g, mask, pstar):
        raise ValidationError("target path is not valid under the given mask")
    pstar_edges = frozenset(pstar.edge_indices(g))
    if pstar_edges & mask.deleted:
        raise ValidationError("target-path edge already deleted by the mask")
    cs = ConstraintSystem(costs=g.cost, forbidden=pstar_edges, budget=budget)
    cut: set[int] = set()
    iterations = 0
    while True:
        if iterations > MAX_ITERATIONS:
            raise RuntimeError("constraint generation failed to terminate")
        iterations += 1
        current = mask.union(cut)
        ok, p = _is_target_shortest(g, current, query)
        if ok:
            if not strict_unique:
                break
            rivals = k_shortest_paths(g, current, query.source, query.target, 2)
            rival = next((r for r in rivals if r.nodes != pstar.nodes), None)
            if rival is None or rival.length > pstar.length:
                break
            cs.add_path_constraint(g, rival)
        else:
            assert p is not None and p.length <= pstar.length + 1e-9
            cs.add_path_constraint(g, p)
        cut = _solve_cover(cs, cover_backend, seed)
        if budget is not None and sum(g.cost[e] for e in cut) > budget + 1e-9:
            raise InfeasibleError(
                f"cover cost exceeds budget {budget}; {len(cs.constraints)} constraints"
            )
    if lp_dump_path is not None:
        dump_lp(cs, lp_dump_path)
    # prune: restore any edge whose return keeps the target path winning
    for e in sorted(cut, key=lambda e: (-g.cost[e], e)):
        trial = cut - {e}
        ok, _ = _is_target_shortest(g, mask.union(trial), query)
        if ok and strict_unique:
            rivals = k_shortest_paths(g, mask.union(trial), query.source, query.target, 2)
            rival = next((r for r in rivals if r.nodes != pstar.nodes), None)
            ok = rival is None or rival.length > pstar.length
        if ok:
            cut = trial
    valid, _ = _is_target_shortest(g, mask.union(cut), query)
    return AttackResult(
        cut_edges=frozenset(cut),
        total_cost=float(sum(g.cost[e] for e in cut)),
        valid=valid,
        pathattack_calls=1,
        constraints_generated=len(cs.constraints),
        wall_time_ms=(time.perf_counter() - t0) * 1000.0,
        subproblem_nodes=g.node_count,
        subproblem_edges=g.edge_count,
    )


def baseline_greedy(g: WeightedGraph, mask: EdgeMask, query: PathQuery) -> AttackResult:
    """Delete the cheapest off-target edge of the current shortest path; repeat."""
    t0 = time.perf_counter()
    pstar = query.target_path
    if not is_path_valid(g, mask, pstar):
        raise ValidationError("target path is not valid under the given mask")
    pstar_edges = frozenset(pstar.edge_indices(g))
    cut: set[int] = set()
    while True:
        ok, p = _is_target_shortest(g, mask.union(cut), query)
        if ok:
            break
        assert p is not None
        removable = [e for e in p.edge_indices(g) if e not in pstar_edges]
        if not removable:
            raise RuntimeError("shortest path uses only protected edges")
        cut.add(min(removable, key=lambda e: (g.cost[e], e)))
    return AttackResult(
        cut_edges=frozenset(cut),
        total_cost=float(sum(g.cost[e] for e in cut)),
        valid=True,
        pathattack_calls=0,
        constraints_generated=0,
        wall_time_ms=(time.perf_counter() - t0) * 1000.0,
        subproblem_nodes=g.node_count,
        subproblem_edges=g.edge_count,
    )


def dump_lp(cs: ConstraintSystem, path) -> None:
    """Write the covering LP in a plain-text format for external checking."""
    support = sorted(set().union(*cs.constraints)) if cs.constraints else []
    with open(path, "w") as fh:
        fh.write("minimize\n  ")
        fh.write(" + ".join(f"{cs.costs[e]:.12g} x{e}" for e in support) or "0")
        fh.write("\nsubject to\n")
        for i, con in enumerate(cs.constraints):
            terms = " + ".join(f"x{e}" for e in sorted(con))
            fh.write(f"  c{i}: {terms} >= 1\n")
        if cs.budget is not None:
            terms = " + ".join(f"{cs.costs[e]:.12g} x{e}" for e in support)
            fh.write(f"  budget: {terms} <= {cs.budget:.12g}\n")
        fh.write("bounds\n")
        for e in support:
            fh.write(f"  0 <= x{e} <= 1\n")
        fh.write("end\n")
