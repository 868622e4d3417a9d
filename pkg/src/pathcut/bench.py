"""Benchmark harness: run method suites over synthetic families and real
graphs, record per-run metrics to CSV, summarize, and plot.

Two runs with the same suite and seeds produce identical CSVs except for
the wall-time columns.  Every solver row is re-validated against an
independent full-graph shortest-path check before being written.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path as FilePath

import numpy as np
import pandas as pd

from .attack import baseline_greedy, pathattack
from .gat import load_weights
from .graph import EMPTY_MASK, EdgeMask, PathQuery, WeightedGraph, load_edge_list
from .grasp import GraspConfig, grasp_attack
from .paths import shortest_path
from .synthgen import GeneratorParams, generate, sample_instance

SMALL_GRAPH_EDGE_LIMIT = 1000

BENCH_COLUMNS = [
    "instance_id",
    "family",
    "n",
    "m",
    "method",
    "scorer",
    "features",
    "cover_backend",
    "seed",
    "edges_cut",
    "total_cost",
    "valid",
    "wall_time_ms",
    "feature_time_ms",
    "subproblem_edges",
    "reduction_pct",
    "pathattack_calls",
    "final_threshold",
    "error",
]


@dataclass(frozen=True)
class MethodSpec:
    """One benchmark method: baseline, pathattack, or grasp + scorer."""

    method: str                       # baseline | pathattack | grasp
    scorer: str = ""                  # grasp only: gat | detour | constant
    cover_backend: str = "greedy"
    features: str = ""                # grasp+gat: comma-joined family list
    weights_path: str = ""
    start_percentile: float = 95.0
    decrement: float = 10.0

    def label(self) -> str:
        return f"{self.method}:{self.scorer}" if self.scorer else self.method


@dataclass
class SuiteConfig:
    families: list[GeneratorParams] = field(default_factory=list)
    graph_files: list[str] = field(default_factory=list)
    instances: int = 15
    k_star: int = 100
    methods: list[MethodSpec] = field(default_factory=lambda: [
        MethodSpec("baseline"),
        MethodSpec("pathattack"),
        MethodSpec("grasp", scorer="detour"),
    ])
    seed: int = 0
    threads: int = 1


def _run_one_method(
    g: WeightedGraph, query: PathQuery, spec: MethodSpec, seed: int
) -> dict:
    row = {
        "method": spec.method,
        "scorer": spec.scorer,
        "features": spec.features,
        "cover_backend": spec.cover_backend if spec.method != "baseline" else "",
        "seed": seed,
        "error": "",
        "final_threshold": "",
        "feature_time_ms": 0.0,
    }
    m = g.edge_count
    try:
        if spec.method == "baseline":
            res = baseline_greedy(g, EMPTY_MASK, query)
        elif spec.method == "pathattack":
            res = pathattack(g, EMPTY_MASK, query, cover_backend=spec.cover_backend, seed=seed)
        elif spec.method == "grasp":
            cfg = GraspConfig(
                start_percentile=spec.start_percentile,
                decrement=spec.decrement,
                scorer=spec.scorer or "detour",
                cover_backend=spec.cover_backend,
                seed=seed,
                feature_families=frozenset(spec.features.split(","))
                if spec.features
                else frozenset({"structural", "flow", "ppr"}),
            )
            weights = load_weights(spec.weights_path) if spec.weights_path else None
            res, trace = grasp_attack(g, query, cfg, weights)
            row["feature_time_ms"] = trace.feature_time_ms
            row["final_threshold"] = trace.iterations[-1].threshold
        else:
            raise ValueError(f"unknown method {spec.method!r}")
        # independent re-validation on the full graph
        sp = shortest_path(g, EdgeMask.of(res.cut_edges), query)
        revalid = sp is not None and sp.nodes == query.target_path.nodes
        row.update(
            edges_cut=len(res.cut_edges),
            total_cost=res.total_cost,
            valid=bool(res.valid and revalid),
            wall_time_ms=res.wall_time_ms,
            subproblem_edges=res.subproblem_edges if spec.method == "grasp" else m,
            reduction_pct=100.0 * (1.0 - res.subproblem_edges / m)
            if spec.method == "grasp" and m
            else 0.0,
            pathattack_calls=res.pathattack_calls,
        )
    except Exception as exc:  # recorded, not fatal to the suite
        row.update(
            edges_cut=0,
            total_cost=float("nan"),
            valid=False,
            wall_time_ms=float("nan"),
            subproblem_edges=m,
            reduction_pct=0.0,
            pathattack_calls=0,
            error=f"{type(exc).__name__}: {exc}",
        )
    return row


def _run_instance(task) -> list[dict]:
    kind, entry, index, k_star, seed, methods = task
    if kind == "synthetic":
        params: GeneratorParams = entry
        g = generate(params)
        family = params.family
        instance_id = f"{family}-{params.seed}-{index}"
    else:
        g = load_edge_list(entry)
        family = FilePath(entry).stem
        instance_id = f"{family}-{index}"
    query = sample_instance(g, k_star, seed=seed)
    rows = []
    for spec in methods:
        row = _run_one_method(g, query, spec, seed)
        row.update(
            instance_id=instance_id, family=family, n=g.node_count, m=g.edge_count
        )
        rows.append(row)
    return rows


def build_tasks(suite: SuiteConfig) -> list[tuple]:
    tasks = []
    for params in suite.families:
        for j in range(suite.instances):
            inst = GeneratorParams(**{**_params_dict(params), "seed": suite.seed + j})
            tasks.append(
                ("synthetic", inst, j, suite.k_star, suite.seed + 10_000 + j, tuple(suite.methods))
            )
    for path in suite.graph_files:
        for j in range(suite.instances):
            tasks.append(
                ("file", path, j, suite.k_star, suite.seed + 10_000 + j, tuple(suite.methods))
            )
    return tasks


def _params_dict(params: GeneratorParams) -> dict:
    return {f.name: getattr(params, f.name) for f in fields(params)}


def run_suite(suite: SuiteConfig, out_csv: str | FilePath) -> pd.DataFrame:
    """Execute the suite, write one CSV row per (instance, method)."""
    tasks = build_tasks(suite)
    if suite.threads > 1:
        with ProcessPoolExecutor(max_workers=suite.threads) as pool:
            chunks = list(pool.map(_run_instance, tasks))
    else:
        chunks = [_run_instance(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]
    df = pd.DataFrame(rows, columns=BENCH_COLUMNS)
    df = df.sort_values(["instance_id", "method", "scorer"], kind="stable").reset_index(drop=True)
    df.to_csv(out_csv, index=False)
    small = df[df["m"] < SMALL_GRAPH_EDGE_LIMIT]
    if len(small):
        print(
            f"note: {small['instance_id'].nunique()} instance(s) have fewer than "
            f"{SMALL_GRAPH_EDGE_LIMIT} edges; on graphs this small the subgraph "
            "selection overhead can exceed its savings and the plain solver may be faster"
        )
    return df


def scaling_run(
    sizes: list[int],
    out_csv: str | FilePath,
    k_star: int = 100,
    seed: int = 0,
    instances: int = 3,
    scorer: str = "detour",
    weights_path: str = "",
    threads: int = 1,
) -> pd.DataFrame:
    """Sweep Barabasi-Albert graph sizes (m=7) with one fixed scorer."""
    methods = [
        MethodSpec("pathattack"),
        MethodSpec("grasp", scorer=scorer, weights_path=weights_path),
    ]
    frames = []
    for n in sizes:
        suite = SuiteConfig(
            families=[GeneratorParams("ba", n=n, m=7)],
            instances=instances,
            k_star=k_star,
            methods=methods,
            seed=seed,
            threads=threads,
        )
        tmp = FilePath(str(out_csv) + f".n{n}.tmp")
        df = run_suite(suite, tmp)
        tmp.unlink()
        frames.append(df)
    out = pd.concat(frames, ignore_index=True)
    out.to_csv(out_csv, index=False)
    return out


SUMMARY_METRICS = ("edges_cut", "total_cost", "wall_time_ms", "reduction_pct")


def summarize(csv_path: str | FilePath, out_dir: str | FilePath) -> pd.DataFrame:
    """Per (family, method) medians/IQRs plus SVG bar charts."""
    out_dir = FilePath(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    df = pd.read_csv(csv_path)
    if df.empty:
        summary = pd.DataFrame()
        summary.to_csv(out_dir / "summary.csv", index=False)
        return summary
    df["label"] = df.apply(
        lambda r: f"{r['method']}:{r['scorer']}" if isinstance(r["scorer"], str) and r["scorer"] else r["method"],
        axis=1,
    )
    records = []
    for (family, label), grp in df.groupby(["family", "label"]):
        rec = {"family": family, "method": label, "runs": len(grp), "valid_frac": grp["valid"].mean()}
        for metric in SUMMARY_METRICS:
            vals = grp[metric].astype(float)
            rec[f"{metric}_median"] = vals.median()
            rec[f"{metric}_mean"] = vals.mean()
            rec[f"{metric}_iqr"] = vals.quantile(0.75) - vals.quantile(0.25)
        records.append(rec)
    summary = pd.DataFrame(records).sort_values(["family", "method"]).reset_index(drop=True)
    summary.to_csv(out_dir / "summary.csv", index=False)
    _plot_bars(summary, out_dir / "metrics.svg")
    if df.groupby(["family", "label"])["n"].nunique().max() > 1:
        _plot_scaling(df, out_dir / "scaling.svg")
    return summary


def _plot_bars(summary: pd.DataFrame, path: FilePath) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    panels = [
        ("reduction_pct_median", "problem size reduction (%)"),
        ("edges_cut_median", "edges cut (median)"),
        ("wall_time_ms_median", "wall time (ms, median)"),
    ]
    fig, axes = plt.subplots(1, 3, figsize=(15, 4))
    families = sorted(summary["family"].unique())
    methods = sorted(summary["method"].unique())
    width = 0.8 / max(len(methods), 1)
    for ax, (col, title) in zip(axes, panels):
        for mi, method in enumerate(methods):
            sub = summary[summary["method"] == method].set_index("family")
            vals = [sub[col].get(f, np.nan) for f in families]
            ax.bar(np.arange(len(families)) + mi * width, vals, width=width, label=method)
        ax.set_xticks(np.arange(len(families)) + 0.4 - width / 2)
        ax.set_xticklabels(families, rotation=30, ha="right")
        ax.set_title(title)
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _plot_scaling(df: pd.DataFrame, path: FilePath) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for label, grp in df.groupby("label"):
        med = grp.groupby("n")[["wall_time_ms", "reduction_pct"]].median()
        axes[0].plot(med.index, med["wall_time_ms"], marker="o", label=label)
        axes[1].plot(med.index, med["reduction_pct"], marker="o", label=label)
    axes[0].set_xlabel("nodes")
    axes[0].set_ylabel("wall time (ms, median)")
    axes[1].set_xlabel("nodes")
    axes[1].set_ylabel("reduction (%)")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def load_suite_config(path: str | FilePath) -> SuiteConfig:
    """Parse a suite JSON: families (list of generator params), graph_files,
    instances, k_star, methods (list of method dicts), seed, threads."""
    obj = json.loads(FilePath(path).read_text())
    return SuiteConfig(
        families=[GeneratorParams(**f) for f in obj.get("families", [])],
        graph_files=obj.get("graph_files", []),
        instances=int(obj.get("instances", 15)),
        k_star=int(obj.get("k_star", 100)),
        methods=[MethodSpec(**m) for m in obj.get("methods", [])]
        or SuiteConfig().methods,
        seed=int(obj.get("seed", 0)),
        threads=int(obj.get("threads", 1)),
    )
