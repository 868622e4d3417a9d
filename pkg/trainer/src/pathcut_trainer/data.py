"""Dataset plumbing: read the solver CLI's file formats, build labels.

Graphs arrive as TSV edge lists, instances as JSON, features as CSV; the
cut-incidence label mode shells out to the solver CLI for a reference cut.
Edge order mirrors the solver's loader: canonical (min, max) pairs, sorted.
"""

from __future__ import annotations

import csv
import json
import logging
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np

log = logging.getLogger(__name__)

LABEL_MODES = ("cut_incidence", "competitive_path")


class DataError(Exception):
    pass


@dataclass
class Instance:
    """One training instance in solver file-format terms."""

    graph_path: Path
    source: int
    target: int
    p_star: list[int]
    node_count: int
    edges: list[tuple[int, int, float, float]]   # solver edge-index order
    family: str = ""

    def nx_graph(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(self.node_count))
        for a, b, w, c in self.edges:
            G.add_edge(a, b, weight=w)
        return G

    def p_star_length(self) -> float:
        lookup = {(a, b): w for a, b, w, c in self.edges}
        total = 0.0
        for a, b in zip(self.p_star, self.p_star[1:]):
            key = (min(a, b), max(a, b))
            if key not in lookup:
                raise DataError(f"target path uses missing edge {key}")
            total += lookup[key]
        return total


def load_graph_tsv(path: str | Path) -> tuple[int, list[tuple[int, int, float, float]]]:
    """Edge list in the solver's TSV format, returned in its edge-index order."""
    records = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise DataError(f"{path}:{lineno}: expected at least two columns")
        try:
            a, b = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) > 2 else 1.0
            c = float(parts[3]) if len(parts) > 3 else 1.0
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if key not in records or w < records[key][0]:
            records[key] = (w, c)
    if not records:
        return 0, []
    n = max(max(k) for k in records) + 1
    edges = [(a, b, w, c) for (a, b), (w, c) in sorted(records.items())]
    return n, edges


def load_instance(path: str | Path, family: str = "") -> Instance:
    path = Path(path)
    obj = json.loads(path.read_text())
    graph_path = path.parent / obj["graph"]
    n, edges = load_graph_tsv(graph_path)
    return Instance(
        graph_path=graph_path,
        source=int(obj["source"]),
        target=int(obj["target"]),
        p_star=[int(v) for v in obj["p_star"]],
        node_count=n,
        edges=edges,
        family=family,
    )


def load_features_csv(path: str | Path) -> np.ndarray:
    values = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}: non-finite feature values")
    return values


def make_labels(inst: Instance, mode: str, cut_edges: set[int] | None = None) -> np.ndarray:
    """Binary node labels; target-path nodes are always positive.

    `competitive_path`: 1 iff dist(s,v) + dist(v,t) <= length(p*).
    `cut_incidence`: 1 iff the node touches a reference-cut edge (pass the
    solver's cut via `cut_edges`) or lies on p*.
    """
    if mode not in LABEL_MODES:
        raise DataError(f"unknown label mode {mode!r}")
    labels = np.zeros(inst.node_count, dtype=np.float64)
    if mode == "competitive_path":
        G = inst.nx_graph()
        ds = nx.single_source_dijkstra_path_length(G, inst.source)
        dt = nx.single_source_dijkstra_path_length(G, inst.target)
        bound = inst.p_star_length() + 1e-12
        for v in range(inst.node_count):
            if v in ds and v in dt and ds[v] + dt[v] <= bound:
                labels[v] = 1.0
    else:
        if cut_edges is None:
            raise DataError("cut_incidence labels need the solver's cut edges")
        for e in cut_edges:
            a, b, _, _ = inst.edges[e]
            labels[a] = labels[b] = 1.0
    labels[inst.p_star] = 1.0
    return labels


def run_solver(args: list[str]) -> str:
    """Invoke the solver CLI; raises DataError on failure."""
    proc = subprocess.run(
        ["pathcut", *args], capture_output=True, text=True
    )
    if proc.returncode != 0:
        raise DataError(
            f"pathcut {' '.join(args)} failed ({proc.returncode}): {proc.stderr.strip()}"
        )
    return proc.stdout


def reference_cut(instance_path: str | Path, out_dir: str | Path, seed: int = 0) -> set[int]:
    """Ask the solver for a cut; returns solver edge indices."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run_solver(
        [
            "--seed", str(seed), "--out-dir", str(out_dir),
            "attack", "--instance", str(instance_path), "--method", "pathattack",
            "--out", "reference_cut.csv",
        ]
    )
    with open(out_dir / "reference_cut.csv", newline="") as fh:
        row = next(csv.DictReader(fh))
    if row["valid"] != "True":
        raise DataError(f"solver produced an invalid cut for {instance_path}")
    raw = row["cut_edges"].strip()
    return {int(e) for e in raw.split(";")} if raw else set()


@dataclass
class Dataset:
    instances: list[Instance] = field(default_factory=list)
    features: list[np.ndarray] = field(default_factory=list)
    labels: list[np.ndarray] = field(default_factory=list)
    instance_paths: list[Path] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.instances)


def build_dataset(
    out_dir: str | Path,
    family: str,
    count: int,
    n: int = 250,
    k_star: int = 20,
    label_mode: str = "cut_incidence",
    seed: int = 0,
    feature_families: str = "structural,flow,ppr",
) -> Dataset:
    """Generate instances + features through the solver CLI and label them.

    Instances whose reference solve fails are skipped with a log entry.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds = Dataset()
    for j in range(count):
        inst_seed = seed + j
        prefix = f"{family}-{inst_seed}"
        inst_dir = out_dir / prefix
        inst_dir.mkdir(exist_ok=True)
        gen_args = ["--seed", str(inst_seed), "--out-dir", str(inst_dir), "gen",
                    "--family", family, "--k-star", str(k_star), "--prefix", prefix]
        if family == "lattice":
            side = max(2, int(round(n ** 0.5)))
            gen_args += ["--rows", str(side), "--cols", str(side)]
        else:
            gen_args += ["--n", str(n)]
        instance_path = inst_dir / f"{prefix}.json"
        try:
            run_solver(gen_args)
            run_solver(
                ["--out-dir", str(inst_dir), "features", "--instance", str(instance_path),
                 "--families", feature_families, "--out", "features.csv"]
            )
            inst = load_instance(instance_path, family=family)
            feats = load_features_csv(inst_dir / "features.csv")
            if feats.shape[0] != inst.node_count:
                raise DataError(f"{prefix}: feature rows != node count")
            cut = (
                reference_cut(instance_path, inst_dir, seed=inst_seed)
                if label_mode == "cut_incidence"
                else None
            )
            labels = make_labels(inst, label_mode, cut)
        except DataError as exc:
            log.warning("skipping %s: %s", prefix, exc)
            continue
        ds.instances.append(inst)
        ds.features.append(feats)
        ds.labels.append(labels)
        ds.instance_paths.append(instance_path)
    return ds
