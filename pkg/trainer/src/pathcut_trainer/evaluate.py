"""Evaluation: ranking quality of the scorer and its downstream effect.

Ranking metrics (ROC AUC, precision at a percentile cutoff) come straight
from the node labels.  The downstream check shells out to the solver CLI
and compares search-space reduction under the trained scorer against the
constant scorer on the same instances.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from sklearn.metrics import roc_auc_score

from .data import Dataset, run_solver
from .model import GatScorer, attention_edges


@dataclass
class RankingReport:
    auc: float
    precision_at_95: float
    per_instance_auc: list[float]


def score_dataset(model: GatScorer, ds: Dataset) -> list[np.ndarray]:
    model.eval()
    out = []
    with torch.no_grad():
        for inst, feats in zip(ds.instances, ds.features):
            x = torch.from_numpy(np.ascontiguousarray(feats, dtype=np.float64))
            s = model.scores(x, attention_edges(inst.edges, inst.node_count))
            out.append(s.numpy())
    return out


def ranking_report(model: GatScorer, ds: Dataset) -> RankingReport:
    """Pooled ROC AUC plus precision among the top 5% of scores."""
    scores = score_dataset(model, ds)
    pooled_y = np.concatenate(ds.labels)
    pooled_s = np.concatenate(scores)
    per_auc = [
        roc_auc_score(y, s)
        for y, s in zip(ds.labels, scores)
        if len(np.unique(y)) == 2
    ]
    cut = np.percentile(pooled_s, 95)
    top = pooled_s >= cut
    precision = float(pooled_y[top].mean()) if top.any() else 0.0
    return RankingReport(
        auc=float(roc_auc_score(pooled_y, pooled_s)),
        precision_at_95=precision,
        per_instance_auc=per_auc,
    )


def _attack_row(instance_path: Path, scorer: str, out_dir: Path, weights: Path | None, seed: int) -> dict:
    args = [
        "--seed", str(seed), "--out-dir", str(out_dir),
        "attack", "--instance", str(instance_path), "--method", "grasp",
        "--scorer", scorer, "--out", f"eval_{scorer}.csv",
    ]
    if weights is not None:
        args += ["--weights", str(weights)]
    run_solver(args)
    with open(out_dir / f"eval_{scorer}.csv", newline="") as fh:
        return next(csv.DictReader(fh))


@dataclass
class DownstreamReport:
    gat_reductions: list[float]
    constant_reductions: list[float]
    gat_valid: int
    constant_valid: int

    @property
    def gat_median(self) -> float:
        return statistics.median(self.gat_reductions)

    @property
    def constant_median(self) -> float:
        return statistics.median(self.constant_reductions)


def downstream_report(
    weights_path: str | Path, instance_paths: list[Path], work_dir: str | Path, seed: int = 0
) -> DownstreamReport:
    """Search-space reduction, trained scorer vs constant, via the solver CLI."""
    work_dir = Path(work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)
    rep = DownstreamReport([], [], 0, 0)
    for j, inst_path in enumerate(instance_paths):
        sub = work_dir / f"eval-{j}"
        sub.mkdir(exist_ok=True)
        gat = _attack_row(inst_path, "gat", sub, Path(weights_path), seed)
        const = _attack_row(inst_path, "constant", sub, None, seed)
        rep.gat_reductions.append(float(gat["reduction_pct"]))
        rep.constant_reductions.append(float(const["reduction_pct"]))
        rep.gat_valid += gat["valid"] == "True"
        rep.constant_valid += const["valid"] == "True"
    return rep
