"""Training loop for the node scorer.

One instance per step, class-weighted binary cross-entropy, Adam, early
stopping on held-out loss.  A NaN loss halves the learning rate and
restarts once from scratch before giving up.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass

import numpy as np
import torch

from .data import Dataset
from .model import GatScorer, attention_edges

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    epochs: int = 500
    lr: float = 5e-3
    dropout: float = 0.6
    early_stop_patience: int = 250
    holdout_fraction: float = 0.2
    seed: int = 0


class TrainError(Exception):
    pass


def _tensors(ds: Dataset) -> list[tuple[torch.Tensor, torch.Tensor, torch.Tensor]]:
    out = []
    for inst, feats, labels in zip(ds.instances, ds.features, ds.labels):
        x = torch.from_numpy(np.ascontiguousarray(feats, dtype=np.float64))
        y = torch.from_numpy(labels)
        out.append((x, attention_edges(inst.edges, inst.node_count), y))
    return out


def _loss(model: GatScorer, item) -> torch.Tensor:
    x, edge_index, y = item
    logits = model(x, edge_index)
    neg, pos = float((y == 0).sum()), float((y == 1).sum())
    pos_weight = torch.tensor(neg / max(pos, 1.0), dtype=torch.float64)
    return torch.nn.functional.binary_cross_entropy_with_logits(
        logits, y, pos_weight=pos_weight
    )


def _run(
    ds: Dataset, cfg: TrainConfig, lr: float
) -> tuple[GatScorer, list[float], float]:
    torch.manual_seed(cfg.seed)
    rng = random.Random(cfg.seed)
    items = _tensors(ds)
    order = list(range(len(items)))
    rng.shuffle(order)
    n_hold = max(1, int(round(cfg.holdout_fraction * len(items)))) if len(items) > 1 else 0
    hold, train = order[:n_hold], order[n_hold:]
    if not train:
        train, hold = order, []

    model = GatScorer(items[0][0].shape[1], dropout=cfg.dropout, seed=cfg.seed)
    opt = torch.optim.Adam(model.parameters(), lr=lr)
    history: list[float] = []
    best_loss, best_state, since_best = math.inf, None, 0

    for epoch in range(cfg.epochs):
        model.train()
        total = 0.0
        for idx in rng.sample(train, len(train)):
            opt.zero_grad()
            loss = _loss(model, items[idx])
            if not torch.isfinite(loss):
                raise TrainError(f"non-finite loss at epoch {epoch}")
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), 5.0)
            opt.step()
            total += loss.item()
        history.append(total / len(train))

        model.eval()
        with torch.no_grad():
            pool = hold or train
            monitored = sum(_loss(model, items[i]).item() for i in pool) / len(pool)
        if not math.isfinite(monitored):
            raise TrainError(f"non-finite held-out loss at epoch {epoch}")
        if monitored < best_loss - 1e-9:
            best_loss, since_best = monitored, 0
            best_state = {k: v.clone() for k, v in model.state_dict().items()}
        else:
            since_best += 1
            if since_best >= cfg.early_stop_patience:
                log.info("early stop at epoch %d (held-out %.4f)", epoch, best_loss)
                break

    if best_state is not None:
        model.load_state_dict(best_state)
    model.eval()
    return model, history, best_loss


def train(ds: Dataset, cfg: TrainConfig | None = None) -> tuple[GatScorer, list[float], float]:
    """Returns (model in eval mode, per-epoch train loss, best held-out loss)."""
    cfg = cfg or TrainConfig()
    if not len(ds):
        raise TrainError("empty dataset")
    try:
        return _run(ds, cfg, cfg.lr)
    except TrainError as exc:
        log.warning("%s; retrying once at half learning rate", exc)
        return _run(ds, cfg, cfg.lr / 2)
