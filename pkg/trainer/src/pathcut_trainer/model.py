"""Attention scorer in torch, mirroring the solver's inference semantics.

Two multi-head attention layers (16x8 concat, 32x1 concat), three dense
layers of 32 units, logistic output.  LeakyReLU(0.2) attention scores with
a per-destination softmax over neighbors plus self-loops, ELU activations,
batch norm with tracked running statistics.  Export writes the solver's
portable weight-file JSON; an eval-mode forward pass must agree with the
solver's own inference on the same inputs.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch
from torch import nn

WEIGHT_FORMAT = "pathcut-gat-weights-v1"
LEAKY_SLOPE = 0.2
BN_EPS = 1e-5


def attention_edges(edges: list[tuple[int, int, float, float]], n: int) -> torch.Tensor:
    """(2, E) src/dst index tensor: both directions plus self-loops."""
    src = [a for a, b, _, _ in edges] + [b for a, b, _, _ in edges] + list(range(n))
    dst = [b for a, b, _, _ in edges] + [a for a, b, _, _ in edges] + list(range(n))
    return torch.tensor([src, dst], dtype=torch.long)


class GatLayer(nn.Module):
    def __init__(self, in_dim: int, heads: int, head_dim: int, dropout: float):
        super().__init__()
        self.heads, self.head_dim = heads, head_dim
        self.w = nn.Parameter(torch.empty(heads, in_dim, head_dim))
        self.a_src = nn.Parameter(torch.empty(heads, head_dim))
        self.a_dst = nn.Parameter(torch.empty(heads, head_dim))
        self.bias = nn.Parameter(torch.zeros(heads * head_dim))
        self.bn = nn.BatchNorm1d(heads * head_dim, eps=BN_EPS)
        self.dropout = nn.Dropout(dropout)
        gain = nn.init.calculate_gain("leaky_relu", LEAKY_SLOPE)
        for p in (self.w, self.a_src, self.a_dst):
            nn.init.xavier_uniform_(p.view(heads, -1), gain=gain)

    def forward(self, h: torch.Tensor, edge_index: torch.Tensor) -> torch.Tensor:
        src, dst = edge_index
        n = h.shape[0]
        h = self.dropout(h)
        z = torch.einsum("nf,hfd->nhd", h, self.w)
        scores = torch.nn.functional.leaky_relu(
            (z * self.a_src).sum(-1)[src] + (z * self.a_dst).sum(-1)[dst],
            negative_slope=LEAKY_SLOPE,
        )
        seg_max = torch.full((n, self.heads), -torch.inf, dtype=h.dtype)
        seg_max = seg_max.scatter_reduce(
            0, dst.unsqueeze(-1).expand(-1, self.heads), scores.detach(),
            reduce="amax", include_self=False,
        )
        ex = torch.exp(scores - seg_max[dst])
        denom = torch.zeros(n, self.heads, dtype=h.dtype).index_add(0, dst, ex)
        alpha = self.dropout(ex / denom[dst])
        msg = alpha.unsqueeze(-1) * z[src]
        out = torch.zeros_like(z).index_add(0, dst, msg)
        return out.reshape(n, -1) + self.bias


class DenseLayer(nn.Module):
    def __init__(self, in_dim: int, out_dim: int, dropout: float):
        super().__init__()
        self.linear = nn.Linear(in_dim, out_dim)
        self.bn = nn.BatchNorm1d(out_dim, eps=BN_EPS)
        self.dropout = nn.Dropout(dropout)

    def forward(self, h: torch.Tensor) -> torch.Tensor:
        return self.bn(self.linear(self.dropout(h)))


class GatScorer(nn.Module):
    """input -> gat(16x8) -> gat(32x1) -> dense 32 x3 -> logistic scalar."""

    def __init__(self, input_dim: int, dropout: float = 0.6, seed: int = 0):
        super().__init__()
        torch.manual_seed(seed)
        self.input_dim = input_dim
        self.gat1 = GatLayer(input_dim, 16, 8, dropout)
        self.gat2 = GatLayer(128, 32, 1, dropout)
        self.dense1 = DenseLayer(32, 32, dropout)
        self.dense2 = DenseLayer(32, 32, dropout)
        self.dense3 = DenseLayer(32, 32, dropout)
        self.output = nn.Linear(32, 1)
        self.double()

    def forward(self, x: torch.Tensor, edge_index: torch.Tensor) -> torch.Tensor:
        h = torch.nn.functional.elu(self.gat1.bn(self.gat1(x, edge_index)))
        h = torch.nn.functional.elu(self.gat2.bn(self.gat2(h, edge_index)))
        for dense in (self.dense1, self.dense2, self.dense3):
            h = torch.nn.functional.elu(dense(h))
        return self.output(h).squeeze(-1)

    def scores(self, x: torch.Tensor, edge_index: torch.Tensor) -> torch.Tensor:
        return torch.sigmoid(self.forward(x, edge_index))


def _enc(t: torch.Tensor) -> dict:
    arr = t.detach().cpu().numpy().astype(np.float64)
    return {"shape": list(arr.shape), "values": arr.ravel().tolist()}


def export_weights(model: GatScorer, path: str | Path, metadata: dict | None = None) -> None:
    """Write the solver's portable weight-file JSON."""
    model.eval()
    layers = {}
    for name in ("gat1", "gat2"):
        layer: GatLayer = getattr(model, name)
        layers[name] = {
            "w": _enc(layer.w),
            "a_src": _enc(layer.a_src),
            "a_dst": _enc(layer.a_dst),
            "bias": _enc(layer.bias),
            "bn_mean": _enc(layer.bn.running_mean),
            "bn_var": _enc(layer.bn.running_var),
            "bn_scale": _enc(layer.bn.weight),
            "bn_shift": _enc(layer.bn.bias),
        }
    for name in ("dense1", "dense2", "dense3"):
        layer: DenseLayer = getattr(model, name)
        layers[name] = {
            "w": _enc(layer.linear.weight.T),
            "bias": _enc(layer.linear.bias),
            "bn_mean": _enc(layer.bn.running_mean),
            "bn_var": _enc(layer.bn.running_var),
            "bn_scale": _enc(layer.bn.weight),
            "bn_shift": _enc(layer.bn.bias),
        }
    layers["output"] = {
        "w": _enc(model.output.weight.T),
        "bias": _enc(model.output.bias),
    }
    obj = {
        "format": WEIGHT_FORMAT,
        "input_dim": model.input_dim,
        "metadata": metadata or {},
        "layers": layers,
    }
    Path(path).write_text(json.dumps(obj) + "\n")


def load_exported(path: str | Path, seed: int = 0) -> GatScorer:
    """Rebuild an eval-mode model from a portable weight file."""
    blob = json.loads(Path(path).read_text())
    if blob.get("format") != WEIGHT_FORMAT:
        raise ValueError(f"{path}: unknown format {blob.get('format')!r}")
    layers = blob["layers"]

    def t(rec):
        return torch.from_numpy(
            np.array(rec["values"], dtype=np.float64).reshape(rec["shape"])
        )

    model = GatScorer(int(blob["input_dim"]), seed=seed)
    with torch.no_grad():
        for name in ("gat1", "gat2"):
            layer, rec = getattr(model, name), layers[name]
            layer.w.copy_(t(rec["w"]))
            layer.a_src.copy_(t(rec["a_src"]))
            layer.a_dst.copy_(t(rec["a_dst"]))
            layer.bias.copy_(t(rec["bias"]))
            layer.bn.running_mean.copy_(t(rec["bn_mean"]))
            layer.bn.running_var.copy_(t(rec["bn_var"]))
            layer.bn.weight.copy_(t(rec["bn_scale"]))
            layer.bn.bias.copy_(t(rec["bn_shift"]))
        for name in ("dense1", "dense2", "dense3"):
            layer, rec = getattr(model, name), layers[name]
            layer.linear.weight.copy_(t(rec["w"]).T)
            layer.linear.bias.copy_(t(rec["bias"]))
            layer.bn.running_mean.copy_(t(rec["bn_mean"]))
            layer.bn.running_var.copy_(t(rec["bn_var"]))
            layer.bn.weight.copy_(t(rec["bn_scale"]))
            layer.bn.bias.copy_(t(rec["bn_shift"]))
        model.output.weight.copy_(t(layers["output"]["w"]).T)
        model.output.bias.copy_(t(layers["output"]["bias"]))
    model.eval()
    return model
