"""Node scoring: graph-attention forward pass and the detour-margin heuristic.

The attention network is inference-only here: two multi-head attention
layers (16 heads of width 8, then 32 heads of width 1, concatenated),
three 32-unit dense layers, and a logistic output.  Batch normalization
uses stored running statistics; dropout is identity.  Weights travel in a
portable JSON file whose declared shapes are validated on load, so a
trainer may vary layer sizes as long as the chain is consistent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path as FilePath

import numpy as np

from .graph import EMPTY_MASK, EdgeMask, PathQuery, WeightedGraph
from .features import FeatureMatrix
from .paths import dijkstra

WEIGHT_FORMAT = "pathcut-gat-weights-v1"
LEAKY_SLOPE = 0.2
BN_EPS = 1e-5

GAT_LAYERS = ("gat1", "gat2")
DENSE_LAYERS = ("dense1", "dense2", "dense3")
DEFAULT_SHAPES = {"gat1": (16, 8), "gat2": (32, 1), "dense": 32}


class WeightSchemaError(Exception):
    """Weight file is malformed or its dimension chain is inconsistent."""


class NumericError(Exception):
    """NaN appeared during the forward pass."""


@dataclass
class GatLayerWeights:
    w: np.ndarray        # (heads, in_dim, head_dim)
    a_src: np.ndarray    # (heads, head_dim)
    a_dst: np.ndarray    # (heads, head_dim)
    bias: np.ndarray     # (heads * head_dim,)
    bn_mean: np.ndarray
    bn_var: np.ndarray
    bn_scale: np.ndarray
    bn_shift: np.ndarray

    @property
    def heads(self) -> int:
        return self.w.shape[0]

    @property
    def out_dim(self) -> int:
        return self.w.shape[0] * self.w.shape[2]


@dataclass
class DenseLayerWeights:
    w: np.ndarray        # (in_dim, out_dim)
    bias: np.ndarray
    bn_mean: np.ndarray | None = None
    bn_var: np.ndarray | None = None
    bn_scale: np.ndarray | None = None
    bn_shift: np.ndarray | None = None


@dataclass
class ModelWeights:
    """Ordered layer weights plus the input dimension and free-form metadata."""

    input_dim: int
    gat1: GatLayerWeights
    gat2: GatLayerWeights
    dense1: DenseLayerWeights
    dense2: DenseLayerWeights
    dense3: DenseLayerWeights
    output: DenseLayerWeights
    metadata: dict = field(default_factory=dict)

    def validate(self) -> None:
        chain = self.input_dim
        for name in GAT_LAYERS:
            layer: GatLayerWeights = getattr(self, name)
            heads, in_dim, head_dim = layer.w.shape
            if in_dim != chain:
                raise WeightSchemaError(
                    f"{name}: expects input {in_dim}, previous layer provides {chain}"
                )
            for attr in ("a_src", "a_dst"):
                if getattr(layer, attr).shape != (heads, head_dim):
                    raise WeightSchemaError(f"{name}.{attr}: shape mismatch")
            chain = heads * head_dim
            for attr in ("bias", "bn_mean", "bn_var", "bn_scale", "bn_shift"):
                if getattr(layer, attr).shape != (chain,):
                    raise WeightSchemaError(f"{name}.{attr}: expected length {chain}")
        for name in DENSE_LAYERS + ("output",):
            layer: DenseLayerWeights = getattr(self, name)
            in_dim, out_dim = layer.w.shape
            if in_dim != chain:
                raise WeightSchemaError(
                    f"{name}: expects input {in_dim}, previous layer provides {chain}"
                )
            if layer.bias.shape != (out_dim,):
                raise WeightSchemaError(f"{name}.bias: expected length {out_dim}")
            if name != "output":
                for attr in ("bn_mean", "bn_var", "bn_scale", "bn_shift"):
                    arr = getattr(layer, attr)
                    if arr is None or arr.shape != (out_dim,):
                        raise WeightSchemaError(f"{name}.{attr}: expected length {out_dim}")
            chain = out_dim
        if chain != 1:
            raise WeightSchemaError(f"output layer must have one unit, has {chain}")
        for name in GAT_LAYERS + DENSE_LAYERS + ("output",):
            layer = getattr(self, name)
            for attr in vars(layer):
                arr = getattr(layer, attr)
                if arr is not None and not np.all(np.isfinite(arr)):
                    raise WeightSchemaError(f"{name}.{attr}: non-finite values")


def _arr(obj, key, name):
    if key not in obj:
        raise WeightSchemaError(f"{name}: missing tensor '{key}'")
    rec = obj[key]
    try:
        return np.array(rec["values"], dtype=float).reshape(rec["shape"])
    except (KeyError, TypeError, ValueError) as exc:
        raise WeightSchemaError(f"{name}.{key}: {exc}") from None


def load_weights(path: str | FilePath) -> ModelWeights:
    """Read and validate a portable weight file."""
    try:
        obj = json.loads(FilePath(path).read_text())
    except json.JSONDecodeError as exc:
        raise WeightSchemaError(f"{path}: not valid JSON ({exc})") from None
    if obj.get("format") != WEIGHT_FORMAT:
        raise WeightSchemaError(f"{path}: unknown format {obj.get('format')!r}")
    layers = obj.get("layers", {})
    kwargs = {}
    for name in GAT_LAYERS:
        if name not in layers:
            raise WeightSchemaError(f"{path}: missing layer '{name}'")
        rec = layers[name]
        kwargs[name] = GatLayerWeights(
            w=_arr(rec, "w", name),
            a_src=_arr(rec, "a_src", name),
            a_dst=_arr(rec, "a_dst", name),
            bias=_arr(rec, "bias", name),
            bn_mean=_arr(rec, "bn_mean", name),
            bn_var=_arr(rec, "bn_var", name),
            bn_scale=_arr(rec, "bn_scale", name),
            bn_shift=_arr(rec, "bn_shift", name),
        )
    for name in DENSE_LAYERS + ("output",):
        if name not in layers:
            raise WeightSchemaError(f"{path}: missing layer '{name}'")
        rec = layers[name]
        kwargs[name] = DenseLayerWeights(
            w=_arr(rec, "w", name),
            bias=_arr(rec, "bias", name),
            bn_mean=_arr(rec, "bn_mean", name) if "bn_mean" in rec else None,
            bn_var=_arr(rec, "bn_var", name) if "bn_var" in rec else None,
            bn_scale=_arr(rec, "bn_scale", name) if "bn_scale" in rec else None,
            bn_shift=_arr(rec, "bn_shift", name) if "bn_shift" in rec else None,
        )
    weights = ModelWeights(
        input_dim=int(obj["input_dim"]), metadata=obj.get("metadata", {}), **kwargs
    )
    weights.validate()
    return weights


def save_weights(weights: ModelWeights, path: str | FilePath) -> None:
    weights.validate()

    def enc(arr):
        return {"shape": list(arr.shape), "values": np.asarray(arr).ravel().tolist()}

    layers = {}
    for name in GAT_LAYERS:
        layer: GatLayerWeights = getattr(weights, name)
        layers[name] = {k: enc(getattr(layer, k)) for k in (
            "w", "a_src", "a_dst", "bias", "bn_mean", "bn_var", "bn_scale", "bn_shift"
        )}
    for name in DENSE_LAYERS + ("output",):
        layer = getattr(weights, name)
        rec = {"w": enc(layer.w), "bias": enc(layer.bias)}
        if layer.bn_mean is not None:
            for k in ("bn_mean", "bn_var", "bn_scale", "bn_shift"):
                rec[k] = enc(getattr(layer, k))
        layers[name] = rec
    obj = {
        "format": WEIGHT_FORMAT,
        "input_dim": weights.input_dim,
        "metadata": weights.metadata,
        "layers": layers,
    }
    FilePath(path).write_text(json.dumps(obj) + "\n")


def random_weights(input_dim: int, seed: int = 0, metadata: dict | None = None) -> ModelWeights:
    """Glorot-style random weights with identity batch-norm statistics."""
    rng = np.random.default_rng(seed)

    def gat(in_dim, heads, head_dim):
        out = heads * head_dim
        s = np.sqrt(2.0 / (in_dim + head_dim))
        return GatLayerWeights(
            w=rng.normal(0, s, (heads, in_dim, head_dim)),
            a_src=rng.normal(0, s, (heads, head_dim)),
            a_dst=rng.normal(0, s, (heads, head_dim)),
            bias=np.zeros(out),
            bn_mean=np.zeros(out),
            bn_var=np.ones(out),
            bn_scale=np.ones(out),
            bn_shift=np.zeros(out),
        )

    def dense(in_dim, out_dim, bn=True):
        s = np.sqrt(2.0 / (in_dim + out_dim))
        return DenseLayerWeights(
            w=rng.normal(0, s, (in_dim, out_dim)),
            bias=np.zeros(out_dim),
            bn_mean=np.zeros(out_dim) if bn else None,
            bn_var=np.ones(out_dim) if bn else None,
            bn_scale=np.ones(out_dim) if bn else None,
            bn_shift=np.zeros(out_dim) if bn else None,
        )

    h1, d1 = DEFAULT_SHAPES["gat1"]
    h2, d2 = DEFAULT_SHAPES["gat2"]
    du = DEFAULT_SHAPES["dense"]
    mw = ModelWeights(
        input_dim=input_dim,
        gat1=gat(input_dim, h1, d1),
        gat2=gat(h1 * d1, h2, d2),
        dense1=dense(h2 * d2, du),
        dense2=dense(du, du),
        dense3=dense(du, du),
        output=dense(du, 1, bn=False),
        metadata=metadata or {},
    )
    mw.validate()
    return mw


def _leaky_relu(x: np.ndarray, slope: float = LEAKY_SLOPE) -> np.ndarray:
    return np.where(x >= 0, x, slope * x)


def _elu(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0, x, np.expm1(np.minimum(x, 0.0)))


def _batch_norm(x: np.ndarray, layer) -> np.ndarray:
    return layer.bn_scale * (x - layer.bn_mean) / np.sqrt(layer.bn_var + BN_EPS) + layer.bn_shift


def _attention_edges(g: WeightedGraph) -> tuple[np.ndarray, np.ndarray]:
    # both directions of every edge plus a self-loop per node
    n = g.node_count
    src = np.concatenate([g.u, g.v, np.arange(n)])
    dst = np.concatenate([g.v, g.u, np.arange(n)])
    order = np.lexsort((src, dst))
    return src[order], dst[order]


def _gat_layer(
    h: np.ndarray, layer: GatLayerWeights, src: np.ndarray, dst: np.ndarray, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Returns (output (n, heads*head_dim), attention (edges, heads))."""
    z = np.einsum("nf,hfd->nhd", h, layer.w)          # (n, heads, d)
    s_src = np.einsum("nhd,hd->nh", z, layer.a_src)   # (n, heads)
    s_dst = np.einsum("nhd,hd->nh", z, layer.a_dst)
    scores = _leaky_relu(s_src[src] + s_dst[dst])     # (E, heads)
    # segment softmax over each destination's neighborhood (dst is sorted)
    seg_starts = np.flatnonzero(np.r_[True, dst[1:] != dst[:-1]])
    seg_max = np.maximum.reduceat(scores, seg_starts, axis=0)
    seg_ids = np.repeat(np.arange(len(seg_starts)), np.diff(np.r_[seg_starts, len(dst)]))
    ex = np.exp(scores - seg_max[seg_ids])
    denom = np.add.reduceat(ex, seg_starts, axis=0)
    alpha = ex / denom[seg_ids]
    msg = alpha[:, :, None] * z[src]                  # (E, heads, d)
    out = np.zeros_like(z)
    np.add.at(out, dst, msg)
    out = out.reshape(n, -1) + layer.bias
    return out, alpha


def gat_forward(
    g: WeightedGraph,
    features: FeatureMatrix,
    weights: ModelWeights,
    return_attention: bool = False,
):
    """Deterministic forward pass; returns per-node scores in [0, 1].

    With `return_attention`, also returns per-layer attention coefficient
    arrays (edges-with-self-loops x heads) and the (src, dst) edge arrays.
    """
    weights.validate()
    if features.values.shape != (g.node_count, weights.input_dim):
        raise WeightSchemaError(
            f"feature matrix {features.values.shape} does not match "
            f"(node_count, input_dim)=({g.node_count}, {weights.input_dim})"
        )
    src, dst = _attention_edges(g)
    h = features.values
    attention = {}
    for name in GAT_LAYERS:
        layer = getattr(weights, name)
        h, alpha = _gat_layer(h, layer, src, dst, g.node_count)
        attention[name] = alpha
        h = _elu(_batch_norm(h, layer))
        if np.any(np.isnan(h)):
            raise NumericError(f"NaN after layer {name}")
    for name in DENSE_LAYERS:
        layer = getattr(weights, name)
        h = h @ layer.w + layer.bias
        h = _elu(_batch_norm(h, layer))
        if np.any(np.isnan(h)):
            raise NumericError(f"NaN after layer {name}")
    out = h @ weights.output.w + weights.output.bias
    scores = 1.0 / (1.0 + np.exp(-out[:, 0]))
    if np.any(np.isnan(scores)):
        raise NumericError("NaN after output layer")
    if return_attention:
        return scores, attention, (src, dst)
    return scores


def detour_margin_scores(g: WeightedGraph, mask: EdgeMask, query: PathQuery) -> np.ndarray:
    """Heuristic scorer: nodes on short source-target detours score high.

    margin(v) = dist(s,v) + dist(v,t) - length(p*); score 1 when the margin
    is non-positive, exp(-margin / mean edge weight) otherwise; unreachable
    nodes score 0 and target-path nodes are forced to 1.
    """
    ds = dijkstra(g, mask, query.source).dist
    dt = dijkstra(g, mask, query.target).dist
    margin = ds + dt - query.target_path.length
    mean_w = float(g.weight.mean()) if g.edge_count else 1.0
    with np.errstate(invalid="ignore"):
        scores = np.where(margin <= 0, 1.0, np.exp(-np.minimum(margin, 700 * mean_w) / mean_w))
    scores[~np.isfinite(ds) | ~np.isfinite(dt)] = 0.0
    scores[list(query.target_path.nodes)] = 1.0
    return scores


def constant_scores(g: WeightedGraph) -> np.ndarray:
    """All-equal scores; thresholding then selects every node."""
    return np.full(g.node_count, 0.5)
