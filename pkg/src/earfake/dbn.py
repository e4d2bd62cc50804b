"""Stacked restricted Boltzmann machines with a logistic scoring head.

Pretraining is greedy and layer-wise: each RBM is trained with one-step
contrastive divergence on the hidden probabilities propagated through the
already-trained layers below it. The deterministic forward pass propagates
probabilities (mean-field, no sampling) so the score is reproducible; the
flat weight vector (see `flatten_w2`) makes the whole stack tunable by a
gradient-free optimizer.

`rbm_exact_log_partition` enumerates every binary configuration and exists
purely as a small-model test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .activations import logistic_sigmoid
from .errors import DomainError

__all__ = [
    "RbmLayer",
    "DbnModel",
    "rbm_hidden_probs",
    "rbm_visible_probs",
    "rbm_cd1_update",
    "rbm_exact_log_partition",
    "dbn_pretrain",
    "dbn_forward",
    "dbn_forward_batch",
    "flatten_w2",
    "unflatten_w2",
    "w2_param_count",
]


@dataclass
class RbmLayer:
    """One RBM: weight matrix (hidden x visible) and the two bias vectors."""

    weights: np.ndarray
    visible_bias: np.ndarray
    hidden_bias: np.ndarray

    def __post_init__(self):
        h, v = self.weights.shape
        if self.visible_bias.shape != (v,) or self.hidden_bias.shape != (h,):
            raise DomainError("RBM bias shapes inconsistent with weight matrix")

    @property
    def n_visible(self) -> int:
        return self.weights.shape[1]

    @property
    def n_hidden(self) -> int:
        return self.weights.shape[0]


@dataclass
class DbnModel:
    layers: list
    head_w: np.ndarray  # (top hidden dim,)
    head_b: float

    def __post_init__(self):
        for lower, upper in zip(self.layers, self.layers[1:]):
            if lower.n_hidden != upper.n_visible:
                raise DomainError("adjacent RBM layer dimensions do not chain")
        if self.head_w.shape != (self.layers[-1].n_hidden,):
            raise DomainError("head length must equal top hidden dim")

    @property
    def dims(self) -> list[int]:
        return [self.layers[0].n_visible] + [layer.n_hidden for layer in self.layers]


def rbm_hidden_probs(layer: RbmLayer, v) -> np.ndarray:
    """P(h_j = 1 | v) = sigmoid(W v + hidden_bias). Accepts vectors or batches."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != layer.n_visible:
        raise DomainError(f"visible dim {v.shape[-1]} != {layer.n_visible}")
    return logistic_sigmoid(v @ layer.weights.T + layer.hidden_bias)


def rbm_visible_probs(layer: RbmLayer, h) -> np.ndarray:
    """P(v_i = 1 | h) = sigmoid(W^T h + visible_bias)."""
    h = np.asarray(h, dtype=np.float64)
    if h.shape[-1] != layer.n_hidden:
        raise DomainError(f"hidden dim {h.shape[-1]} != {layer.n_hidden}")
    return logistic_sigmoid(h @ layer.weights + layer.visible_bias)


def rbm_cd1_update(layer: RbmLayer, batch, learning_rate: float, rng) -> RbmLayer:
    """One CD-1 step on a batch; returns a new layer, inputs untouched.

    The Gibbs reconstruction samples both the hidden state and the
    reconstructed visibles; hidden statistics on each side use the
    conditional probabilities. With sampled (not mean-field) visibles the
    negative phase is exactly unbiased when the data already follows the
    model, which is what the enumeration oracle checks.
    """
    data = np.atleast_2d(np.asarray(batch, dtype=np.float64))
    if data.shape[0] == 0:
        raise DomainError("empty batch")
    if data.shape[1] != layer.n_visible:
        raise DomainError(f"batch dim {data.shape[1]} != {layer.n_visible}")
    if learning_rate < 0:
        raise DomainError("learning_rate must be >= 0")

    pos_h = rbm_hidden_probs(layer, data)
    h_sample = (rng.random(pos_h.shape) < pos_h).astype(np.float64)
    recon_v = (rng.random(data.shape) < rbm_visible_probs(layer, h_sample)).astype(np.float64)
    neg_h = rbm_hidden_probs(layer, recon_v)

    n = data.shape[0]
    grad_w = (pos_h.T @ data - neg_h.T @ recon_v) / n
    grad_vb = (data - recon_v).mean(axis=0)
    grad_hb = (pos_h - neg_h).mean(axis=0)
    return RbmLayer(
        weights=layer.weights + learning_rate * grad_w,
        visible_bias=layer.visible_bias + learning_rate * grad_vb,
        hidden_bias=layer.hidden_bias + learning_rate * grad_hb,
    )


def rbm_exact_log_partition(layer: RbmLayer) -> float:
    """log Z by full enumeration of all binary (v, h) configurations.

    Refuses models with more than 20 total units: the 2^(v+h) sum is the
    point of this oracle and must stay cheap.
    """
    nv, nh = layer.n_visible, layer.n_hidden
    if nv + nh > 20:
        raise DomainError(f"{nv + nh} units exceed the 20-unit enumeration limit")
    v_states = np.array(np.meshgrid(*[[0.0, 1.0]] * nv, indexing="ij")).reshape(nv, -1).T
    h_states = np.array(np.meshgrid(*[[0.0, 1.0]] * nh, indexing="ij")).reshape(nh, -1).T
    # energy E(v,h) = -b.v - c.h - h.W.v; log Z = logsumexp(-E)
    neg_energy = (
        v_states @ layer.visible_bias
        + (h_states @ layer.hidden_bias)[:, None]
        + h_states @ layer.weights @ v_states.T
    )
    m = neg_energy.max()
    return float(m + np.log(np.exp(neg_energy - m).sum()))


def _init_layer(n_visible: int, n_hidden: int, rng) -> RbmLayer:
    return RbmLayer(
        weights=0.01 * rng.standard_normal((n_hidden, n_visible)),
        visible_bias=np.zeros(n_visible),
        hidden_bias=np.zeros(n_hidden),
    )


def dbn_pretrain(dims, data, epochs: int, learning_rate: float, rng) -> DbnModel:
    """Greedy layer-wise CD-1 pretraining.

    dims is [visible, hidden_1, ..., hidden_k]. Layer l+1 trains on the
    hidden probabilities of the already-trained layers 1..l (which are
    frozen once their phase ends). Each epoch is one full-batch CD-1 step.
    The logistic head starts at zero.
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise DomainError("need at least [visible, hidden] dims")
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    if data.shape[0] == 0:
        raise DomainError("empty pretraining data")
    if data.shape[1] != dims[0]:
        raise DomainError(f"data dim {data.shape[1]} != visible dim {dims[0]}")
    if np.any(data < 0) or np.any(data > 1):
        raise DomainError("pretraining data must lie in [0, 1]")
    if epochs < 0:
        raise DomainError("epochs must be >= 0")

    layers = []
    level_input = data
    for n_visible, n_hidden in zip(dims, dims[1:]):
        layer = _init_layer(n_visible, n_hidden, rng)
        for _ in range(epochs):
            layer = rbm_cd1_update(layer, level_input, learning_rate, rng)
        layers.append(layer)
        level_input = rbm_hidden_probs(layer, level_input)
    return DbnModel(layers=layers, head_w=np.zeros(dims[-1]), head_b=0.0)


def dbn_forward(model: DbnModel, x) -> float:
    """Deterministic mean-field pass through all layers, then the logistic head."""
    return float(dbn_forward_batch(model, np.atleast_2d(np.asarray(x, dtype=np.float64)))[0])


def dbn_forward_batch(model: DbnModel, x: np.ndarray) -> np.ndarray:
    """Vectorized dbn_forward over a (batch, visible) array."""
    p = np.asarray(x, dtype=np.float64)
    if p.ndim != 2:
        raise DomainError("expected a (batch, visible) array")
    if p.shape[1] != model.layers[0].n_visible:
        raise DomainError(f"input dim {p.shape[1]} != {model.layers[0].n_visible}")
    for layer in model.layers:
        p = rbm_hidden_probs(layer, p)
    return logistic_sigmoid(p @ model.head_w + model.head_b)


def w2_param_count(dims) -> int:
    """Sum over layers of (h*v + v + h), plus the head (top hidden + 1)."""
    dims = [int(d) for d in dims]
    total = sum(h * v + v + h for v, h in zip(dims, dims[1:]))
    return total + dims[-1] + 1


def flatten_w2(model: DbnModel) -> np.ndarray:
    """Per layer: weights (row-major), visible bias, hidden bias; then head."""
    chunks = []
    for layer in model.layers:
        chunks.extend([layer.weights.ravel(), layer.visible_bias, layer.hidden_bias])
    chunks.append(model.head_w)
    chunks.append(np.array([model.head_b]))
    return np.concatenate(chunks)


def unflatten_w2(flat, dims) -> DbnModel:
    dims = [int(d) for d in dims]
    flat = np.asarray(flat, dtype=np.float64)
    expected = w2_param_count(dims)
    if flat.shape != (expected,):
        raise DomainError(f"flat length {flat.shape} != expected ({expected},)")
    pos = 0

    def take(size):
        nonlocal pos
        out = flat[pos : pos + size].copy()
        pos += size
        return out

    layers = []
    for v, h in zip(dims, dims[1:]):
        layers.append(
            RbmLayer(
                weights=take(h * v).reshape(h, v),
                visible_bias=take(v),
                hidden_bias=take(h),
            )
        )
    head_w = take(dims[-1])
    head_b = float(flat[pos])
    return DbnModel(layers=layers, head_w=head_w, head_b=head_b)
