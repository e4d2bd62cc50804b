"""Gated recurrent unit cell and the bidirectional sequence scorer.

The cell follows the reset/update-gate formulation: the new state is the
convex combination (1 - Z) * h_prev + Z * H' of the previous state and the
tanh candidate. The bidirectional model runs one scan forward and one
backward from zero initial states and concatenates each direction's final
state; a logistic readout maps that concatenation to a score in (0, 1).

All weights live in a single flat vector (see `flatten_w1`) so a
gradient-free optimizer can tune them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .activations import logistic_sigmoid
from .errors import DomainError

__all__ = [
    "GruWeights",
    "BiGruModel",
    "gru_step",
    "bigru_forward",
    "bigru_score",
    "bigru_score_batch",
    "flatten_w1",
    "unflatten_w1",
    "w1_param_count",
]


@dataclass
class GruWeights:
    """Weights of one GRU direction: gate input/recurrent matrices + biases."""

    w_r: np.ndarray  # (hidden, input)
    w_z: np.ndarray
    w_h: np.ndarray
    v_r: np.ndarray  # (hidden, hidden)
    v_z: np.ndarray
    v_h: np.ndarray
    g_r: np.ndarray  # (hidden,)
    g_z: np.ndarray
    g_h: np.ndarray

    def __post_init__(self):
        h, d = self.w_r.shape
        for name in ("w_r", "w_z", "w_h"):
            if getattr(self, name).shape != (h, d):
                raise DomainError(f"{name} shape mismatch")
        for name in ("v_r", "v_z", "v_h"):
            if getattr(self, name).shape != (h, h):
                raise DomainError(f"{name} shape mismatch")
        for name in ("g_r", "g_z", "g_h"):
            if getattr(self, name).shape != (h,):
                raise DomainError(f"{name} shape mismatch")

    @property
    def hidden_dim(self) -> int:
        return self.w_r.shape[0]

    @property
    def input_dim(self) -> int:
        return self.w_r.shape[1]


@dataclass
class BiGruModel:
    forward: GruWeights
    backward: GruWeights
    readout_w: np.ndarray  # (2 * hidden,)
    readout_b: float

    def __post_init__(self):
        if (self.forward.hidden_dim, self.forward.input_dim) != (
            self.backward.hidden_dim,
            self.backward.input_dim,
        ):
            raise DomainError("forward/backward dimensions differ")
        if self.readout_w.shape != (2 * self.forward.hidden_dim,):
            raise DomainError("readout length must be 2 * hidden_dim")

    @property
    def hidden_dim(self) -> int:
        return self.forward.hidden_dim

    @property
    def input_dim(self) -> int:
        return self.forward.input_dim


def gru_step(w: GruWeights, x_t: np.ndarray, h_prev: np.ndarray) -> np.ndarray:
    """One cell update. Accepts vectors or batches (leading batch axis)."""
    x_t = np.asarray(x_t, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    if x_t.shape[-1] != w.input_dim or h_prev.shape[-1] != w.hidden_dim:
        raise DomainError(
            f"expected input {w.input_dim} / hidden {w.hidden_dim}, "
            f"got {x_t.shape[-1]} / {h_prev.shape[-1]}"
        )
    r = logistic_sigmoid(x_t @ w.w_r.T + h_prev @ w.v_r.T + w.g_r)
    z = logistic_sigmoid(x_t @ w.w_z.T + h_prev @ w.v_z.T + w.g_z)
    h_cand = np.tanh(x_t @ w.w_h.T + (r * h_prev) @ w.v_h.T + w.g_h)
    return (1.0 - z) * h_prev + z * h_cand


def _scan(w: GruWeights, sequence: np.ndarray) -> np.ndarray:
    h = np.zeros(w.hidden_dim)
    for x_t in sequence:
        h = gru_step(w, x_t, h)
    return h


def bigru_forward(model: BiGruModel, sequence) -> np.ndarray:
    """Final-state concatenation [forward scan of t=1..T | backward scan of t=T..1].

    Both directions start from zero states and consume the whole sequence,
    so each half summarizes the full input.
    """
    seq = np.asarray(sequence, dtype=np.float64)
    if seq.ndim == 1:
        seq = seq[None, :]
    if seq.shape[0] == 0:
        raise DomainError("empty sequence")
    if seq.shape[1] != model.input_dim:
        raise DomainError(f"sequence feature dim {seq.shape[1]} != {model.input_dim}")
    return np.concatenate([_scan(model.forward, seq), _scan(model.backward, seq[::-1])])


def bigru_score(model: BiGruModel, sequence) -> float:
    """Logistic readout of the final-state concatenation; always in (0, 1)."""
    state = bigru_forward(model, sequence)
    return float(logistic_sigmoid(state @ model.readout_w + model.readout_b))


def bigru_score_batch(model: BiGruModel, sequences: np.ndarray) -> np.ndarray:
    """Vectorized scores for a (batch, time, feature) array of equal-length sequences.

    Matches mapping `bigru_score` over the batch up to BLAS rounding.
    """
    seqs = np.asarray(sequences, dtype=np.float64)
    if seqs.ndim != 3:
        raise DomainError("expected a (batch, time, feature) array")
    if seqs.shape[1] == 0:
        raise DomainError("empty sequence")
    if seqs.shape[2] != model.input_dim:
        raise DomainError(f"sequence feature dim {seqs.shape[2]} != {model.input_dim}")
    b = seqs.shape[0]
    h_f = np.zeros((b, model.hidden_dim))
    h_b = np.zeros((b, model.hidden_dim))
    for t in range(seqs.shape[1]):
        h_f = gru_step(model.forward, seqs[:, t, :], h_f)
        h_b = gru_step(model.backward, seqs[:, seqs.shape[1] - 1 - t, :], h_b)
    state = np.concatenate([h_f, h_b], axis=1)
    return logistic_sigmoid(state @ model.readout_w + model.readout_b)


_FIELDS = ("w_r", "w_z", "w_h", "v_r", "v_z", "v_h", "g_r", "g_z", "g_h")


def w1_param_count(input_dim: int, hidden_dim: int) -> int:
    """Total flat length: 3 gates x (input + recurrent + bias) per direction + readout."""
    per_direction = 3 * (hidden_dim * input_dim + hidden_dim * hidden_dim + hidden_dim)
    return 2 * per_direction + 2 * hidden_dim + 1


def flatten_w1(model: BiGruModel) -> np.ndarray:
    """Row-major layout: forward gates, backward gates, readout weights, readout bias."""
    chunks = []
    for direction in (model.forward, model.backward):
        for name in _FIELDS:
            chunks.append(getattr(direction, name).ravel())
    chunks.append(model.readout_w)
    chunks.append(np.array([model.readout_b]))
    return np.concatenate(chunks)


def unflatten_w1(flat, input_dim: int, hidden_dim: int) -> BiGruModel:
    flat = np.asarray(flat, dtype=np.float64)
    expected = w1_param_count(input_dim, hidden_dim)
    if flat.shape != (expected,):
        raise DomainError(f"flat length {flat.shape} != expected ({expected},)")
    shapes = {
        "w_r": (hidden_dim, input_dim),
        "w_z": (hidden_dim, input_dim),
        "w_h": (hidden_dim, input_dim),
        "v_r": (hidden_dim, hidden_dim),
        "v_z": (hidden_dim, hidden_dim),
        "v_h": (hidden_dim, hidden_dim),
        "g_r": (hidden_dim,),
        "g_z": (hidden_dim,),
        "g_h": (hidden_dim,),
    }
    pos = 0

    def take(shape):
        nonlocal pos
        size = int(np.prod(shape))
        out = flat[pos : pos + size].reshape(shape).copy()
        pos += size
        return out

    directions = []
    for _ in range(2):
        directions.append(GruWeights(**{name: take(shapes[name]) for name in _FIELDS}))
    readout_w = take((2 * hidden_dim,))
    readout_b = float(flat[pos])
    return BiGruModel(directions[0], directions[1], readout_w, readout_b)
