"""Improved score-level fusion of the two model score populations.

Each model's scores are normalized by the min-max range scaled by a
per-sample local factor (the sample's deviation from the population median
divided by the mean deviation), then fused as a convex combination whose
weight comes from the coefficient of variation of the target matrix.
Decisions compare the fused score against a threshold (0.5 by default,
0 = real, 1 = fake).

Denominators carry an epsilon guard so degenerate populations produce
flagged, defined outputs instead of NaNs. All batch statistics can be
frozen from a training batch (`FusionStats`) and applied to new scores,
which keeps test-time fusion free of test-label leakage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "EPSILON",
    "ScoreBatch",
    "FusionResult",
    "ModelScoreStats",
    "FusionStats",
    "local_factor",
    "improved_normalize",
    "error_terms",
    "coefficient_cv",
    "fuse",
    "one_hot_targets",
]

EPSILON = 1e-9


def _guard(denominator: np.ndarray | float):
    """Push denominators with magnitude below EPSILON away from zero."""
    den = np.asarray(denominator, dtype=np.float64)
    mag = np.abs(den)
    sign = np.where(den >= 0, 1.0, -1.0)
    guarded = np.where(mag < EPSILON, sign * EPSILON, den)
    return guarded, bool(np.any(mag < EPSILON))


def _check_scores(scores) -> np.ndarray:
    arr = np.asarray(scores, dtype=np.float64).ravel()
    if arr.size < 2:
        raise DomainError("need at least 2 scores")
    if not np.all(np.isfinite(arr)):
        raise DomainError("scores must be finite")
    return arr


def one_hot_targets(labels) -> np.ndarray:
    """Binary labels {0 real, 1 fake} to one-hot rows over (real, fake)."""
    labels = np.asarray(labels).astype(int).ravel()
    if labels.size == 0:
        raise DomainError("empty labels")
    if np.any((labels != 0) & (labels != 1)):
        raise DomainError("labels must be 0 or 1")
    out = np.zeros((labels.size, 2))
    out[np.arange(labels.size), labels] = 1.0
    return out


@dataclass
class ModelScoreStats:
    """Frozen batch statistics of one model's score population."""

    minimum: float
    maximum: float
    median: float
    mean_deviation: float  # mean of (score - median) over the batch

    @classmethod
    def from_scores(cls, scores) -> "ModelScoreStats":
        arr = _check_scores(scores)
        med = float(np.median(arr))
        return cls(
            minimum=float(arr.min()),
            maximum=float(arr.max()),
            median=med,
            mean_deviation=float(np.mean(arr - med)),
        )


def local_factor(scores) -> tuple[np.ndarray, bool]:
    """Per-sample deviation from the median over the mean deviation.

    Returns (factors, guarded). When the mean deviation collapses below
    the epsilon guard (constant or symmetric populations) every factor is
    defined as 1 and the flag is set.
    """
    arr = _check_scores(scores)
    stats = ModelScoreStats.from_scores(arr)
    return _local_factor_from_stats(arr, stats)


def _local_factor_from_stats(arr: np.ndarray, stats: ModelScoreStats) -> tuple[np.ndarray, bool]:
    if abs(stats.mean_deviation) < EPSILON:
        return np.ones_like(arr), True
    return (arr - stats.median) / stats.mean_deviation, False


def improved_normalize(scores, literal_precedence: bool = False) -> tuple[np.ndarray, bool]:
    """Min-max normalization scaled per sample by the local factor.

    Default reading: (s - min) / ((max - min) * LF_s). The literal
    operator-precedence reading (max - min * LF_s) of the source formula
    is available behind `literal_precedence` for comparison. Returns
    (normalized, flagged); flagged covers a degenerate range or a guarded
    local factor. When every LF is 1 this reduces exactly to plain min-max
    normalization; a zero range yields zeros.
    """
    arr = _check_scores(scores)
    stats = ModelScoreStats.from_scores(arr)
    return _normalize_with_stats(arr, stats, literal_precedence)


def _normalize_with_stats(
    arr: np.ndarray, stats: ModelScoreStats, literal_precedence: bool
) -> tuple[np.ndarray, bool]:
    span = stats.maximum - stats.minimum
    if span == 0.0:
        return np.zeros_like(arr), True
    factors, lf_guarded = _local_factor_from_stats(arr, stats)
    if literal_precedence:
        denominator = stats.maximum - stats.minimum * factors
    else:
        denominator = span * factors
    denominator, den_guarded = _guard(denominator)
    return (arr - stats.minimum) / denominator, lf_guarded or den_guarded


def error_terms(targets) -> tuple[float, float]:
    """(E_plus, E_minus) from the target matrix.

    E_minus is the root of summed squared gaps to each row's maximum
    (missed positives); E_plus uses each row's minimum (false alarms).
    """
    t = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if t.size == 0:
        raise DomainError("empty target matrix")
    row_max = t.max(axis=1, keepdims=True)
    row_min = t.min(axis=1, keepdims=True)
    e_minus = float(np.sqrt(np.sum((row_max - t) ** 2)))
    e_plus = float(np.sqrt(np.sum((row_min - t) ** 2)))
    return e_plus, e_minus


def coefficient_cv(e_plus: float, e_minus: float) -> tuple[float, bool]:
    """C_v = E_minus / (E_plus + E_minus); the 0/0 case is 0.5, flagged."""
    if e_plus < 0 or e_minus < 0:
        raise DomainError("error terms must be non-negative")
    total = e_plus + e_minus
    if total == 0.0:
        return 0.5, True
    return e_minus / total, False


@dataclass
class ScoreBatch:
    """Paired per-sample scores of the two models plus one-hot targets."""

    bigru_scores: np.ndarray
    dbn_scores: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        self.bigru_scores = _check_scores(self.bigru_scores)
        self.dbn_scores = _check_scores(self.dbn_scores)
        self.targets = np.atleast_2d(np.asarray(self.targets, dtype=np.float64))
        if not (len(self.bigru_scores) == len(self.dbn_scores) == self.targets.shape[0]):
            raise DomainError("score vectors and targets must have equal length")


@dataclass
class FusionResult:
    sc_bigru: np.ndarray
    sc_dbn: np.ndarray
    c_v: float
    fused: np.ndarray
    decisions: np.ndarray  # 1 where fused >= threshold
    threshold: float
    flagged: bool  # any epsilon guard / degenerate statistic fired


@dataclass
class FusionStats:
    """Everything fusion needs, frozen from a training batch."""

    bigru: ModelScoreStats
    dbn: ModelScoreStats
    c_v: float
    threshold: float = 0.5
    literal_precedence: bool = False
    flagged: bool = False

    @classmethod
    def fit(
        cls,
        batch: ScoreBatch,
        threshold: float = 0.5,
        literal_precedence: bool = False,
    ) -> "FusionStats":
        e_plus, e_minus = error_terms(batch.targets)
        c_v, cv_flag = coefficient_cv(e_plus, e_minus)
        return cls(
            bigru=ModelScoreStats.from_scores(batch.bigru_scores),
            dbn=ModelScoreStats.from_scores(batch.dbn_scores),
            c_v=c_v,
            threshold=threshold,
            literal_precedence=literal_precedence,
            flagged=cv_flag,
        )

    def apply(self, bigru_scores, dbn_scores) -> FusionResult:
        """Fuse new scores under the frozen statistics."""
        b = np.asarray(bigru_scores, dtype=np.float64).ravel()
        d = np.asarray(dbn_scores, dtype=np.float64).ravel()
        if b.size != d.size or b.size == 0:
            raise DomainError("score vectors must be non-empty and equal length")
        sc_b, flag_b = _normalize_with_stats(b, self.bigru, self.literal_precedence)
        sc_d, flag_d = _normalize_with_stats(d, self.dbn, self.literal_precedence)
        fused = self.c_v * sc_b + (1.0 - self.c_v) * sc_d
        decisions = (fused >= self.threshold).astype(int)
        return FusionResult(
            sc_bigru=sc_b,
            sc_dbn=sc_d,
            c_v=self.c_v,
            fused=fused,
            decisions=decisions,
            threshold=self.threshold,
            flagged=self.flagged or flag_b or flag_d,
        )


def fuse(batch: ScoreBatch, threshold: float = 0.5, literal_precedence: bool = False) -> FusionResult:
    """Batch fusion: normalize both populations on their own statistics,
    weight by the target-derived C_v, and threshold the fused score."""
    stats = FusionStats.fit(batch, threshold=threshold, literal_precedence=literal_precedence)
    return stats.apply(batch.bigru_scores, batch.dbn_scores)
