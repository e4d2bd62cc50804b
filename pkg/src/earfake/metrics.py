"""Binary-classification metrics, ROC/AUC, and multi-run statistics.

The positive class is "fake" (label 1). Ratios with zero denominators are
reported as 0 and flagged instead of NaN so report tables stay total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ConfusionCounts",
    "RunStatistics",
    "confusion",
    "metric_suite",
    "METRIC_NAMES",
    "roc_curve",
    "run_statistics",
]

METRIC_NAMES = (
    "accuracy",
    "precision",
    "sensitivity",
    "specificity",
    "f_measure",
    "mcc",
    "npv",
    "fnr",
    "fpr",
)


@dataclass
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise DomainError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(decisions, labels) -> ConfusionCounts:
    d = np.asarray(decisions).astype(int).ravel()
    y = np.asarray(labels).astype(int).ravel()
    if d.size != y.size:
        raise DomainError("decisions and labels must have equal length")
    return ConfusionCounts(
        tp=int(np.sum((d == 1) & (y == 1))),
        tn=int(np.sum((d == 0) & (y == 0))),
        fp=int(np.sum((d == 1) & (y == 0))),
        fn=int(np.sum((d == 0) & (y == 1))),
    )


def _ratio(num: float, den: float, flagged: set, name: str) -> float:
    if den == 0:
        flagged.add(name)
        return 0.0
    return num / den


def metric_suite(c: ConfusionCounts) -> tuple[dict[str, float], set[str]]:
    """The nine tabulated metrics. Returns (values, flagged-metric names).

    FNR/FPR are the exact complements of sensitivity/specificity whenever
    those are defined, and share their flags otherwise.
    """
    if c.total == 0:
        raise DomainError("empty confusion counts")
    flagged: set[str] = set()
    tp, tn, fp, fn = c.tp, c.tn, c.fp, c.fn
    sensitivity = _ratio(tp, tp + fn, flagged, "sensitivity")
    specificity = _ratio(tn, tn + fp, flagged, "specificity")
    precision = _ratio(tp, tp + fp, flagged, "precision")
    npv = _ratio(tn, tn + fn, flagged, "npv")

    values = {
        "accuracy": (tp + tn) / c.total,
        "precision": precision,
        "sensitivity": sensitivity,
        "specificity": specificity,
    }
    if precision + sensitivity == 0:
        flagged.add("f_measure")
        values["f_measure"] = 0.0
    else:
        values["f_measure"] = 2 * precision * sensitivity / (precision + sensitivity)

    mcc_den = math.sqrt(float(tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
    if mcc_den == 0:
        flagged.add("mcc")
        values["mcc"] = 0.0
    else:
        values["mcc"] = (tp * tn - fp * fn) / mcc_den

    values["npv"] = npv
    values["fnr"] = 0.0 if "sensitivity" in flagged else 1.0 - sensitivity
    values["fpr"] = 0.0 if "specificity" in flagged else 1.0 - specificity
    if "sensitivity" in flagged:
        flagged.add("fnr")
    if "specificity" in flagged:
        flagged.add("fpr")
    return values, flagged


def roc_curve(scores, labels) -> tuple[np.ndarray, float]:
    """Threshold-sweep ROC points and trapezoidal AUC.

    Thresholds run over the descending unique scores with the decision
    rule score >= threshold; the point list starts at (0, 0) and ends at
    (1, 1). Both classes must be present.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).astype(int).ravel()
    if s.size != y.size or s.size == 0:
        raise DomainError("scores and labels must be non-empty and equal length")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise DomainError("ROC needs both classes present")

    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    tp = np.cumsum(y_sorted == 1)
    fp = np.cumsum(y_sorted == 0)
    # keep the last index of each tied score block
    distinct = np.nonzero(np.diff(s_sorted))[0]
    idx = np.concatenate([distinct, [s.size - 1]])
    tpr = np.concatenate([[0.0], tp[idx] / n_pos])
    fpr = np.concatenate([[0.0], fp[idx] / n_neg])
    points = np.column_stack([fpr, tpr])
    trapezoid = getattr(np, "trapezoid", np.trapz)
    auc = float(trapezoid(tpr, fpr))
    return points, auc


@dataclass
class RunStatistics:
    mean: float
    maximum: float
    std_deviation: float
    median: float
    minimum: float

    def as_row(self) -> tuple[float, float, float, float, float]:
        return (self.mean, self.maximum, self.std_deviation, self.median, self.minimum)


def run_statistics(values) -> RunStatistics:
    """Mean/max/sample-std/median/min of per-run metric values.

    Sample standard deviation (n-1); a singleton has std 0. The median of
    an even count is the midpoint of the two central values.
    """
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise DomainError("need at least one value")
    std = 0.0 if arr.size == 1 else float(np.std(arr, ddof=1))
    return RunStatistics(
        mean=float(arr.mean()),
        maximum=float(arr.max()),
        std_deviation=std,
        median=float(np.median(arr)),
        minimum=float(arr.min()),
    )
