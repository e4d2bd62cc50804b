"""Classification metrics, ROC/AUC pair-counting oracle, run statistics."""

import itertools

import numpy as np
import pytest

from earfake.errors import DomainError
from earfake.metrics import (
    METRIC_NAMES,
    ConfusionCounts,
    confusion,
    metric_suite,
    roc_curve,
    run_statistics,
)


def auc_by_pair_counting(scores, labels):
    """Mann-Whitney estimator: P(score_pos > score_neg) + 0.5 P(tie)."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = ties = 0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1
            elif p == q:
                ties += 1
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


class TestConfusion:
    def test_perfect(self):
        c = confusion([1, 0, 1, 0], [1, 0, 1, 0])
        assert (c.fp, c.fn) == (0, 0)
        assert (c.tp, c.tn) == (2, 2)

    def test_inverted(self):
        c = confusion([0, 1, 0, 1], [1, 0, 1, 0])
        assert (c.tp, c.tn) == (0, 0)

    def test_mixed_enumeration(self):
        c = confusion([1, 1, 0, 0], [1, 0, 1, 0])
        assert (c.tp, c.fp, c.fn, c.tn) == (1, 1, 1, 1)

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            confusion([1, 0], [1])


class TestMetricSuite:
    def test_hand_worked_values(self):
        values, flagged = metric_suite(ConfusionCounts(tp=50, tn=40, fp=5, fn=5))
        assert not flagged
        assert values["accuracy"] == pytest.approx(0.9)
        assert values["precision"] == pytest.approx(50 / 55)
        assert values["sensitivity"] == pytest.approx(50 / 55)
        assert values["specificity"] == pytest.approx(40 / 45)
        assert values["npv"] == pytest.approx(40 / 45)

    def test_perfect_classifier(self):
        values, _ = metric_suite(ConfusionCounts(tp=10, tn=12, fp=0, fn=0))
        assert values["accuracy"] == 1.0
        assert values["mcc"] == pytest.approx(1.0)
        assert values["f_measure"] == pytest.approx(1.0)

    def test_all_positive_predictions(self):
        values, flagged = metric_suite(ConfusionCounts(tp=10, tn=0, fp=10, fn=0))
        assert values["specificity"] == 0.0
        assert values["fpr"] == 1.0
        assert "specificity" not in flagged

    def test_complement_identities_on_enumerated_tables(self):
        # every (tp, tn, fp, fn) with total <= 30
        for total in range(1, 31):
            for tp, tn, fp in itertools.product(range(total + 1), repeat=3):
                fn = total - tp - tn - fp
                if fn < 0:
                    continue
                values, flagged = metric_suite(ConfusionCounts(tp, tn, fp, fn))
                if "sensitivity" not in flagged:
                    assert values["fnr"] + values["sensitivity"] == pytest.approx(1.0, abs=1e-15)
                if "specificity" not in flagged:
                    assert values["fpr"] + values["specificity"] == pytest.approx(1.0, abs=1e-15)
                assert -1.0 <= values["mcc"] <= 1.0
                if tp + fn > 0 and tn + fp > 0 and fp == 0 and fn == 0:
                    assert values["mcc"] == pytest.approx(1.0)

    def test_zero_denominator_flags(self):
        values, flagged = metric_suite(ConfusionCounts(tp=0, tn=5, fp=0, fn=0))
        assert values["sensitivity"] == 0.0
        assert {"sensitivity", "precision", "fnr", "f_measure", "mcc"} <= flagged

    def test_all_nine_names_present(self):
        values, _ = metric_suite(ConfusionCounts(1, 1, 1, 1))
        assert tuple(values) == METRIC_NAMES

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            metric_suite(ConfusionCounts(0, 0, 0, 0))


class TestRocCurve:
    def test_perfect_separation(self):
        points, auc = roc_curve([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
        assert auc == pytest.approx(1.0)
        np.testing.assert_array_equal(points[0], [0.0, 0.0])
        np.testing.assert_array_equal(points[-1], [1.0, 1.0])

    def test_identical_scores_diagonal(self):
        points, auc = roc_curve([0.5] * 6, [1, 0, 1, 0, 1, 0])
        assert auc == pytest.approx(0.5)
        assert points.shape[0] == 2  # (0,0) and (1,1): one tied block

    def test_matches_pair_counting_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(4, 201))
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            # quantized scores force plenty of ties
            scores = np.round(rng.random(n), 2)
            _, auc = roc_curve(scores, labels)
            assert auc == pytest.approx(auc_by_pair_counting(scores, labels), abs=1e-10)

    def test_monotone_points(self):
        rng = np.random.default_rng(8)
        labels = rng.integers(0, 2, size=50)
        labels[0], labels[1] = 0, 1
        points, _ = roc_curve(rng.random(50), labels)
        assert np.all(np.diff(points[:, 0]) >= 0)
        assert np.all(np.diff(points[:, 1]) >= 0)

    def test_single_class_refused(self):
        with pytest.raises(DomainError):
            roc_curve([0.1, 0.2], [1, 1])


class TestRunStatistics:
    def test_singleton(self):
        stats = run_statistics([0.9])
        assert stats.mean == stats.median == stats.minimum == stats.maximum == 0.9
        assert stats.std_deviation == 0.0

    def test_two_values_sample_std(self):
        stats = run_statistics([0.0, 1.0])
        assert stats.mean == 0.5
        assert stats.median == 0.5
        assert stats.std_deviation == pytest.approx(0.7071067811865476)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(9)
        values = rng.random(25)
        a = run_statistics(values)
        b = run_statistics(rng.permutation(values))
        assert a == b

    def test_order_invariant_bounds(self):
        stats = run_statistics([3.0, 1.0, 2.0])
        assert stats.minimum <= stats.median <= stats.maximum

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            run_statistics([])
