from __future__ import annotations

import numpy as np
import pytest

from crspredict.dataset import LabeledDataset
from crspredict.errors import DegenerateClass, LengthMismatch
from crspredict.metrics import (
    ConfusionMatrix,
    confusion,
    format_report,
    report,
    round_half_up,
    stratified_folds,
    stratified_split,
)


def make_dataset(n0: int, n1: int, seed: int = 0) -> LabeledDataset:
    rng = np.random.default_rng(seed)
    y = np.array([0] * n0 + [1] * n1)
    y = rng.permutation(y)
    X = rng.normal(size=(n0 + n1, 3))
    return LabeledDataset(X=X, y=y, columns=["a", "b", "c"])


# ----- stratified splitting ---------------------------------------------------


def test_split_reproduces_cohort_counts():
    data = make_dataset(101, 423, seed=1)
    split = stratified_split(data, 0.2, seed=5)
    test = data.subset_by_ids(list(split.test_ids))
    train = data.subset_by_ids(list(split.train_ids))
    assert test.class_counts() == (20, 85)
    assert train.class_counts() == (81, 338)


def test_split_rounding_small():
    data = make_dataset(5, 5)
    split = stratified_split(data, 0.2, seed=0)
    test = data.subset_by_ids(list(split.test_ids))
    assert test.class_counts() == (1, 1)


def test_split_deterministic_per_seed():
    data = make_dataset(30, 70)
    a = stratified_split(data, 0.25, seed=9)
    b = stratified_split(data, 0.25, seed=9)
    c = stratified_split(data, 0.25, seed=10)
    assert a == b
    assert a.test_ids != c.test_ids


def test_split_partition_covers_everything():
    data = make_dataset(40, 60)
    split = stratified_split(data, 0.3, seed=2)
    assert set(split.train_ids) | set(split.test_ids) == set(data.ids)
    assert set(split.train_ids) & set(split.test_ids) == set()


def test_split_degenerate_class():
    data = make_dataset(1, 50)
    with pytest.raises(DegenerateClass):
        stratified_split(data, 0.2, seed=0)


def test_split_prevalence_preserved_property():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n0 = int(rng.integers(10, 80))
        n1 = int(rng.integers(10, 80))
        frac = float(rng.uniform(0.1, 0.5))
        data = make_dataset(n0, n1, seed=int(rng.integers(1000)))
        split = stratified_split(data, frac, seed=int(rng.integers(1000)))
        test = data.subset_by_ids(list(split.test_ids))
        overall = n1 / (n0 + n1)
        assert abs(test.prevalence() - overall) <= 1.0 / len(split.test_ids)


def test_round_half_up():
    assert round_half_up(84.6) == 85
    assert round_half_up(20.2) == 20
    assert round_half_up(2.5) == 3
    assert round_half_up(1.0) == 1


# ----- confusion ---------------------------------------------------------------


def test_confusion_perfect_diagonal():
    y = np.array([0] * 20 + [1] * 85)
    cm = confusion(y, y)
    assert cm.counts == ((20, 0), (0, 85))


def test_confusion_constant_predictor():
    y = np.array([0] * 20 + [1] * 85)
    cm = confusion(y, np.ones_like(y))
    assert cm.counts == ((0, 20), (0, 85))


def test_confusion_total_is_n():
    rng = np.random.default_rng(0)
    for _ in range(10):
        n = int(rng.integers(1, 50))
        y = rng.integers(0, 2, n)
        p = rng.integers(0, 2, n)
        assert confusion(y, p).total == n


def test_confusion_length_mismatch():
    with pytest.raises(LengthMismatch):
        confusion([0, 1], [0, 1, 1])
    with pytest.raises(LengthMismatch):
        confusion([], [])


# ----- report: vectors from the printed test-set matrices ----------------------

CM_LR = ((6, 14), (2, 83))
CM_SVM = ((2, 18), (4, 81))
CM_NB = ((20, 0), (74, 11))
CM_MLP = ((9, 11), (5, 80))
CM_RF = ((5, 15), (4, 81))
CM_XGB = ((5, 15), (3, 82))


def test_report_logreg_vector():
    rep = report(ConfusionMatrix(CM_LR))
    assert rep.accuracy == pytest.approx(0.8476, abs=5e-4)
    assert rep.per_class[0].precision == pytest.approx(0.75, abs=5e-4)
    assert rep.per_class[0].recall == pytest.approx(0.30, abs=5e-4)
    assert rep.per_class[0].f1 == pytest.approx(0.4286, abs=5e-4)
    assert rep.per_class[1].precision == pytest.approx(0.8557, abs=5e-4)
    assert rep.per_class[1].recall == pytest.approx(0.9765, abs=5e-4)
    assert rep.per_class[1].f1 == pytest.approx(0.9121, abs=5e-4)
    assert rep.per_class[0].support == 20
    assert rep.per_class[1].support == 85


def test_report_naive_bayes_vector():
    rep = report(ConfusionMatrix(CM_NB))
    assert rep.accuracy == pytest.approx(0.2952, abs=5e-4)
    assert rep.per_class[0].precision == pytest.approx(0.2128, abs=5e-4)
    assert rep.per_class[0].recall == pytest.approx(1.00, abs=5e-4)
    assert rep.per_class[0].f1 == pytest.approx(0.3509, abs=5e-4)
    assert rep.per_class[1].recall == pytest.approx(0.1294, abs=5e-4)


def test_report_mlp_balanced_accuracy():
    rep = report(ConfusionMatrix(CM_MLP))
    assert rep.balanced_accuracy == pytest.approx((9 / 20 + 80 / 85) / 2, abs=1e-12)
    assert rep.balanced_accuracy == pytest.approx(0.6956, abs=5e-4)


def test_report_perfect_predictions():
    y = np.array([0, 1, 1, 0, 1])
    rep = report(confusion(y, y))
    assert rep.accuracy == 1.0
    assert rep.per_class[0].f1 == 1.0
    assert rep.per_class[1].f1 == 1.0
    assert rep.macro_f1 == 1.0


def test_report_constant_predictor_balanced_accuracy():
    y = np.array([0] * 30 + [1] * 70)
    rep = report(confusion(y, np.ones_like(y)))
    assert rep.balanced_accuracy == pytest.approx(0.5)
    rep0 = report(confusion(y, np.zeros_like(y)))
    assert rep0.balanced_accuracy == pytest.approx(0.5)


def test_report_zero_denominator_convention():
    # predictor never emits class 0 -> precision(0) defined as 0, not NaN
    rep = report(ConfusionMatrix(((0, 5), (0, 10))))
    assert rep.per_class[0].precision == 0.0
    assert rep.per_class[0].f1 == 0.0


def test_macro_and_weighted_f1_hand_arithmetic():
    for counts in (CM_LR, CM_SVM, CM_NB, CM_MLP, CM_RF, CM_XGB):
        rep = report(ConfusionMatrix(counts))
        f0, f1 = rep.per_class[0].f1, rep.per_class[1].f1
        s0, s1 = rep.per_class[0].support, rep.per_class[1].support
        assert rep.macro_f1 == pytest.approx((f0 + f1) / 2, abs=1e-12)
        assert rep.weighted_f1 == pytest.approx((f0 * s0 + f1 * s1) / (s0 + s1), abs=1e-12)


def test_second_level_published_matrices():
    # majority vote: accuracy 0.857, P0 0.727, R0 0.400, F1_0 0.516
    rep = report(ConfusionMatrix(((8, 12), (3, 82))))
    assert rep.accuracy == pytest.approx(0.857, abs=5e-4)
    assert rep.per_class[0].precision == pytest.approx(0.727, abs=5e-4)
    assert rep.per_class[0].f1 == pytest.approx(0.516, abs=5e-4)
    assert rep.per_class[1].precision == pytest.approx(0.872, abs=5e-4)
    # stacking: accuracy 0.8095, P0 0.5, F1_0 0.4444, F1_1 0.8851
    rep = report(ConfusionMatrix(((8, 12), (8, 77))))
    assert rep.accuracy == pytest.approx(0.8095, abs=5e-4)
    assert rep.per_class[0].precision == pytest.approx(0.50, abs=5e-4)
    assert rep.per_class[0].f1 == pytest.approx(0.4444, abs=5e-4)
    assert rep.per_class[1].f1 == pytest.approx(0.8851, abs=5e-4)


def test_report_serialization_round_trip():
    rep = report(ConfusionMatrix(CM_LR))
    line = rep.to_json_line()
    assert '"accuracy"' in line
    table = format_report(rep, ConfusionMatrix(CM_LR))
    assert "precision" in table and "balanced acc" in table
    assert "0.8476" in table


# ----- folds -------------------------------------------------------------------


def test_stratified_folds_partition_and_balance():
    y = np.array([0] * 20 + [1] * 80)
    folds = stratified_folds(y, 5, seed=3)
    all_val = np.concatenate([val for _, val in folds])
    assert sorted(all_val.tolist()) == list(range(100))
    for train, val in folds:
        assert set(train) | set(val) == set(range(100))
        assert not set(train) & set(val)
        assert 3 <= np.sum(y[val] == 0) <= 5  # 20 zeros over 5 folds
