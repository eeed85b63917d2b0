import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import wilcoxon as scipy_wilcoxon

from fdrisk.eval import (EvaluationReport, FoldPlan, auc, classification_metrics,
                         heldout_permutation_importance, impurity_importance, make_plan,
                         median_selection, pairwise_tests, permutation_importance, pvalue_text,
                         repeated_cv, roc_curve, stratified_folds, metrics_table_text,
                         wilcoxon_signed_rank)
from fdrisk.eval.wilcoxon import exact_null_counts
from fdrisk.exceptions import (DegenerateLabelsError, InfeasibleStratificationError,
                               PairingError, StageError, UnsupportedKindError)
from fdrisk.models import (ClassifierSpec, GradientBoostedTrees, LogisticRegression,
                           RandomForest, SVMClassifier)

from oracles import pair_count_auc, wilcoxon_enumerate


# ---------------------------------------------------------------- folds

def _labels(n, n_pos, seed=0):
    y = np.array([1] * n_pos + [0] * (n - n_pos))
    return np.random.default_rng(seed).permutation(y)


def test_ten_rows_two_folds():
    y = _labels(10, 5)
    f = stratified_folds(y, 2, seed=0)
    for k in range(2):
        assert (f == k).sum() == 5
        assert 2 <= y[f == k].sum() <= 3


def test_cohort_shaped_folds():
    n_pos = round(0.37 * 178)
    y = _labels(178, n_pos)
    plan = make_plan(y, 5, 5, seed=1)
    for r in range(5):
        for k in range(5):
            _, te = plan.split(r, k)
            assert 35 <= len(te) <= 36
            assert 22 <= (y[te] == 0).sum() <= 23
            assert 13 <= (y[te] == 1).sum() <= 14


def test_too_few_positives_is_infeasible():
    with pytest.raises(InfeasibleStratificationError):
        stratified_folds(_labels(20, 3), 5, seed=0)


@given(st.integers(10, 120), st.floats(0.1, 0.9), st.integers(2, 6), st.integers(0, 10 ** 6))
def test_stratification_invariant(n, frac, n_folds, seed):
    n_pos = int(round(frac * n))
    y = _labels(n, n_pos, seed)
    if min(n_pos, n - n_pos) < n_folds:
        with pytest.raises(InfeasibleStratificationError):
            make_plan(y, n_folds, 3, seed)
        return
    plan = make_plan(y, n_folds, 3, seed)
    for r in range(3):
        a = plan.assignments[r]
        assert set(a) == set(range(n_folds))
        sizes = np.bincount(a, minlength=n_folds)
        assert sizes.max() - sizes.min() <= 1
        for cls, total in ((1, n_pos), (0, n - n_pos)):
            counts = np.bincount(a[y == cls], minlength=n_folds)
            assert np.all(np.abs(counts - total / n_folds) <= 1)


def test_plan_is_read_only_and_seeded():
    y = _labels(50, 20)
    p = make_plan(y, 5, 3, seed=4)
    with pytest.raises(ValueError):
        p.assignments[0, 0] = 1
    assert np.array_equal(p.assignments, make_plan(y, 5, 3, seed=4).assignments)
    assert not np.array_equal(p.assignments[0], p.assignments[1])
    assert not np.array_equal(p.assignments, make_plan(y, 5, 3, seed=5).assignments)
    d = p.to_dict()
    assert d["n_repetitions"] == 3 and len(d["assignments"]) == 3


# ---------------------------------------------------------------- metrics

def test_metric_example():
    y = [1, 1, 1, 1, 0, 0, 0, 0, 0, 0]
    p = [1, 1, 1, 0, 1, 0, 0, 0, 0, 0]
    m = classification_metrics(y, p)
    assert m["confusion"] == {"tp": 3, "fp": 1, "fn": 1, "tn": 5}
    assert (m["precision"], m["recall"], m["f1"], m["accuracy"]) == (0.75, 0.75, 0.75, 0.8)
    assert m["flags"] == []


def test_perfect_prediction():
    y = [0, 1, 1, 0]
    m = classification_metrics(y, y)
    assert all(m[k] == 1.0 for k in ("accuracy", "precision", "recall", "f1"))


def test_all_negative_prediction_flags_precision():
    m = classification_metrics([1, 0, 1, 0], [0, 0, 0, 0])
    assert m["precision"] == 0.0 and m["recall"] == 0.0
    assert any(f.startswith("precision") for f in m["flags"])


@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=60))
def test_metric_consistency(pairs):
    y, p = map(np.array, zip(*pairs))
    m = classification_metrics(y, p)
    c = m["confusion"]
    assert sum(c.values()) == len(y)
    assert m["accuracy"] == (c["tp"] + c["tn"]) / len(y)
    P, R = m["precision"], m["recall"]
    if P + R > 0:
        assert m["f1"] == pytest.approx(2 * P * R / (P + R), rel=1e-15)
    for k in ("accuracy", "precision", "recall", "f1"):
        assert 0.0 <= m[k] <= 1.0


# ---------------------------------------------------------------- roc / auc

def test_roc_perfect_staircase():
    fpr, tpr, thr = roc_curve([1, 1, 0, 0], [0.9, 0.8, 0.2, 0.1])
    pts = list(zip(fpr, tpr))
    assert pts[0] == (0, 0) and pts[-1] == (1, 1)
    assert (0, 0.5) in pts and (0, 1) in pts
    assert np.isinf(thr[0]) and np.all(np.diff(thr[1:]) < 0)
    assert auc([1, 1, 0, 0], [0.9, 0.8, 0.2, 0.1]) == 1.0


def test_auc_pair_count_example():
    assert auc([1, 1, 0, 0], [0.9, 0.4, 0.6, 0.1]) == 0.75


def test_all_equal_scores_single_diagonal_step():
    fpr, tpr, _ = roc_curve([1, 0, 1, 0], [0.3] * 4)
    assert list(zip(fpr, tpr)) == [(0, 0), (1, 1)]
    assert auc([1, 0, 1, 0], [0.3] * 4) == 0.5


def test_auc_extremes_and_errors():
    y = [0, 0, 1, 1]
    assert auc(y, [1, 2, 3, 4]) == 1.0
    assert auc(y, [4, 3, 2, 1]) == 0.0
    with pytest.raises(DegenerateLabelsError):
        auc([1, 1, 1], [0.1, 0.2, 0.3])
    with pytest.raises(DegenerateLabelsError):
        roc_curve([0, 0], [0.1, 0.2])


@pytest.mark.parametrize("seed", range(100))
def test_auc_trapezoid_equals_pair_count(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(2, 40))
    y = r.integers(0, 2, n)
    y[0], y[1] = 0, 1
    # coarse scores force plenty of ties
    s = r.integers(0, 6, n) / 5 if seed % 2 else r.random(n)
    assert abs(auc(y, s) - float(pair_count_auc(y.tolist(), s.tolist()))) <= 1e-12


@given(st.integers(0, 10 ** 6), st.integers(2, 50))
def test_auc_reflection_and_monotone_invariance(seed, n):
    r = np.random.default_rng(seed)
    y = r.integers(0, 2, n)
    y[0], y[1] = 0, 1
    s = r.permutation(n).astype(float) / n
    a = auc(y, s)
    assert a + auc(y, -s) == pytest.approx(1.0, abs=1e-15)
    assert auc(y, np.exp(3 * s)) == a
    assert auc(y, 2.5 * s - 7) == a


@given(st.integers(0, 10 ** 6))
def test_roc_is_monotone_and_bounded(seed):
    r = np.random.default_rng(seed)
    n = 30
    y = r.integers(0, 2, n)
    y[0], y[1] = 0, 1
    fpr, tpr, _ = roc_curve(y, r.integers(0, 8, n))
    assert np.all(np.diff(fpr) >= 0) and np.all(np.diff(tpr) >= 0)
    assert (fpr[0], tpr[0], fpr[-1], tpr[-1]) == (0, 0, 1, 1)


# ---------------------------------------------------------------- wilcoxon

def test_five_positive_differences():
    a, b = [0.9, 0.8, 0.85, 0.7, 0.95], [0.1, 0.2, 0.3, 0.4, 0.5]
    res = wilcoxon_signed_rank(a, b, "greater")
    assert res.p_value == 1 / 32 == 0.03125
    assert res.p_two_sided == 0.0625
    assert res.W == 15 and res.n_effective == 5 and res.method == "exact"


def test_six_positive_differences():
    assert wilcoxon_signed_rank(np.arange(6) + 1.0, np.zeros(6), "greater").p_value == 1 / 64


def test_identical_samples_flagged():
    res = wilcoxon_signed_rank([0.8, 0.7, 0.9], [0.8, 0.7, 0.9])
    assert res.p_value == 1.0 and res.n_effective == 0 and res.flagged


def test_zero_differences_dropped_and_float_noise_ignored():
    a = np.array([0.1 + 0.2, 0.5, 0.6, 0.7])
    b = np.array([0.3, 0.4, 0.4, 0.4])
    res = wilcoxon_signed_rank(a, b, "greater")
    assert res.n_effective == 3
    assert res.p_value == 1 / 8


def test_pairing_errors():
    with pytest.raises(PairingError):
        wilcoxon_signed_rank([1.0, 2.0], [1.0])
    with pytest.raises(PairingError):
        wilcoxon_signed_rank([], [])


def test_known_critical_values():
    # one-sided 5% critical values of the minimum rank sum for n = 6, 7, 8
    for n, crit in ((6, 2), (7, 3), (8, 5)):
        counts = exact_null_counts(2 * np.arange(1, n + 1))
        cdf = np.cumsum(counts[::2]) / 2 ** n
        assert cdf[crit] <= 0.05 < cdf[crit + 1]


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=10))
def test_exact_p_matches_enumeration(diffs):
    d = np.array(diffs, dtype=float) / 4
    if not np.any(d):
        return
    res = wilcoxon_signed_rank(d, np.zeros(len(d)), "greater")
    w, pg, pl = wilcoxon_enumerate(d.tolist())
    assert res.W == float(w)
    assert res.p_greater == float(pg)
    assert res.p_less == float(pl)


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=12),
       st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=12))
def test_exact_p_symmetry(a, b):
    n = min(len(a), len(b))
    a, b = a[:n], b[:n]
    assert wilcoxon_signed_rank(a, b, "greater").p_value == wilcoxon_signed_rank(b, a, "less").p_value
    assert wilcoxon_signed_rank(a, b).p_value == wilcoxon_signed_rank(b, a).p_value


@pytest.mark.parametrize("seed", range(10))
def test_agrees_with_scipy(seed):
    r = np.random.default_rng(seed)
    n = [5, 8, 12, 20, 40][seed % 5]
    a, b = r.random(n), r.random(n)
    for alt, sp in (("two_sided", "two-sided"), ("greater", "greater"), ("less", "less")):
        ours = wilcoxon_signed_rank(a, b, alt)
        theirs = scipy_wilcoxon(a, b, alternative=sp, method="exact" if n <= 25 else "approx",
                                correction=False)
        assert ours.p_value == pytest.approx(theirs.pvalue, rel=1e-9)


def test_normal_approximation_above_25():
    r = np.random.default_rng(3)
    res = wilcoxon_signed_rank(r.random(30) + 0.1, r.random(30))
    assert res.method == "normal"
    assert 0 <= res.p_value <= 1


# ---------------------------------------------------------------- repeated cv

def test_median_selection_examples():
    assert median_selection([0.80, 0.82, 0.85, 0.86, 0.90]) == (0.85, 2)
    assert median_selection([0.90, 0.85, 0.80, 0.85, 0.86])[1] == 1
    assert median_selection([0.7]) == (0.7, 0)


def _data(seed=0, n=60):
    r = np.random.default_rng(seed)
    y = (np.arange(n) % 3 == 0).astype(int)
    X = r.standard_normal((n, 3))
    X[:, 0] += 1.5 * y
    return X, y


def test_repeated_cv_structure_and_determinism():
    X, y = _data()
    plan = make_plan(y, 5, 5, seed=2)
    make = lambda: LogisticRegression(class_weight="balanced")
    ev = repeated_cv(make, X, plan, y, kind="logistic")
    assert len(ev.aucs) == 5
    assert ev.median_auc == float(np.median(ev.aucs))
    assert ev.aucs[ev.selected_repetition] == ev.median_auc
    assert ev.aucs.index(ev.median_auc) == ev.selected_repetition
    for rep, s in zip(ev.repetitions, ev.scores):
        assert rep["auc"] == auc(y, s)
        assert sum(f["n"] for f in rep["folds"]) == len(y)
        for f in rep["folds"]:
            assert sum(f["confusion"].values()) == f["n"]
        assert rep["roc"]["thresholds"][0] is None
    assert ev.metrics["source"] == "pooled"
    ev2 = repeated_cv(make, X, plan, y, kind="logistic")
    assert json.dumps(ev.to_dict(), sort_keys=True) == json.dumps(ev2.to_dict(), sort_keys=True)
    assert np.array_equal(ev.scores, ev2.scores)


def test_repeated_cv_scores_are_held_out():
    X, y = _data(1)
    plan = make_plan(y, 5, 1, seed=0)
    ev = repeated_cv(lambda: LogisticRegression(), X, plan, y)
    tr, te = plan.split(0, 3)
    m = LogisticRegression().fit(X[tr], y[tr])
    assert np.array_equal(ev.scores[0, te], m.predict_proba(X[te])[:, 1])
    assert len(ev.aucs) == 1 and ev.median_auc == ev.aucs[0]


def test_averaged_metrics_flag():
    X, y = _data(2)
    plan = make_plan(y, 5, 3, seed=0)
    ev = repeated_cv(lambda: LogisticRegression(), X, plan, y, averaged=True)
    folds = ev.repetitions[ev.selected_repetition]["folds"]
    assert ev.metrics["source"] == "averaged"
    assert ev.metrics["recall"] == pytest.approx(np.mean([f["recall"] for f in folds]))


def test_parallel_cv_matches_serial():
    X, y = _data(3)
    plan = make_plan(y, 5, 2, seed=0)
    make = lambda: RandomForest(n_trees=10, random_state=1)
    a = repeated_cv(make, X, plan, y)
    b = repeated_cv(make, X, plan, y, n_jobs=2)
    assert np.array_equal(a.scores, b.scores)


def test_fit_errors_carry_context():
    X, y = _data(4)
    plan = make_plan(y, 5, 2, seed=0)

    class Boom(LogisticRegression):
        def _fit(self, X, y, w):
            raise ArithmeticError("diverged")

    with pytest.raises(StageError, match="repetition 0, fold 0"):
        repeated_cv(lambda: Boom(), X, plan, y)


def test_pairwise_rows_and_tables():
    X, y = _data(5)
    plan = make_plan(y, 5, 5, seed=0)
    evs = [repeated_cv(lambda: ClassifierSpec(k, hp).build(), X, plan, y, kind=k, name=k.upper())
           for k, hp in (("logistic", {}), ("random_forest", {"n_trees": 20}), ("svm", {}))]
    rows = pairwise_tests(evs)
    assert [(r["a"], r["b"]) for r in rows] == [("logistic", "random_forest"), ("logistic", "svm"),
                                              ("random_forest", "svm")]
    text = metrics_table_text(evs)
    lines = text.splitlines()
    assert lines[0].split() == ["Model", "Accuracy", "Precision", "Recall", "F1-Score", "AUC"]
    assert len(lines) == 2 + 3
    assert "p (two-sided)" in pvalue_text(rows)
    report = EvaluationReport(evs, rows, plan=plan.to_dict())
    back = json.loads(report.to_json())
    assert back["model_order"] == ["logistic", "random_forest", "svm"]
    assert len(back["models"]["svm"]["raw_aucs"]) == 5
    assert report.metrics_table() == text


# ---------------------------------------------------------------- importance

def test_constant_feature_has_zero_drop():
    X, y = _data(6)
    X[:, 2] = 1.0
    m = LogisticRegression().fit(X, y)
    ranked = dict(permutation_importance(m, X, y, n_shuffles=5))
    assert ranked["x2"] == 0.0


def test_label_feature_ranked_first_with_large_drop():
    r = np.random.default_rng(7)
    X = r.standard_normal((100, 4))
    y = (X[:, 1] > 0.2).astype(int)
    m = RandomForest(n_trees=50).fit(X, y)
    ranked = permutation_importance(m, X, y, n_shuffles=10, feature_names=["a", "fd", "b", "c"])
    assert ranked[0][0] == "fd"


def test_permuting_label_feature_of_perfect_model():
    r = np.random.default_rng(7)
    X = r.standard_normal((200, 4))
    y = (X[:, 1] > 0.2).astype(int)
    m = RandomForest(n_trees=1, max_depth=1, bootstrap=False, max_features=None).fit(X, y)
    Xt = r.standard_normal((300, 4))
    yt = (Xt[:, 1] > 0.2).astype(int)
    assert auc(yt, m.predict_proba(Xt)[:, 1]) > 0.98
    ranked = permutation_importance(m, Xt, yt, n_shuffles=10)
    assert ranked[0][0] == "x1"
    assert ranked[0][1] >= 0.4


def test_heldout_importance_ranks_informative_feature():
    X, y = _data(8, n=90)
    plan = make_plan(y, 5, 1, seed=0)
    ev = repeated_cv(lambda: LogisticRegression(), X, plan, y)
    ranked = heldout_permutation_importance(ev.models[0], X, plan, 0, y, n_shuffles=5)
    assert ranked[0][0] == "x0"


def test_impurity_stump_is_one_hot():
    r = np.random.default_rng(9)
    X = r.standard_normal((40, 5))
    y = (X[:, 3] > 0).astype(int)
    m = RandomForest(n_trees=1, max_depth=1, bootstrap=False, max_features=None).fit(X, y)
    ranked = impurity_importance(m)
    assert ranked[0] == ("x3", 1.0)
    assert all(v == 0.0 for _, v in ranked[1:])


def test_impurity_mass_on_informative_features():
    r = np.random.default_rng(10)
    X = r.standard_normal((400, 4))
    y = ((X[:, 0] > 0) | (X[:, 1] > 0.5)).astype(int)
    for m in (RandomForest(n_trees=100).fit(X, y), GradientBoostedTrees(n_rounds=30).fit(X, y)):
        imp = dict(impurity_importance(m))
        assert sum(imp.values()) == pytest.approx(1.0, abs=1e-9)
        assert imp["x0"] + imp["x1"] > 0.9


def test_impurity_rejects_non_tree():
    X, y = _data(11)
    with pytest.raises(UnsupportedKindError):
        impurity_importance(SVMClassifier().fit(X, y))
