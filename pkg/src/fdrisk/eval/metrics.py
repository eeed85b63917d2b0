"""Threshold metrics, ROC curve and AUC."""
import numpy as np

from ..exceptions import DegenerateLabelsError, InvalidInputError


def _ratio(num, den, name, flags):
    if den == 0:
        flags.append(f"{name}: 0/0 -> 0")
        return 0.0
    return num / den


def classification_metrics(y_true, y_pred):
    """Accuracy, precision, recall, F1 and confusion counts; undefined ratios are 0 and flagged."""
    t = np.asarray(y_true).astype(int)
    p = np.asarray(y_pred).astype(int)
    if t.shape != p.shape:
        raise InvalidInputError("y_true and y_pred differ in length")
    tp = int(np.sum((t == 1) & (p == 1)))
    fp = int(np.sum((t == 0) & (p == 1)))
    fn = int(np.sum((t == 1) & (p == 0)))
    tn = int(np.sum((t == 0) & (p == 0)))
    flags = []
    precision = _ratio(tp, tp + fp, "precision", flags)
    recall = _ratio(tp, tp + fn, "recall", flags)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1", flags)
    accuracy = _ratio(tp + tn, len(t), "accuracy", flags)
    return {"accuracy": accuracy, "precision": precision, "recall": recall, "f1": f1,
            "confusion": {"tp": tp, "fp": fp, "fn": fn, "tn": tn}, "flags": flags}


def _roc_counts(y_true, scores):
    y = np.asarray(y_true).astype(int)
    s = np.asarray(scores, dtype=float)
    if y.shape != s.shape:
        raise InvalidInputError("labels and scores differ in length")
    if not np.all(np.isfinite(s)):
        raise InvalidInputError("scores must be finite")
    P = int(y.sum())
    N = len(y) - P
    if P == 0 or N == 0:
        raise DegenerateLabelsError("ROC needs both classes present")
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    last = np.r_[np.nonzero(np.diff(s))[0], len(s) - 1]
    tps = np.r_[0, np.cumsum(y)[last]]
    fps = np.r_[0, (last + 1) - tps[1:]]
    thresholds = np.r_[np.inf, s[last]]
    return tps, fps, thresholds, P, N


def roc_curve(y_true, scores):
    """``(fpr, tpr, thresholds)`` with one point per distinct score, from (0,0) to (1,1).

    The first threshold is ``inf``; a row is predicted positive when its
    score is >= the threshold.
    """
    tps, fps, thr, P, N = _roc_counts(y_true, scores)
    return fps / N, tps / P, thr


def auc(y_true, scores):
    """Trapezoidal area under the ROC curve, accumulated in integer counts."""
    tps, fps, _, P, N = _roc_counts(y_true, scores)
    twice = int(np.sum(np.diff(fps) * (tps[1:] + tps[:-1])))
    return twice / (2 * P * N)
