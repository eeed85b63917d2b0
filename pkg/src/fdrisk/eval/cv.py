"""Repeated stratified cross-validation and the evaluation report."""
import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from joblib import Parallel, delayed

from ..exceptions import StageError
from .metrics import auc, classification_metrics, roc_curve
from .wilcoxon import wilcoxon_signed_rank

THRESHOLD = 0.5
METRIC_NAMES = ("accuracy", "precision", "recall", "f1")


def _take(X, idx):
    return X.take(idx) if hasattr(X, "columns") and not hasattr(X, "iloc") else X[idx]


def median_selection(aucs):
    """Median of ``aucs`` and the index of the repetition chosen to represent it.

    With an odd count the chosen repetition scores exactly the median; with
    an even count it is the one closest to the median. Ties go to the
    earliest repetition.
    """
    aucs = np.asarray(aucs, dtype=float)
    med = float(np.median(aucs))
    return med, int(np.argmin(np.abs(aucs - med)))


def roc_points(y, scores):
    fpr, tpr, thr = roc_curve(y, scores)
    return {"fpr": fpr.tolist(), "tpr": tpr.tolist(),
            "thresholds": [None if not np.isfinite(t) else float(t) for t in thr]}


@dataclass
class ModelEvaluation:
    """Cross-validation results for one model.

    ``scores[r]`` holds each row's held-out P(ruptured) in repetition ``r``.
    Fitted fold models are kept in ``models`` for held-out importance but are
    not serialized.
    """

    kind: str
    name: str
    spec: dict
    repetitions: List[dict]
    scores: np.ndarray
    median_auc: float
    selected_repetition: int
    metrics: dict
    models: Optional[list] = field(default=None, repr=False)
    grid: Optional[dict] = None

    @property
    def aucs(self):
        return [r["auc"] for r in self.repetitions]

    def to_dict(self):
        out = {"kind": self.kind, "name": self.name, "spec": self.spec,
               "raw_aucs": self.aucs, "median_auc": self.median_auc,
               "selected_repetition": self.selected_repetition, "metrics": self.metrics,
               "repetitions": self.repetitions}
        if self.grid is not None:
            out["grid_search"] = self.grid
        return out


def _fit_fold(make_estimator, X, y, train, test, rep, fold):
    try:
        est = make_estimator().fit(_take(X, train), y[train])
        return est, est.predict_proba(_take(X, test))[:, 1]
    except StageError:
        raise
    except Exception as exc:
        raise StageError(f"repetition {rep}, fold {fold}", exc) from exc


def repeated_cv(make_estimator, X, plan, y=None, kind="model", name=None, spec=None,
                averaged=False, n_jobs=1, keep_models=True):
    """Cross-validate ``make_estimator()`` over every repetition of ``plan``.

    Each fold's model is fit on the other folds and scores the held-out
    rows. A repetition's AUC comes from its pooled held-out scores. The
    reported threshold metrics come from the median repetition: pooled over
    its folds, or the mean of its per-fold values when ``averaged``.
    """
    if y is None:
        y = X.require_label()
    y = np.asarray(y)
    if plan.n_rows != len(y):
        raise StageError("cross-validation", ValueError(
            f"fold plan covers {plan.n_rows} rows, table has {len(y)}"))
    jobs = [(r, k) + plan.split(r, k) for r in range(plan.n_repetitions) for k in range(plan.n_folds)]
    if n_jobs == 1:
        fitted = [_fit_fold(make_estimator, X, y, tr, te, r, k) for r, k, tr, te in jobs]
    else:
        fitted = Parallel(n_jobs=n_jobs)(
            delayed(_fit_fold)(make_estimator, X, y, tr, te, r, k) for r, k, tr, te in jobs)
    scores = np.zeros((plan.n_repetitions, len(y)))
    models = [[None] * plan.n_folds for _ in range(plan.n_repetitions)]
    repetitions = []
    for (r, k, tr, te), (est, s) in zip(jobs, fitted):
        scores[r, te] = s
        models[r][k] = est
    for r in range(plan.n_repetitions):
        folds = []
        for k, (_, te) in enumerate(plan.splits(r)):
            m = classification_metrics(y[te], scores[r, te] >= THRESHOLD)
            m["n"] = int(len(te))
            folds.append(m)
        repetitions.append({"auc": auc(y, scores[r]), "folds": folds, "roc": roc_points(y, scores[r])})
    med, sel = median_selection([rep["auc"] for rep in repetitions])
    if averaged:
        folds = repetitions[sel]["folds"]
        metrics = {m: float(np.mean([f[m] for f in folds])) for m in METRIC_NAMES}
        metrics["source"] = "averaged"
    else:
        metrics = classification_metrics(y, scores[sel] >= THRESHOLD)
        metrics["source"] = "pooled"
    metrics["auc"] = med
    return ModelEvaluation(kind, name or kind, spec, repetitions, scores, med, sel, metrics,
                           models if keep_models else None)


def pairwise_tests(evaluations):
    """Wilcoxon rows for every pair of evaluations, in input order."""
    rows = []
    for ea, eb in itertools.combinations(evaluations, 2):
        res = wilcoxon_signed_rank(ea.aucs, eb.aucs, "two_sided")
        rows.append({"a": ea.kind, "b": eb.kind, "W": res.W, "n_effective": res.n_effective,
                     "p_two_sided": res.p_two_sided, "p_greater": res.p_greater,
                     "p_less": res.p_less, "method": res.method, "flagged": res.flagged})
    return rows


def _fmt(v):
    return f"{v:.3f}"


def metrics_table_text(evaluations):
    """Plain-text metrics table with the Model / Accuracy / Precision / Recall / F1-Score layout."""
    header = ("Model", "Accuracy", "Precision", "Recall", "F1-Score", "AUC")
    rows = [(e.name, _fmt(e.metrics["accuracy"]), _fmt(e.metrics["precision"]),
             _fmt(e.metrics["recall"]), _fmt(e.metrics["f1"]), _fmt(e.median_auc)) for e in evaluations]
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    line = lambda r: "  ".join(str(c).ljust(w) if i == 0 else str(c).rjust(w)
                               for i, (c, w) in enumerate(zip(r, widths)))
    out = [line(header), "  ".join("-" * w for w in widths)] + [line(r) for r in rows]
    return "\n".join(out) + "\n"


def pvalue_text(rows):
    header = ("Model A", "Model B", "W", "n_eff", "p (two-sided)", "p (A > B)", "p (A < B)", "")
    body = [(r["a"], r["b"], f"{r['W']:g}", str(r["n_effective"]), f"{r['p_two_sided']:.5f}",
             f"{r['p_greater']:.5f}", f"{r['p_less']:.5f}", "flagged" if r["flagged"] else "")
            for r in rows]
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    fmt = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
    return "\n".join([fmt(header)] + [fmt(r) for r in body]) + "\n"


@dataclass
class EvaluationReport:
    """Everything one evaluation run produces; serialized with sorted keys."""

    evaluations: List[ModelEvaluation]
    pairwise: List[dict]
    importance: Dict[str, dict] = field(default_factory=dict)
    plan: dict = field(default_factory=dict)
    preprocess: Optional[dict] = None
    settings: dict = field(default_factory=dict)

    def to_dict(self):
        return {"models": {e.kind: e.to_dict() for e in self.evaluations},
                "model_order": [e.kind for e in self.evaluations],
                "pairwise": self.pairwise, "importance": self.importance,
                "plan": self.plan, "preprocess": self.preprocess, "settings": self.settings}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, allow_nan=False)

    def metrics_table(self):
        return metrics_table_text(self.evaluations)
