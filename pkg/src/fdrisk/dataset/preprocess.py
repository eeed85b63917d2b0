"""Outlier imputation, correlation pruning, class weights and encoding.

Each operation has a table-level function returning ``(table, report)`` and
an estimator counterpart (:class:`OutlierImputer`, :class:`CorrelationPruner`,
:class:`TableEncoder`) that learns its statistics in ``fit`` so it can run
inside cross-validation folds without leaking held-out rows.
"""
import json
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import DegenerateLabelsError, EncodingError, InvalidInputError


@dataclass
class LabeledMatrix:
    names: List[str]
    values: np.ndarray
    flagged: List[str] = field(default_factory=list)

    def __getitem__(self, pair):
        i, j = (self.names.index(p) for p in pair)
        return float(self.values[i, j])

    def to_dict(self):
        return {"names": list(self.names), "values": self.values.tolist(), "flagged": list(self.flagged)}


@dataclass
class PreprocessReport:
    imputed_cells: List[Tuple[int, str, float, float]] = field(default_factory=list)
    dropped_columns: List[Tuple[str, str, float]] = field(default_factory=list)
    class_weights: Dict[int, float] = field(default_factory=dict)
    correlation_matrix: LabeledMatrix = None
    notes: List[str] = field(default_factory=list)

    def merge(self, other):
        return PreprocessReport(
            self.imputed_cells + other.imputed_cells,
            self.dropped_columns + other.dropped_columns,
            other.class_weights or self.class_weights,
            other.correlation_matrix or self.correlation_matrix,
            self.notes + other.notes,
        )

    def to_dict(self):
        return {
            "imputed_cells": [
                {"row": r, "column": c, "old": o, "new": n} for r, c, o, n in self.imputed_cells
            ],
            "dropped_columns": [
                {"column": c, "partner": p, "correlation": r} for c, p, r in self.dropped_columns
            ],
            "class_weights": {str(k): v for k, v in sorted(self.class_weights.items())},
            "correlation_matrix": None if self.correlation_matrix is None
            else self.correlation_matrix.to_dict(),
            "notes": list(self.notes),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self):
        lines = ["Preprocessing report", "===================="]
        lines.append(f"Imputed outlier cells: {len(self.imputed_cells)}")
        for r, c, o, n in self.imputed_cells:
            lines.append(f"  row {r:>4}  {c:<32} {o!r} -> {n!r}")
        lines.append(f"Dropped correlated columns: {len(self.dropped_columns)}")
        for c, p, r in self.dropped_columns:
            lines.append(f"  {c:<32} (kept {p}, r = {r:+.4f})")
        if self.class_weights:
            lines.append("Class weights: " + ", ".join(
                f"{k}: {v:.6f}" for k, v in sorted(self.class_weights.items())))
        for note in self.notes:
            lines.append(f"Note: {note}")
        return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ outliers

def outlier_statistics(values):
    """Mean, sample sd and median over non-missing values."""
    v = values[~np.isnan(values)]
    if len(v) < 3:
        return None
    return float(v.mean()), float(v.std(ddof=1)), float(np.median(v))


def _outlier_mask(values, mean, sd, n_sigma):
    with np.errstate(invalid="ignore"):
        return ~np.isnan(values) & (np.abs(values - mean) > n_sigma * sd)


def impute_outliers(table, n_sigma=2.0):
    """Replace numeric cells more than ``n_sigma`` sample sds from the mean by the median.

    Statistics are computed on the column before any replacement. Binary and
    categorical columns are left alone.
    """
    report = PreprocessReport()
    data = dict(table.data)
    for name in table.kind_names("numeric"):
        values = table.data[name]
        stats = outlier_statistics(values)
        if stats is None:
            report.notes.append(f"{name}: fewer than 3 values, outlier check skipped")
            continue
        mean, sd, median = stats
        if sd == 0:
            report.notes.append(f"{name}: zero variance, outlier check skipped")
            continue
        mask = _outlier_mask(values, mean, sd, n_sigma)
        if mask.any():
            new = values.copy()
            for i in np.nonzero(mask)[0]:
                report.imputed_cells.append((int(i), name, float(values[i]), median))
            new[mask] = median
            data[name] = new
    return table.replace(data=data), report


class OutlierImputer(TransformerMixin, BaseEstimator):
    """Median replacement of cells beyond ``n_sigma`` sds, with statistics learned in ``fit``.

    NaN cells pass through untouched. Columns listed in ``skip`` (indices)
    are never modified, which is how binary indicators are protected.
    """

    def __init__(self, n_sigma=2.0, skip=()):
        self.n_sigma = n_sigma
        self.skip = skip

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        d = X.shape[1]
        self.mean_ = np.zeros(d)
        self.scale_ = np.zeros(d)
        self.median_ = np.zeros(d)
        self.active_ = np.zeros(d, dtype=bool)
        skip = set(self.skip)
        for j in range(d):
            stats = outlier_statistics(X[:, j])
            if j in skip or stats is None or stats[1] == 0:
                continue
            self.mean_[j], self.scale_[j], self.median_[j] = stats
            self.active_[j] = True
        return self

    def transform(self, X):
        check_is_fitted(self, "active_")
        X = np.array(X, dtype=float, copy=True)
        for j in np.nonzero(self.active_)[0]:
            mask = _outlier_mask(X[:, j], self.mean_[j], self.scale_[j], self.n_sigma)
            X[mask, j] = self.median_[j]
        return X


# --------------------------------------------------------------- correlation

def pearson_matrix(X):
    """Pearson correlation over pairwise-complete rows; zero-variance pairs give 0.

    Returns ``(matrix, zero_variance_column_mask)``.
    """
    X = np.asarray(X, dtype=float)
    d = X.shape[1]
    R = np.eye(d)
    present = ~np.isnan(X)
    flagged = np.zeros(d, dtype=bool)
    complete = bool(present.all())
    if complete:
        Z = X - X.mean(axis=0)
        ss = np.einsum("ij,ij->j", Z, Z)
        flagged = ss == 0
    for i in range(d):
        for j in range(i + 1, d):
            if complete:
                a, b = Z[:, i], Z[:, j]
                si, sj = ss[i], ss[j]
            else:
                rows = present[:, i] & present[:, j]
                a = X[rows, i] - X[rows, i].mean() if rows.any() else np.zeros(0)
                b = X[rows, j] - X[rows, j].mean() if rows.any() else np.zeros(0)
                si, sj = float(a @ a), float(b @ b)
                if si == 0:
                    flagged[i] = True
                if sj == 0:
                    flagged[j] = True
            if si == 0 or sj == 0:
                r = 0.0
            else:
                r = float(a @ b / np.sqrt(si * sj))
                r = min(1.0, max(-1.0, r))
            R[i, j] = R[j, i] = r
    return R, flagged


def correlation_matrix(table):
    """Labelled Pearson matrix over the numeric and binary columns."""
    names = table.kind_names("numeric", "binary")
    if len(names) < 2:
        raise InvalidInputError("correlation needs at least 2 numeric columns")
    X = np.column_stack([table.data[n] for n in names])
    R, flagged = pearson_matrix(X)
    return LabeledMatrix(names, R, [n for n, f in zip(names, flagged) if f])


def greedy_prune(R, threshold):
    """Indices to keep and ``(dropped, kept_partner, r)`` triples.

    Columns are visited in order; a surviving column removes every later
    column whose ``|r|`` exceeds ``threshold``.
    """
    d = len(R)
    dropped = {}
    for i in range(d):
        if i in dropped:
            continue
        for j in range(i + 1, d):
            if j not in dropped and abs(R[i, j]) > threshold:
                dropped[j] = (i, float(R[i, j]))
    keep = [i for i in range(d) if i not in dropped]
    return keep, sorted((j, i, r) for j, (i, r) in dropped.items())


def prune_correlated(table, threshold=0.8):
    """Drop the later column of every pair with ``|r| > threshold`` (schema order)."""
    cm = correlation_matrix(table)
    _, drops = greedy_prune(cm.values, threshold)
    report = PreprocessReport(correlation_matrix=cm)
    report.dropped_columns = [(cm.names[j], cm.names[i], r) for j, i, r in drops]
    for name in cm.flagged:
        report.notes.append(f"{name}: zero variance, correlations reported as 0")
    return table.drop([c for c, _, _ in report.dropped_columns]), report


class CorrelationPruner(TransformerMixin, BaseEstimator):
    """Column filter that learns which columns to drop from the training rows."""

    def __init__(self, threshold=0.8):
        self.threshold = threshold

    def fit(self, X, y=None, feature_names=None):
        X = np.asarray(X, dtype=float)
        R, _ = pearson_matrix(X)
        self.keep_, drops = greedy_prune(R, self.threshold)
        self.dropped_ = drops
        self.n_features_in_ = X.shape[1]
        if feature_names is not None:
            self.feature_names_in_ = np.asarray(feature_names, dtype=object)
        return self

    def transform(self, X):
        check_is_fitted(self, "keep_")
        return np.asarray(X, dtype=float)[:, self.keep_]

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "keep_")
        names = input_features if input_features is not None else getattr(
            self, "feature_names_in_", [f"x{i}" for i in range(self.n_features_in_)])
        return np.asarray(names, dtype=object)[self.keep_]


# -------------------------------------------------------------- class weights

def class_weights(labels):
    """Balanced weights ``n / (2 * n_c)`` for classes 0 and 1."""
    y = np.asarray(getattr(labels, "label", labels))
    if y is None or y.ndim == 0:
        raise DegenerateLabelsError("no labels")
    n = len(y)
    n1 = int((y == 1).sum())
    n0 = n - n1
    if n0 == 0 or n1 == 0:
        raise DegenerateLabelsError("class weights need both classes present")
    return {0: n / (2 * n0), 1: n / (2 * n1)}


def resolve_sample_weight(y, class_weight=None, sample_weight=None):
    """Per-row weights from an explicit vector or a class-weight spec (``'balanced'``/dict)."""
    y = np.asarray(y)
    if sample_weight is not None:
        w = np.asarray(sample_weight, dtype=float)
        if w.shape != y.shape or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvalidInputError("sample_weight must be finite, nonnegative and match y")
        return w
    if class_weight is None:
        return np.ones(len(y))
    cw = class_weights(y) if class_weight == "balanced" else {int(k): float(v) for k, v in dict(class_weight).items()}
    return np.where(y == 1, cw.get(1, 1.0), cw.get(0, 1.0)).astype(float)


# ------------------------------------------------------------------ encoding

class TableEncoder(BaseEstimator):
    """Map a :class:`FeatureTable` to a numeric design matrix.

    Categorical columns become ``<column>_<level>`` indicators (levels from
    the schema, or learned in ``fit`` when undeclared); a generated indicator
    whose name already exists as a column is not duplicated. Missing numeric
    cells get the training median, missing binary cells the training mode,
    missing categorical cells the most frequent level.
    """

    def __init__(self, columns=None):
        self.columns = columns

    def fit(self, table, y=None):
        names = self.columns if self.columns is not None else table.names
        present = set(table.names)
        self.plan_ = []
        self.fill_ = {}
        out = []
        for name in names:
            spec = table.column(name)
            values = table.data[name]
            if spec.kind == "categorical":
                observed = sorted({v for v in values if v is not None})
                levels = list(spec.levels) if spec.levels else observed
                counts = {lv: sum(1 for v in values if v == lv) for lv in levels}
                mode = max(levels, key=lambda lv: (counts[lv], -levels.index(lv))) if levels else None
                targets = [(lv, f"{name}_{lv}") for lv in levels]
                targets = [(lv, t) for lv, t in targets if t not in present]
                self.plan_.append((name, "categorical", levels, targets))
                self.fill_[name] = mode
                out.extend(t for _, t in targets)
            else:
                v = values[~np.isnan(values)]
                if spec.kind == "binary":
                    fill = float(v.mean() >= 0.5) if len(v) else 0.0
                else:
                    fill = float(np.median(v)) if len(v) else 0.0
                self.plan_.append((name, spec.kind, None, [(None, name)]))
                self.fill_[name] = fill
                out.append(name)
        self.feature_names_out_ = out
        return self

    def transform(self, table, report=None):
        check_is_fitted(self, "plan_")
        cols = []
        for name, kind, levels, targets in self.plan_:
            values = table.data[name]
            if kind == "categorical":
                vals = []
                for i, v in enumerate(values):
                    if v is None:
                        v = self.fill_[name]
                        if report is not None:
                            report.notes.append(f"row {i}, {name}: missing level filled with {v!r}")
                    elif v not in levels:
                        raise EncodingError(f"column {name!r}: unseen level {v!r}")
                    vals.append(v)
                for lv, _ in targets:
                    cols.append(np.array([1.0 if v == lv else 0.0 for v in vals]))
            else:
                col = values.astype(float).copy()
                miss = np.isnan(col)
                if miss.any():
                    col[miss] = self.fill_[name]
                    if report is not None:
                        for i in np.nonzero(miss)[0]:
                            report.imputed_cells.append((int(i), name, float("nan"), self.fill_[name]))
                        report.notes.append(f"{name}: {int(miss.sum())} missing cells filled with {self.fill_[name]!r}")
                cols.append(col)
        X = np.column_stack(cols) if cols else np.zeros((table.n_rows, 0))
        return X

    def fit_transform(self, table, y=None, report=None):
        return self.fit(table).transform(table, report)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "plan_")
        return np.asarray(self.feature_names_out_, dtype=object)


def encode(table, columns=None):
    """Design matrix, column names and a report of filled cells."""
    report = PreprocessReport()
    enc = TableEncoder(columns)
    X = enc.fit_transform(table, report=report)
    return X, list(enc.feature_names_out_), report
