"""Table-to-probability pipelines used by grid search and cross-validation.

A :class:`RiskPipeline` chains encoding, outlier replacement, correlation
pruning, optional standardization and a classifier, all fit on the rows it
is given. Inside cross-validation that makes preprocessing fold-safe.
:func:`global_preprocess` is the alternative that cleans the whole table
once before any split.
"""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.preprocessing import StandardScaler
from sklearn.utils.validation import check_is_fitted

from .dataset.preprocess import (
    CorrelationPruner,
    OutlierImputer,
    PreprocessReport,
    TableEncoder,
    class_weights,
    impute_outliers,
    prune_correlated,
)
from .dataset.schema import PHASES_COLUMNS, PHASES_PREFIXES
from .exceptions import SchemaError
from .models.spec import ClassifierSpec

STANDARDIZED_KINDS = ("svm", "mlp")


def phases_columns(table):
    """Columns of ``table`` that feed the PHASES-style logistic baseline."""
    stems = tuple(p.rstrip("_") for p in PHASES_PREFIXES)
    cols = [n for n in table.names
            if n in PHASES_COLUMNS or n in stems or n.startswith(PHASES_PREFIXES)]
    if not cols:
        raise SchemaError(f"no PHASES columns ({', '.join(PHASES_COLUMNS)}, location) in table")
    return cols


def global_preprocess(table, n_sigma=2.0, corr_threshold=0.8):
    """Outlier replacement then correlation pruning over every row."""
    report = PreprocessReport()
    if n_sigma is not None:
        table, r = impute_outliers(table, n_sigma)
        report = report.merge(r)
    if corr_threshold is not None and len(table.kind_names("numeric", "binary")) >= 2:
        table, r = prune_correlated(table, corr_threshold)
        report = report.merge(r)
    if table.label is not None:
        report.class_weights = class_weights(table.label)
    return table, report


class RiskPipeline(BaseEstimator):
    """Encode -> replace outliers -> prune correlated -> scale -> classify.

    ``n_sigma`` or ``corr_threshold`` set to None disables that step;
    ``standardize='auto'`` scales only for svm and mlp. ``columns`` restricts
    the input columns (None uses all).
    """

    def __init__(self, spec=None, columns=None, n_sigma=2.0, corr_threshold=0.8, standardize="auto"):
        self.spec = spec
        self.columns = columns
        self.n_sigma = n_sigma
        self.corr_threshold = corr_threshold
        self.standardize = standardize

    def _scales(self):
        if self.standardize == "auto":
            return self.spec.kind in STANDARDIZED_KINDS
        return bool(self.standardize)

    def fit(self, table, y=None):
        spec = self.spec if self.spec is not None else ClassifierSpec("logistic")
        y = table.require_label() if y is None else np.asarray(y)
        self.encoder_ = TableEncoder(self.columns).fit(table)
        X = self.encoder_.transform(table)
        names = list(self.encoder_.feature_names_out_)
        numeric = {n for n, kind, _, _ in self.encoder_.plan_ if kind == "numeric"}
        self.steps_ = []
        if self.n_sigma is not None:
            skip = [j for j, n in enumerate(names) if n not in numeric]
            step = OutlierImputer(self.n_sigma, skip).fit(X)
            X = step.transform(X)
            self.steps_.append(step)
        if self.corr_threshold is not None and X.shape[1] >= 2:
            step = CorrelationPruner(self.corr_threshold).fit(X, feature_names=names)
            X = step.transform(X)
            names = list(step.get_feature_names_out())
            self.steps_.append(step)
        if self._scales():
            step = StandardScaler().fit(X)
            X = step.transform(X)
            self.steps_.append(step)
        self.feature_names_ = names
        self.model_ = spec.build().fit(X, y, feature_names=names)
        return self

    def transform(self, table):
        check_is_fitted(self, "model_")
        X = self.encoder_.transform(table)
        for step in self.steps_:
            X = step.transform(X)
        return X

    def predict_proba(self, table):
        return self.model_.predict_proba(self.transform(table))

    def predict(self, table, threshold=0.5):
        return (self.predict_proba(table)[:, 1] >= threshold).astype(np.int64)


def make_pipeline(spec, table=None, paper_mode=False, n_sigma=2.0, corr_threshold=0.8,
                  standardize="auto", phases=None):
    """Pipeline for ``spec``; the logistic kind uses the PHASES columns unless ``phases=False``.

    In paper mode the table is assumed already cleaned by
    :func:`global_preprocess`, so the per-fit outlier and correlation steps
    are off.
    """
    columns = None
    if (spec.kind == "logistic" if phases is None else phases):
        columns = phases_columns(table)
    if paper_mode:
        n_sigma = corr_threshold = None
    return RiskPipeline(spec, columns, n_sigma, corr_threshold, standardize)
