"""Shared estimator plumbing for the binary classifiers."""
import hashlib

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..dataset.preprocess import resolve_sample_weight
from ..exceptions import DegenerateLabelsError, InvalidInputError, SchemaError


def schema_hash(names):
    h = hashlib.sha256("\x1f".join(map(str, names)).encode()).hexdigest()
    return h[:16]


def _as_matrix(X):
    names = None
    if hasattr(X, "columns") and hasattr(X, "to_numpy"):
        names = [str(c) for c in X.columns]
        X = X.to_numpy()
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if len(X) else X.reshape(0, 0)
    if X.ndim != 2:
        raise InvalidInputError(f"X must be 2-dimensional, got shape {X.shape}")
    return X, names


class BinaryClassifier(ClassifierMixin, BaseEstimator):
    """Base for the 0/1 classifiers.

    Subclasses implement ``_fit(X, y, w)`` and ``_proba(X)`` (class-1
    probability). ``fit`` accepts ``feature_names`` (or a DataFrame) to bind
    column names; ``predict_proba`` then refuses DataFrames whose columns
    differ.
    """

    kind = None
    #: fitted attributes serialized by :mod:`fdrisk.models.io`
    _state_attrs = ()

    def fit(self, X, y, sample_weight=None, feature_names=None):
        X, names = _as_matrix(X)
        y = np.asarray(y)
        if X.shape[0] != len(y):
            raise InvalidInputError(f"X has {X.shape[0]} rows but y has {len(y)}")
        if not np.all(np.isfinite(X)):
            raise InvalidInputError("X contains non-finite values")
        if not np.all(np.isin(y, (0, 1))):
            raise InvalidInputError("y must be binary 0/1")
        y = y.astype(np.int64)
        if len(np.unique(y)) < 2:
            raise DegenerateLabelsError(f"{self.kind} needs both classes in y")
        names = feature_names if feature_names is not None else names
        if names is not None:
            names = [str(n) for n in names]
            if len(names) != X.shape[1]:
                raise SchemaError("feature_names length does not match X")
            self.feature_names_in_ = np.asarray(names, dtype=object)
        elif hasattr(self, "feature_names_in_"):
            del self.feature_names_in_
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        self.training_log_ = []
        self.convergence_warning_ = None
        w = resolve_sample_weight(y, getattr(self, "class_weight", None), sample_weight)
        if not (w[y == 1].sum() > 0 and w[y == 0].sum() > 0):
            raise InvalidInputError("each class needs positive total sample weight")
        self._fit(X, y, w)
        self.schema_hash_ = schema_hash(self.feature_names())
        return self

    def feature_names(self):
        if hasattr(self, "feature_names_in_"):
            return list(self.feature_names_in_)
        return [f"x{i}" for i in range(self.n_features_in_)]

    def _check_X(self, X):
        check_is_fitted(self, "n_features_in_")
        X, names = _as_matrix(X)
        if X.shape[0] == 0:
            return X.reshape(0, self.n_features_in_)
        if names is not None and hasattr(self, "feature_names_in_"):
            bound = list(self.feature_names_in_)
            if names != bound:
                missing = [n for n in bound if n not in names]
                extra = [n for n in names if n not in bound]
                raise SchemaError(
                    f"column mismatch: missing {missing}, extra {extra}"
                    + ("" if missing or extra else " (order differs)"))
        if X.shape[1] != self.n_features_in_:
            raise SchemaError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise InvalidInputError("X contains non-finite values")
        return X

    def predict_proba(self, X):
        """Array ``(n, 2)`` of class probabilities; column 1 is P(ruptured)."""
        X = self._check_X(X)
        if X.shape[0] == 0:
            return np.zeros((0, 2))
        p = np.clip(self._proba(X), 0.0, 1.0)
        return np.column_stack([1.0 - p, p])

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X)[:, 1] >= threshold).astype(np.int64)


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log1pexp(z):
    """Numerically stable ``log(1 + exp(z))``."""
    z = np.asarray(z, dtype=float)
    return np.maximum(z, 0) + np.log1p(np.exp(-np.abs(z)))
