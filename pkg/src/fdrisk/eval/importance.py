"""Permutation and impurity feature importance."""
import numpy as np

from .._rng import stream
from ..exceptions import UnsupportedKindError
from .metrics import auc

TREE_KINDS = ("random_forest", "gbt")


def _is_table(X):
    return hasattr(X, "columns") and hasattr(X, "data") and hasattr(X, "take")


def _features(X, feature_names):
    if _is_table(X):
        return list(X.names)
    if feature_names is not None:
        return list(feature_names)
    return [f"x{j}" for j in range(np.asarray(X).shape[1])]


def _permuted(X, j, name, perm):
    if _is_table(X):
        data = dict(X.data)
        data[name] = X.data[name][perm]
        return X.replace(data=data)
    Xp = np.array(X, dtype=float, copy=True)
    Xp[:, j] = Xp[perm, j]
    return Xp


def _ranked(names, drops):
    order = sorted(range(len(names)), key=lambda j: (-drops[j], j))
    return [(names[j], float(drops[j])) for j in order]


def permutation_importance(model, X, y=None, metric=auc, n_shuffles=10, seed=0, feature_names=None):
    """Features ranked by mean metric drop over ``n_shuffles`` seeded permutations.

    ``X`` is a design matrix or a feature table; tables are permuted column
    by column at the table level, so a categorical column moves as a unit.
    Ties in the drop keep column order.
    """
    if y is None:
        y = X.require_label()
    y = np.asarray(y)
    names = _features(X, feature_names)
    base = metric(y, model.predict_proba(X)[:, 1])
    drops = np.zeros(len(names))
    for j, name in enumerate(names):
        for s in range(n_shuffles):
            perm = stream(seed, "permutation", name, s).permutation(len(y))
            drops[j] += base - metric(y, model.predict_proba(_permuted(X, j, name, perm))[:, 1])
    return _ranked(names, drops / n_shuffles)


def heldout_permutation_importance(models, X, plan, repetition, y=None, metric=auc, n_shuffles=5,
                                   seed=0, feature_names=None):
    """Permutation importance of a cross-validated repetition.

    Each fold's model scores its own held-out rows with one column permuted
    within that fold; the pooled held-out scores give the metric, compared
    with the unpermuted pooled value.
    """
    if y is None:
        y = X.require_label()
    y = np.asarray(y)
    names = _features(X, feature_names)
    splits = plan.splits(repetition)
    tests = [X.take(te) if _is_table(X) else np.asarray(X)[te] for _, te in splits]
    pooled = np.zeros(len(y))
    for (_, te), m, Xt in zip(splits, models, tests):
        pooled[te] = m.predict_proba(Xt)[:, 1]
    base = metric(y, pooled)
    drops = np.zeros(len(names))
    for j, name in enumerate(names):
        for s in range(n_shuffles):
            scores = np.zeros(len(y))
            for k, ((_, te), m, Xt) in enumerate(zip(splits, models, tests)):
                perm = stream(seed, "permutation", name, s, "fold", k).permutation(len(te))
                scores[te] = m.predict_proba(_permuted(Xt, j, name, perm))[:, 1]
            drops[j] += base - metric(y, scores)
    return _ranked(names, drops / n_shuffles)


def impurity_importance(model, feature_names=None):
    """Normalized total split gain per feature for forest and boosted models."""
    inner = getattr(model, "model_", model)
    if getattr(inner, "kind", None) not in TREE_KINDS:
        raise UnsupportedKindError(
            f"impurity importance needs a tree model, got {getattr(inner, 'kind', type(inner).__name__)!r}")
    names = feature_names if feature_names is not None else inner.feature_names()
    return _ranked(list(names), np.asarray(inner.feature_importances_, dtype=float))
