"""Exhaustive grid search scored by stratified k-fold mean AUC."""
import itertools
from dataclasses import dataclass
from typing import List

import numpy as np
from joblib import Parallel, delayed

from ..eval.folds import stratified_folds
from ..eval.metrics import auc
from ..exceptions import ConfigError, FdriskError, InvalidArgumentError
from .spec import ClassifierSpec

FIT_ERRORS = (FdriskError, ValueError, ArithmeticError, np.linalg.LinAlgError)


@dataclass(frozen=True)
class GridSearchResult:
    best_spec: ClassifierSpec
    best_score: float
    rows: List[dict]

    def to_dict(self):
        return {"best": self.best_spec.to_dict(), "best_score": self.best_score, "rows": self.rows}


def _take(X, idx):
    return X.take(idx) if hasattr(X, "take") and hasattr(X, "columns") and not hasattr(X, "iloc") else X[idx]


def expand_grid(grid):
    """Cartesian product in key order, last key varying fastest."""
    keys = list(grid)
    for k in keys:
        if not isinstance(grid[k], (list, tuple)) or len(grid[k]) == 0:
            raise ConfigError(f"grid entry {k!r} must be a nonempty list")
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def _score_cell(spec, X, y, folds, n_folds, make_estimator):
    aucs = []
    try:
        for k in range(n_folds):
            train, test = np.nonzero(folds != k)[0], np.nonzero(folds == k)[0]
            est = make_estimator(spec).fit(_take(X, train), y[train])
            aucs.append(auc(y[test], est.predict_proba(_take(X, test))[:, 1]))
    except FIT_ERRORS as exc:
        return {"fold_aucs": aucs, "mean_auc": None, "error": f"{type(exc).__name__}: {exc}"}
    return {"fold_aucs": aucs, "mean_auc": float(np.mean(aucs)), "error": None}


def grid_search(base, grid, X, y=None, n_folds=5, seed=0, make_estimator=None, n_jobs=1):
    """Best spec over ``grid`` and the full score table.

    ``X`` is a matrix or a :class:`~fdrisk.dataset.FeatureTable` (then
    ``y`` defaults to its label). Every cell shares one fold assignment.
    Ties keep the earlier cell. Cells whose fit fails are recorded with
    their error; if all fail an error is raised.
    """
    if n_folds < 2:
        raise InvalidArgumentError("grid search needs n_folds >= 2")
    if y is None:
        y = X.require_label()
    y = np.asarray(y)
    cells = expand_grid(grid) if grid else [{}]
    specs = [base.with_params(**cell) for cell in cells]
    make_estimator = make_estimator or (lambda s: s.build())
    folds = stratified_folds(y, n_folds, seed, ("grid_search",))
    if n_jobs == 1:
        scores = [_score_cell(s, X, y, folds, n_folds, make_estimator) for s in specs]
    else:
        scores = Parallel(n_jobs=n_jobs)(
            delayed(_score_cell)(s, X, y, folds, n_folds, make_estimator) for s in specs)
    rows = []
    best = None
    for i, (cell, spec, score) in enumerate(zip(cells, specs, scores)):
        rows.append({"index": i, "params": spec.to_dict()["hyperparameters"],
                     "grid_point": {k: list(v) if isinstance(v, tuple) else v for k, v in cell.items()},
                     **score})
        if score["mean_auc"] is not None and (best is None or score["mean_auc"] > scores[best]["mean_auc"]):
            best = i
    if best is None:
        raise FdriskError(f"every grid cell failed for {base.kind}: {rows[0]['error']}")
    return GridSearchResult(specs[best], scores[best]["mean_auc"], rows)
