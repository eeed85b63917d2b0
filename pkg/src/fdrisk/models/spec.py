"""Classifier specs: kind, validated hyperparameters, class weights and seed."""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

from ..exceptions import ConfigError
from .forest import RandomForest
from .gbt import GradientBoostedTrees
from .logistic import LogisticRegression
from .mlp import MLPClassifier
from .svm import SVMClassifier

ESTIMATORS = {
    "logistic": LogisticRegression,
    "random_forest": RandomForest,
    "gbt": GradientBoostedTrees,
    "svm": SVMClassifier,
    "mlp": MLPClassifier,
}

#: display names used in reports (the gbt row stands in for XGBoost)
DISPLAY_NAMES = {
    "logistic": "Logistic Regression (PHASES)",
    "random_forest": "Random Forest",
    "gbt": "XGBoost (gbt)",
    "svm": "SVM",
    "mlp": "MLP",
}

KIND_ORDER = ("logistic", "random_forest", "svm", "mlp", "gbt")


def _pos_int(v):
    return isinstance(v, int) and not isinstance(v, bool) and v >= 1


def _pos(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0


def _nonneg(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and v >= 0


def _unit(v):
    return _pos(v) and v <= 1


def _depth(v):
    return v is None or _pos_int(v)


def _max_features(v):
    return v is None or v in ("sqrt", "log2") or _pos_int(v) or (isinstance(v, float) and 0 < v <= 1)


def _hidden(v):
    return isinstance(v, (tuple, list)) and len(v) >= 1 and all(_pos_int(h) for h in v)


def _gamma(v):
    return v == "auto" or _pos(v)


BOUNDS = {
    "logistic": {"l2": _nonneg, "tol": _pos, "max_iter": _pos_int},
    "random_forest": {"n_trees": _pos_int, "max_depth": _depth, "min_leaf": _pos_int,
                      "max_features": _max_features, "bootstrap": lambda v: isinstance(v, bool)},
    "gbt": {"n_rounds": _pos_int, "learning_rate": _unit, "max_depth": _depth,
            "reg_lambda": _nonneg, "gamma": _nonneg, "min_child_weight": _nonneg,
            "min_leaf": _pos_int, "subsample": _unit, "colsample": _unit,
            "base_score": lambda v: _pos(v) and v < 1},
    "svm": {"C": _pos, "kernel": lambda v: v in ("linear", "rbf"), "gamma": _gamma,
            "tol": _pos, "max_iter": _pos_int},
    "mlp": {"hidden_layers": _hidden, "epochs": _pos_int, "batch_size": _pos_int,
            "learning_rate": _pos, "l2": _nonneg},
}


def validate_hyperparameters(kind, params):
    if kind not in ESTIMATORS:
        raise ConfigError(f"unknown model kind {kind!r}; expected one of {sorted(ESTIMATORS)}")
    bounds = BOUNDS[kind]
    for name, value in params.items():
        if name not in bounds:
            raise ConfigError(f"{kind}: unknown hyperparameter {name!r}; allowed: {sorted(bounds)}")
        if not bounds[name](value):
            raise ConfigError(f"{kind}: hyperparameter {name}={value!r} out of range")


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    hyperparameters: Dict[str, Any] = field(default_factory=dict)
    class_weights: Optional[Union[str, Dict[int, float]]] = "balanced"
    seed: int = 0

    def __post_init__(self):
        hp = dict(self.hyperparameters)
        if self.kind == "mlp" and "hidden_layers" in hp and isinstance(hp["hidden_layers"], list):
            hp["hidden_layers"] = tuple(hp["hidden_layers"])
        object.__setattr__(self, "hyperparameters", hp)
        validate_hyperparameters(self.kind, hp)

    def build(self):
        """Unfitted estimator carrying this spec's parameters."""
        return ESTIMATORS[self.kind](class_weight=self.class_weights, random_state=self.seed,
                                     **self.hyperparameters)

    def with_params(self, **params):
        hp = dict(self.hyperparameters)
        hp.update(params)
        return ClassifierSpec(self.kind, hp, self.class_weights, self.seed)

    def to_dict(self):
        cw = self.class_weights
        if isinstance(cw, dict):
            cw = {str(k): v for k, v in sorted(cw.items())}
        hp = {k: list(v) if isinstance(v, tuple) else v for k, v in sorted(self.hyperparameters.items())}
        return {"kind": self.kind, "hyperparameters": hp, "class_weights": cw, "seed": self.seed}


def fit(spec, X, y, sample_weights=None, feature_names=None):
    """Fit the estimator described by ``spec``."""
    return spec.build().fit(X, y, sample_weight=sample_weights, feature_names=feature_names)


def predict_proba(model, X):
    """Class-1 probability per row."""
    return model.predict_proba(X)[:, 1]
