"""Second-order gradient boosting on the logistic loss.

Each round fits a regression tree to the per-row gradient ``g = w (p - y)``
and hessian ``h = w p (1 - p)`` of the weighted log loss, with split gain
and leaf values from the Newton step (L2 penalty ``reg_lambda`` on leaf
values, ``gamma`` per split), and adds ``learning_rate`` times the tree to
the margin. This is the algorithm behind XGBoost's ``binary:logistic``
objective; numerics are not meant to match that library.
"""
import numpy as np

from .. import _rng
from .base import BinaryClassifier, log1pexp, sigmoid
from .forest import _n_features
from .tree import Tree, grow_tree, newton_criterion


class GradientBoostedTrees(BinaryClassifier):
    """Newton-boosted regression trees for binary labels.

    Parameters
    ----------
    n_rounds : int, default=100
    learning_rate : float in (0, 1], default=0.1
    max_depth : int, default=3
    reg_lambda : float, default=1.0
    gamma : float, default=0.0
    min_child_weight : float, default=1.0
        Minimum hessian sum per child.
    min_leaf : int, default=1
    subsample : float in (0, 1], default=1.0
        Fraction of rows drawn without replacement per round.
    colsample : float in (0, 1], default=1.0
        Fraction of features considered per split.
    base_score : float in (0, 1), default=0.5
        Initial probability; the starting margin is its log-odds.
    class_weight : "balanced", dict or None
    random_state : int, default=0
    """

    kind = "gbt"

    def __init__(self, n_rounds=100, learning_rate=0.1, max_depth=3, reg_lambda=1.0,
                 gamma=0.0, min_child_weight=1.0, min_leaf=1, subsample=1.0, colsample=1.0,
                 base_score=0.5, class_weight=None, random_state=0):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.reg_lambda = reg_lambda
        self.gamma = gamma
        self.min_child_weight = min_child_weight
        self.min_leaf = min_leaf
        self.subsample = subsample
        self.colsample = colsample
        self.base_score = base_score
        self.class_weight = class_weight
        self.random_state = random_state

    def _fit(self, X, y, w):
        n, d = X.shape
        self.base_margin_ = float(np.log(self.base_score / (1 - self.base_score)))
        margin = np.full(n, self.base_margin_)
        k = None if self.colsample >= 1 else _n_features(float(self.colsample), d)
        self.trees_ = []
        wsum = w.sum()
        for r in range(int(self.n_rounds)):
            rng = _rng.stream(self.random_state, "gbt", "round", r)
            p = sigmoid(margin)
            g = w * (p - y)
            h = w * p * (1 - p)
            rows = None
            if self.subsample < 1:
                m = max(1, int(round(self.subsample * n)))
                rows = np.sort(rng.choice(n, size=m, replace=False))
            crit = newton_criterion(g, h, self.reg_lambda, self.gamma, self.min_child_weight)
            tree = grow_tree(X, crit, self.max_depth, int(self.min_leaf), k, rng, rows=rows)
            tree.value *= self.learning_rate
            self.trees_.append(tree)
            margin = margin + tree.predict(X)
            loss = float((w * (log1pexp(margin) - y * margin)).sum() / wsum)
            self.training_log_.append({"round": r, "loss": loss})
        imp = sum(t.importance(d) for t in self.trees_)
        total = imp.sum()
        self.feature_importances_ = imp / total if total > 0 else imp

    def decision_function(self, X):
        X = self._check_X(X)
        margin = np.full(len(X), self.base_margin_)
        for tree in self.trees_:
            margin += tree.predict(X)
        return margin

    def _proba(self, X):
        return sigmoid(self.decision_function(X))

    def _get_state(self):
        return {"trees": [t.to_dict() for t in self.trees_],
                "base_margin": self.base_margin_,
                "feature_importances": self.feature_importances_.tolist()}

    def _set_state(self, state):
        self.trees_ = [Tree.from_dict(t) for t in state["trees"]]
        self.base_margin_ = float(state["base_margin"])
        self.feature_importances_ = np.array(state["feature_importances"], dtype=float)
