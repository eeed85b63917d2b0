"""Random forest of weighted-Gini CART trees."""
import math

import numpy as np

from .. import _rng
from .base import BinaryClassifier
from .tree import Tree, gini_criterion, grow_tree


def _n_features(max_features, d):
    if max_features is None:
        return d
    if max_features == "sqrt":
        return max(1, int(math.sqrt(d)))
    if max_features == "log2":
        return max(1, int(math.log2(d))) if d > 1 else 1
    if isinstance(max_features, float):
        return max(1, int(max_features * d))
    return max(1, min(int(max_features), d))


class RandomForest(BinaryClassifier):
    """Bagged CART trees with per-split feature subsampling.

    Bootstrap draws enter as integer multiplicities on the sample weights,
    so class weights and bootstrap compose. ``predict_proba`` averages the
    leaf class-1 fractions of all trees.

    Parameters
    ----------
    n_trees : int, default=100
    max_depth : int or None, default=None
        ``None`` grows until leaves are pure or ``min_leaf`` stops them.
    min_leaf : int, default=1
        Minimum number of rows in a leaf.
    max_features : {"sqrt", "log2"}, int, float or None, default="sqrt"
    bootstrap : bool, default=True
    class_weight : "balanced", dict or None
    random_state : int, default=0
    """

    kind = "random_forest"
    _state_attrs = ("trees_", "n_features_in_", "feature_importances_")

    def __init__(self, n_trees=100, max_depth=None, min_leaf=1, max_features="sqrt",
                 bootstrap=True, class_weight=None, random_state=0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.class_weight = class_weight
        self.random_state = random_state

    def _fit(self, X, y, w):
        n, d = X.shape
        k = _n_features(self.max_features, d)
        self.trees_ = []
        for t in range(int(self.n_trees)):
            rng = _rng.stream(self.random_state, "random_forest", "tree", t)
            if self.bootstrap:
                mult = np.bincount(rng.integers(0, n, size=n), minlength=n)
                rows = np.nonzero(mult)[0]
                wt = w * mult
            else:
                rows = np.arange(n)
                wt = w
            tree = grow_tree(X, gini_criterion(y, wt), self.max_depth, int(self.min_leaf),
                             k, rng, rows=rows)
            self.trees_.append(tree)
            self.training_log_.append({"tree": t, "n_nodes": tree.n_nodes})
        imp = sum(tree.importance(d) for tree in self.trees_)
        total = imp.sum()
        self.feature_importances_ = imp / total if total > 0 else imp

    def _proba(self, X):
        p = np.zeros(len(X))
        for tree in self.trees_:
            p += tree.predict(X)
        return p / len(self.trees_)

    def _get_state(self):
        return {"trees": [t.to_dict() for t in self.trees_],
                "feature_importances": self.feature_importances_.tolist()}

    def _set_state(self, state):
        self.trees_ = [Tree.from_dict(t) for t in state["trees"]]
        self.feature_importances_ = np.array(state["feature_importances"], dtype=float)
