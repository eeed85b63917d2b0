"""Binary decision trees grown by exhaustive threshold search.

Two split criteria share one grower:

* ``gini`` -- weighted Gini impurity; leaves store the weighted fraction of
  class 1 (used by the random forest).
* ``newton`` -- second-order boosting gain
  ``1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma``;
  leaves store ``-G/(H+lambda)`` (used by gradient boosting).

Ties in gain go to the lowest feature index, then the lowest threshold.
Rows with ``x <= threshold`` go left.
"""
from dataclasses import dataclass

import numpy as np

LEAF = -1
GAIN_RTOL = 1e-12


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    gain: np.ndarray      # criterion decrease at each split node (0 at leaves)
    n_samples: np.ndarray
    depth: int

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def n_leaves(self):
        return int((self.feature == LEAF).sum())

    def apply(self, X):
        node = np.zeros(len(X), dtype=np.int64)
        for _ in range(self.depth):
            f = self.feature[node]
            internal = f != LEAF
            if not internal.any():
                break
            rows = np.nonzero(internal)[0]
            nd = node[rows]
            go_left = X[rows, self.feature[nd]] <= self.threshold[nd]
            node[rows] = np.where(go_left, self.left[nd], self.right[nd])
        return node

    def predict(self, X):
        return self.value[self.apply(X)]

    def importance(self, n_features):
        imp = np.zeros(n_features)
        split = self.feature != LEAF
        np.add.at(imp, self.feature[split], self.gain[split])
        return imp

    def to_dict(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "gain": self.gain.tolist(),
            "n_samples": self.n_samples.tolist(),
            "depth": self.depth,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            np.array(d["feature"], dtype=np.int64),
            np.array(d["threshold"], dtype=float),
            np.array(d["left"], dtype=np.int64),
            np.array(d["right"], dtype=np.int64),
            np.array(d["value"], dtype=float),
            np.array(d["gain"], dtype=float),
            np.array(d["n_samples"], dtype=np.int64),
            int(d["depth"]),
        )


def _midpoint(lo, hi):
    mid = lo + (hi - lo) / 2
    # rounding must not push the threshold onto the right-hand value
    return np.where(mid >= hi, lo, mid)


class _Gini:
    def __init__(self, y, w):
        self.a = w * y          # positive weight
        self.b = w              # total weight

    def node_value(self, A, B):
        return A / B if B > 0 else 0.0

    @staticmethod
    def score(A, B):
        # weighted impurity W * gini = 2 W1 W0 / W (0 for empty nodes)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(B > 0, 2.0 * A * (B - A) / np.where(B > 0, B, 1.0), 0.0)

    def gain(self, AL, BL, A, B):
        return self.score(A, B) - self.score(AL, BL) - self.score(A - AL, B - BL)

    def admissible(self, AL, BL, A, B):
        return np.ones_like(AL, dtype=bool)

    def is_terminal(self, A, B):
        return A <= 0 or A >= B

    def scale(self, idx):
        return float(self.score(self.a[idx].sum(), self.b[idx].sum()))


class _Newton:
    def __init__(self, g, h, reg_lambda, gamma, min_child_weight):
        self.a = g
        self.b = h
        self.lam = reg_lambda
        self.gamma = gamma
        self.mcw = min_child_weight

    def node_value(self, G, H):
        return -G / (H + self.lam)

    def score(self, G, H):
        return G * G / (H + self.lam)

    def gain(self, GL, HL, G, H):
        return 0.5 * (self.score(GL, HL) + self.score(G - GL, H - HL) - self.score(G, H)) - self.gamma

    def admissible(self, GL, HL, G, H):
        return (HL >= self.mcw) & (H - HL >= self.mcw)

    def is_terminal(self, G, H):
        return False

    def scale(self, idx):
        return float(self.score(np.abs(self.a[idx]).sum(), self.b[idx].sum()))


def best_split(X, idx, features, crit, min_leaf):
    """Best ``(gain, feature, threshold)`` for rows ``idx`` over ``features`` (ascending)."""
    a = crit.a[idx]
    b = crit.b[idx]
    A = a.sum()
    B = b.sum()
    n = len(idx)
    best = None
    if n < 2 * min_leaf:
        return None
    # gains within tol of each other are ties; a split must beat tol to count
    tol = GAIN_RTOL * crit.scale(idx)
    lo = min_leaf - 1           # last admissible left index
    hi = n - min_leaf - 1
    for f in features:
        x = X[idx, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        AL = np.cumsum(a[order])[lo:hi + 1]
        BL = np.cumsum(b[order])[lo:hi + 1]
        distinct = xs[lo:hi + 1] < xs[lo + 1:hi + 2]
        ok = distinct & crit.admissible(AL, BL, A, B)
        if not ok.any():
            continue
        gains = crit.gain(AL, BL, A, B)
        gains = np.where(ok, gains, -np.inf)
        # lowest threshold among near-equal gains
        k = int(np.argmax(gains >= gains.max() - tol))
        g = float(gains[k])
        if g > tol and (best is None or g > best[0] + tol):
            thr = float(_midpoint(xs[lo + k], xs[lo + k + 1]))
            best = (g, int(f), thr)
    return best


def grow_tree(X, crit, max_depth=None, min_leaf=1, max_features=None, rng=None, rows=None):
    """Grow a tree depth-first (left child first).

    ``max_features`` features are drawn without replacement at each node from
    ``rng``; ``None`` uses all features.
    """
    n, d = X.shape
    max_depth = np.inf if max_depth is None else max_depth
    rows = np.arange(n) if rows is None else np.asarray(rows)
    feature, threshold, left, right, value, gain, counts = [], [], [], [], [], [], []
    depth_reached = 0

    def new_node(idx):
        A = crit.a[idx].sum()
        B = crit.b[idx].sum()
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(crit.node_value(A, B)))
        gain.append(0.0)
        counts.append(len(idx))
        return len(feature) - 1, A, B

    root, A0, B0 = new_node(rows)
    stack = [(root, rows, 0, A0, B0)]
    while stack:
        node, idx, depth, A, B = stack.pop()
        depth_reached = max(depth_reached, depth)
        if depth >= max_depth or crit.is_terminal(A, B) or len(idx) < 2 * min_leaf:
            continue
        if max_features is None or max_features >= d:
            feats = range(d)
        else:
            feats = np.sort(rng.choice(d, size=max_features, replace=False))
        split = best_split(X, idx, feats, crit, min_leaf)
        if split is None:
            continue
        g, f, thr = split
        go_left = X[idx, f] <= thr
        li, ri = idx[go_left], idx[~go_left]
        l_node, AL, BL = new_node(li)
        r_node, AR, BR = new_node(ri)
        feature[node] = f
        threshold[node] = thr
        left[node] = l_node
        right[node] = r_node
        gain[node] = g
        # push right first so the left subtree is expanded first
        stack.append((r_node, ri, depth + 1, AR, BR))
        stack.append((l_node, li, depth + 1, AL, BL))
    return Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=float),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=float),
        np.array(gain, dtype=float),
        np.array(counts, dtype=np.int64),
        int(depth_reached) + 1,
    )


def gini_criterion(y, w):
    return _Gini(np.asarray(y, dtype=float), np.asarray(w, dtype=float))


def newton_criterion(g, h, reg_lambda=1.0, gamma=0.0, min_child_weight=1.0):
    return _Newton(np.asarray(g, dtype=float), np.asarray(h, dtype=float),
                   reg_lambda, gamma, min_child_weight)
