"""Soft-margin SVM: SMO dual solver with second-order working-set selection.

The dual is ``min 1/2 a'Qa - e'a`` with ``Q_ij = y_i y_j K(x_i, x_j)``,
``0 <= a_i <= C w_i`` and ``y'a = 0`` (labels mapped to -1/+1). Pair
selection and the two-variable update follow Fan, Chen and Lin (2005).
Probabilities come from a Platt sigmoid fitted to the training decision
values.
"""
import warnings

import numpy as np

from ..exceptions import ConvergenceWarning
from .base import BinaryClassifier

_TAU = 1e-12


def kernel_matrix(A, B, kernel, gamma):
    if kernel == "linear":
        return A @ B.T
    if kernel == "rbf":
        aa = np.einsum("ij,ij->i", A, A)[:, None]
        bb = np.einsum("ij,ij->i", B, B)[None, :]
        d2 = np.maximum(aa + bb - 2 * A @ B.T, 0.0)
        return np.exp(-gamma * d2)
    raise ValueError(f"unknown kernel {kernel!r}")


def smo(K, y, C, tol=1e-3, max_iter=100_000):
    """Solve the dual. Returns ``(alpha, rho, n_iter, converged)``.

    ``y`` in {-1, +1}; ``C`` per-row upper bounds.
    """
    n = len(y)
    Q = (y[:, None] * y[None, :]) * K
    diagQ = np.diag(Q).copy()
    alpha = np.zeros(n)
    G = -np.ones(n)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        score = -y * G
        su = np.where(up, score, -np.inf)
        i = int(np.argmax(su))
        gmax = su[i]
        sl = np.where(low, score, np.inf)
        gmin = float(sl.min())
        if gmax - gmin < tol:
            converged = True
            break
        b = gmax - score
        cand = low & (b > 0)
        a = diagQ[i] + diagQ - 2.0 * y[i] * y * Q[i]
        a = np.where(a > 0, a, _TAU)
        obj = np.where(cand, -(b * b) / a, np.inf)
        j = int(np.argmin(obj))

        Ci, Cj = C[i], C[j]
        ai_old, aj_old = alpha[i], alpha[j]
        ai, aj = ai_old, aj_old
        if y[i] != y[j]:
            quad = diagQ[i] + diagQ[j] + 2.0 * Q[i, j]
            quad = quad if quad > 0 else _TAU
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > Ci - Cj:
                if ai > Ci:
                    ai, aj = Ci, Ci - diff
            elif aj > Cj:
                aj, ai = Cj, Cj + diff
        else:
            quad = diagQ[i] + diagQ[j] - 2.0 * Q[i, j]
            quad = quad if quad > 0 else _TAU
            delta = (G[i] - G[j]) / quad
            total = ai + aj
            ai -= delta
            aj += delta
            if total > Ci:
                if ai > Ci:
                    ai, aj = Ci, total - Ci
            elif aj < 0:
                aj, ai = 0.0, total
            if total > Cj:
                if aj > Cj:
                    aj, ai = Cj, total - Cj
            elif ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        G += Q[i] * (ai - ai_old) + Q[j] * (aj - aj_old)

    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yG[free].mean())
    else:
        # no free vector: rho is any value between the bound-constrained extremes
        at_c = alpha >= C
        at_0 = ~at_c
        ub = yG[(at_c & (y < 0)) | (at_0 & (y > 0))]
        lb = yG[(at_c & (y > 0)) | (at_0 & (y < 0))]
        hi = float(ub.min()) if len(ub) else np.inf
        lo = float(lb.max()) if len(lb) else -np.inf
        if np.isfinite(hi) and np.isfinite(lo):
            rho = (hi + lo) / 2
        else:
            rho = hi if np.isfinite(hi) else lo if np.isfinite(lo) else 0.0
    return alpha, rho, it, converged


def platt_fit(f, labels, max_iter=100, min_step=1e-10, sigma=1e-12):
    """Fit ``P(y=1|f) = 1 / (1 + exp(A f + B))`` (Lin, Lin and Weng 2007)."""
    prior1 = float((labels == 1).sum())
    prior0 = float(len(labels) - prior1)
    hi = (prior1 + 1.0) / (prior1 + 2.0)
    lo = 1.0 / (prior0 + 2.0)
    t = np.where(labels == 1, hi, lo)
    A, B = 0.0, np.log((prior0 + 1.0) / (prior1 + 1.0))

    def objective(A, B):
        z = f * A + B
        return float(np.where(z >= 0, t * z + np.log1p(np.exp(-z)),
                              (t - 1) * z + np.log1p(np.exp(z))).sum())

    fval = objective(A, B)
    for _ in range(max_iter):
        z = f * A + B
        p = np.where(z >= 0, np.exp(-z) / (1 + np.exp(-z)), 1 / (1 + np.exp(z)))
        q = 1 - p
        d2 = p * q
        h11 = sigma + float((f * f * d2).sum())
        h22 = sigma + float(d2.sum())
        h21 = float((f * d2).sum())
        d1 = t - p
        g1 = float((f * d1).sum())
        g2 = float(d1.sum())
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= min_step:
            nA, nB = A + step * dA, B + step * dB
            nf = objective(nA, nB)
            if nf < fval + 1e-4 * step * gd:
                A, B, fval = nA, nB, nf
                break
            step /= 2
        else:
            break
    return A, B


class SVMClassifier(BinaryClassifier):
    """Kernel SVM with class-weighted box constraints and Platt probabilities.

    Parameters
    ----------
    C : float, default=1.0
        Box bound per unit weight; row ``i`` gets ``C * w_i / mean(w)``.
    kernel : {"rbf", "linear"}, default="rbf"
    gamma : float or "auto", default="auto"
        RBF width; ``"auto"`` is ``1 / n_features``.
    tol : float, default=1e-3
        KKT violation tolerance of the SMO stopping rule.
    max_iter : int, default=100000
    class_weight : "balanced", dict or None
    random_state : int, default=0
        Unused (the solver is deterministic); kept for a uniform interface.
    """

    kind = "svm"

    def __init__(self, C=1.0, kernel="rbf", gamma="auto", tol=1e-3, max_iter=100_000,
                 class_weight=None, random_state=0):
        self.C = C
        self.kernel = kernel
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter
        self.class_weight = class_weight
        self.random_state = random_state

    def _gamma(self, d):
        if self.gamma == "auto":
            return 1.0 / max(d, 1)
        return float(self.gamma)

    def _fit(self, X, y, w):
        ys = np.where(y == 1, 1.0, -1.0)
        self.gamma_ = self._gamma(X.shape[1])
        K = kernel_matrix(X, X, self.kernel, self.gamma_)
        # weights rescaled to mean 1 so C keeps its meaning and a uniform
        # rescaling of the weights leaves the solution unchanged
        Cw = float(self.C) * w / w.mean()
        alpha, rho, n_iter, converged = smo(K, ys, Cw, self.tol, int(self.max_iter))
        self.n_iter_ = n_iter
        self.converged_ = converged
        self.training_log_.append({"iterations": n_iter, "converged": converged})
        if not converged:
            self.convergence_warning_ = f"SMO stopped at max_iter={self.max_iter} before reaching tol={self.tol}"
            warnings.warn(self.convergence_warning_, ConvergenceWarning, stacklevel=3)
        sv = alpha > 0
        self.alpha_ = alpha
        self.upper_bounds_ = Cw
        self.support_ = np.nonzero(sv)[0]
        self.support_vectors_ = X[sv].copy()
        self.dual_coef_ = (alpha * ys)[sv]
        self.intercept_ = -rho
        f = K[:, sv] @ self.dual_coef_ + self.intercept_
        self.train_decision_ = f
        self.prob_a_, self.prob_b_ = platt_fit(f, y)

    def decision_function(self, X):
        X = self._check_X(X)
        return self._decision(X)

    def _decision(self, X):
        if len(self.dual_coef_) == 0:
            return np.full(len(X), self.intercept_)
        K = kernel_matrix(X, self.support_vectors_, self.kernel, self.gamma_)
        return K @ self.dual_coef_ + self.intercept_

    def _proba(self, X):
        z = self._decision(X) * self.prob_a_ + self.prob_b_
        return np.where(z >= 0, np.exp(-z) / (1 + np.exp(-z)), 1 / (1 + np.exp(z)))

    @property
    def coef_(self):
        if self.kernel != "linear":
            raise AttributeError("coef_ is only defined for the linear kernel")
        return self.dual_coef_ @ self.support_vectors_

    def _get_state(self):
        return {"gamma": self.gamma_, "support_vectors": self.support_vectors_.tolist(),
                "dual_coef": self.dual_coef_.tolist(), "intercept": self.intercept_,
                "prob_a": self.prob_a_, "prob_b": self.prob_b_, "n_iter": self.n_iter_,
                "converged": self.converged_}

    def _set_state(self, state):
        self.gamma_ = float(state["gamma"])
        d = self.n_features_in_
        self.support_vectors_ = np.array(state["support_vectors"], dtype=float).reshape(-1, d)
        self.dual_coef_ = np.array(state["dual_coef"], dtype=float)
        self.intercept_ = float(state["intercept"])
        self.prob_a_ = float(state["prob_a"])
        self.prob_b_ = float(state["prob_b"])
        self.n_iter_ = int(state["n_iter"])
        self.converged_ = bool(state["converged"])
