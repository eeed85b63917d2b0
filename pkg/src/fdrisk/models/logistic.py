"""L2-penalized logistic regression fitted by damped Newton iterations."""
import warnings

import numpy as np

from ..exceptions import ConvergenceWarning
from .base import BinaryClassifier, log1pexp, sigmoid


class LogisticRegression(BinaryClassifier):
    """Weighted logistic regression.

    Minimizes the weight-normalized log loss plus ``l2 / 2 * ||coef||^2``
    (the intercept is not penalized), stopping once the gradient max-norm
    drops below ``tol``.
    """

    kind = "logistic"

    def __init__(self, l2=1e-2, tol=1e-8, max_iter=100, class_weight=None, random_state=0):
        self.l2 = l2
        self.tol = tol
        self.max_iter = max_iter
        self.class_weight = class_weight
        self.random_state = random_state

    def _objective(self, beta, Z, y, w, wsum):
        z = Z @ beta
        loss = (w * (log1pexp(z) - y * z)).sum() / wsum
        return loss + 0.5 * self.l2 * float(beta[1:] @ beta[1:])

    def _fit(self, X, y, w):
        n, d = X.shape
        Z = np.column_stack([np.ones(n), X])
        wsum = w.sum()
        pen = np.full(d + 1, float(self.l2))
        pen[0] = 0.0
        beta = np.zeros(d + 1)
        obj = self._objective(beta, Z, y, w, wsum)
        self.converged_ = False
        for it in range(int(self.max_iter)):
            p = sigmoid(Z @ beta)
            grad = Z.T @ (w * (p - y)) / wsum + pen * beta
            gnorm = float(np.abs(grad).max())
            self.training_log_.append({"iteration": it, "loss": obj, "grad_norm": gnorm})
            if gnorm < self.tol:
                self.converged_ = True
                break
            hess = (Z * (w * p * (1 - p))[:, None]).T @ Z / wsum + np.diag(pen)
            try:
                step = np.linalg.solve(hess + 1e-12 * np.eye(d + 1), grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(hess, grad, rcond=None)[0]
            t = 1.0
            while True:
                cand = beta - t * step
                new = self._objective(cand, Z, y, w, wsum)
                if new <= obj - 1e-4 * t * float(grad @ step) or t < 1e-10:
                    break
                t *= 0.5
            beta, obj = cand, new
        if not self.converged_:
            self.convergence_warning_ = f"gradient norm above {self.tol} after {self.max_iter} iterations"
            warnings.warn(self.convergence_warning_, ConvergenceWarning, stacklevel=3)
        self.intercept_ = float(beta[0])
        self.coef_ = beta[1:].copy()

    def decision_function(self, X):
        X = self._check_X(X)
        return self.intercept_ + X @ self.coef_

    def _proba(self, X):
        return sigmoid(self.intercept_ + X @ self.coef_)

    def _get_state(self):
        return {"intercept": self.intercept_, "coef": self.coef_.tolist(),
                "converged": self.converged_}

    def _set_state(self, state):
        self.intercept_ = float(state["intercept"])
        self.coef_ = np.array(state["coef"], dtype=float)
        self.converged_ = bool(state["converged"])
