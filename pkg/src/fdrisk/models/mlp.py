"""Fully connected ReLU network with a sigmoid output, trained by mini-batch SGD."""
import numpy as np

from .. import _rng
from .base import BinaryClassifier, log1pexp, sigmoid


def init_params(layer_sizes, rng):
    """He-initialized weights and zero biases for ``layer_sizes = [d, h1, ..., 1]``."""
    params = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        W = rng.normal(0.0, np.sqrt(2.0 / max(fan_in, 1)), size=(fan_in, fan_out))
        params.append((W, np.zeros(fan_out)))
    return params


def forward(params, X):
    """Output logits and the per-layer activations needed for backprop."""
    acts = [X]
    pre = []
    a = X
    for k, (W, b) in enumerate(params):
        z = a @ W + b
        pre.append(z)
        a = z if k == len(params) - 1 else np.maximum(z, 0.0)
        acts.append(a)
    return acts[-1][:, 0], acts, pre


def loss_and_grad(params, X, y, w, l2=0.0):
    """Weighted mean cross-entropy plus ``l2/2 * sum ||W||^2`` and its gradient."""
    logits, acts, pre = forward(params, X)
    wsum = w.sum()
    loss = float((w * (log1pexp(logits) - y * logits)).sum() / wsum)
    loss += 0.5 * l2 * sum(float((W * W).sum()) for W, _ in params)
    delta = ((w * (sigmoid(logits) - y)) / wsum)[:, None]
    grads = [None] * len(params)
    for k in range(len(params) - 1, -1, -1):
        W, _ = params[k]
        gW = acts[k].T @ delta + l2 * W
        gb = delta.sum(axis=0)
        grads[k] = (gW, gb)
        if k:
            delta = (delta @ W.T) * (pre[k - 1] > 0)
    return loss, grads


class MLPClassifier(BinaryClassifier):
    """ReLU hidden layers, sigmoid output, weighted cross-entropy.

    Plain mini-batch gradient descent with a constant learning rate; batch
    order per epoch comes from the seeded stream ``("mlp", "epoch", e)``.

    Parameters
    ----------
    hidden_layers : tuple of int, default=(16,)
    epochs : int, default=200
    batch_size : int, default=32
    learning_rate : float, default=0.05
    l2 : float, default=1e-4
    class_weight : "balanced", dict or None
    random_state : int, default=0
    """

    kind = "mlp"

    def __init__(self, hidden_layers=(16,), epochs=200, batch_size=32, learning_rate=0.05,
                 l2=1e-4, class_weight=None, random_state=0):
        self.hidden_layers = hidden_layers
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.l2 = l2
        self.class_weight = class_weight
        self.random_state = random_state

    def _fit(self, X, y, w):
        n, d = X.shape
        sizes = [d] + [int(h) for h in self.hidden_layers] + [1]
        params = init_params(sizes, _rng.stream(self.random_state, "mlp", "init"))
        yf = y.astype(float)
        bs = max(1, int(self.batch_size))
        lr = float(self.learning_rate)
        for e in range(int(self.epochs)):
            order = _rng.stream(self.random_state, "mlp", "epoch", e).permutation(n)
            for start in range(0, n, bs):
                rows = order[start:start + bs]
                if w[rows].sum() <= 0:
                    continue
                _, grads = loss_and_grad(params, X[rows], yf[rows], w[rows], self.l2)
                params = [(W - lr * gW, b - lr * gb) for (W, b), (gW, gb) in zip(params, grads)]
            loss, _ = loss_and_grad(params, X, yf, w, self.l2)
            self.training_log_.append({"epoch": e, "loss": loss})
        self.params_ = params

    def _proba(self, X):
        return sigmoid(forward(self.params_, X)[0])

    def _get_state(self):
        return {"params": [[W.tolist(), b.tolist()] for W, b in self.params_]}

    def _set_state(self, state):
        self.params_ = [(np.array(W, dtype=float).reshape(len(W), -1), np.array(b, dtype=float))
                        for W, b in state["params"]]
