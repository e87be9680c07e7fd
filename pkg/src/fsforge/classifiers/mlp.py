from __future__ import annotations

import math

import numba
import numpy as np

from .base import Classifier, InputEncoder, softmax


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def forward(params, X):
    W1, b1, W2, b2 = params
    H = _sigmoid(X @ W1 + b1)
    return H, softmax(H @ W2 + b2)


def loss_and_grad(params, X, Y):
    """Summed cross-entropy over the batch and its backpropagated gradient."""
    W1, b1, W2, b2 = params
    H, P = forward(params, X)
    loss = -np.sum(Y * np.log(np.clip(P, 1e-300, None)))
    dZ2 = P - Y
    dH = dZ2 @ W2.T
    dZ1 = dH * H * (1.0 - H)
    return loss, [X.T @ dZ1, dZ1.sum(axis=0), H.T @ dZ2, dZ2.sum(axis=0)]


@numba.njit(cache=True)
def _train_online(X, y, W1, b1, W2, b2, order, lr, momentum, epochs):
    n, n_in = X.shape
    H = W1.shape[1]
    K = W2.shape[1]
    vW1 = np.zeros_like(W1)
    vb1 = np.zeros_like(b1)
    vW2 = np.zeros_like(W2)
    vb2 = np.zeros_like(b2)
    h = np.zeros(H)
    z = np.zeros(K)
    dz = np.zeros(K)
    dh = np.zeros(H)
    for _ in range(epochs):
        for t in range(n):
            i = order[t]
            for u in range(H):
                s = b1[u]
                for a in range(n_in):
                    s += X[i, a] * W1[a, u]
                h[u] = 0.5 * (1.0 + np.tanh(0.5 * s))
            top = -np.inf
            for k in range(K):
                s = b2[k]
                for u in range(H):
                    s += h[u] * W2[u, k]
                z[k] = s
                if s > top:
                    top = s
            total = 0.0
            for k in range(K):
                z[k] = np.exp(z[k] - top)
                total += z[k]
            for k in range(K):
                dz[k] = z[k] / total - (1.0 if k == y[i] else 0.0)
            for u in range(H):
                s = 0.0
                for k in range(K):
                    s += dz[k] * W2[u, k]
                dh[u] = s * h[u] * (1.0 - h[u])
            for u in range(H):
                for k in range(K):
                    vW2[u, k] = momentum * vW2[u, k] - lr * h[u] * dz[k]
                    W2[u, k] += vW2[u, k]
            for k in range(K):
                vb2[k] = momentum * vb2[k] - lr * dz[k]
                b2[k] += vb2[k]
            for a in range(n_in):
                xa = X[i, a]
                for u in range(H):
                    vW1[a, u] = momentum * vW1[a, u] - lr * xa * dh[u]
                    W1[a, u] += vW1[a, u]
            for u in range(H):
                vb1[u] = momentum * vb1[u] - lr * dh[u]
                b1[u] += vb1[u]


class MLP(Classifier):
    """One-hidden-layer perceptron with sigmoid hidden units and softmax output.

    Trained by backpropagation with momentum, one update per instance, in an
    order fixed by ``seed``.  Hidden width defaults to
    ceil((encoded inputs + classes) / 2).
    """

    name = "mlp"

    def __init__(self, hidden: int | None = None, learning_rate: float = 0.3,
                 momentum: float = 0.2, epochs: int = 500, seed: int = 0):
        super().__init__()
        self.hidden = hidden
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.epochs = epochs
        self.seed = seed

    def _fit(self, d):
        self.encoder_ = InputEncoder("range").fit(d)
        X = np.ascontiguousarray(self.encoder_.transform(d.X))
        n_in, K = X.shape[1], d.n_classes
        H = self.hidden or max(1, math.ceil((n_in + K) / 2))
        rng = np.random.default_rng(self.seed)
        self.params_ = [rng.uniform(-0.5, 0.5, size=s) for s in [(n_in, H), (H,), (H, K), (K,)]]
        order = rng.permutation(len(d)).astype(np.int64)
        _train_online(X, d.y.astype(np.int64), *self.params_, order,
                      float(self.learning_rate), float(self.momentum), int(self.epochs))

    def _predict_proba(self, X):
        return forward(self.params_, self.encoder_.transform(X))[1]
