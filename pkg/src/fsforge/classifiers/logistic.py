from __future__ import annotations

import numpy as np

from .base import Classifier, InputEncoder, softmax


def loss_and_grad(W: np.ndarray, b: np.ndarray, X: np.ndarray, Y: np.ndarray, ridge: float):
    """Mean cross-entropy plus ``ridge/2 * ||W||^2`` and its gradient.

    ``W`` is (inputs, classes), ``b`` (classes,), ``Y`` one-hot targets.
    """
    n = X.shape[0]
    P = softmax(X @ W + b)
    loss = -np.sum(Y * np.log(np.clip(P, 1e-300, None))) / n + 0.5 * ridge * np.sum(W * W)
    R = (P - Y) / n
    return loss, X.T @ R + ridge * W, R.sum(axis=0)


class Logistic(Classifier):
    """Multinomial logistic regression fitted by full-batch gradient descent."""

    name = "logistic"

    def __init__(self, ridge: float = 1e-8, learning_rate: float = 0.1,
                 max_epochs: int = 2000, tol: float = 1e-6):
        super().__init__()
        self.ridge = ridge
        self.learning_rate = learning_rate
        self.max_epochs = max_epochs
        self.tol = tol

    def _fit(self, d):
        self.encoder_ = InputEncoder("standard").fit(d)
        X = self.encoder_.transform(d.X)
        Y = np.eye(d.n_classes)[d.y]
        self.W_ = np.zeros((X.shape[1], d.n_classes))
        self.b_ = np.zeros(d.n_classes)
        self.epochs_ = 0
        for epoch in range(self.max_epochs):
            _, gW, gb = loss_and_grad(self.W_, self.b_, X, Y, self.ridge)
            if np.sqrt(np.sum(gW * gW) + np.sum(gb * gb)) < self.tol:
                break
            self.W_ -= self.learning_rate * gW
            self.b_ -= self.learning_rate * gb
            self.epochs_ = epoch + 1

    def _predict_proba(self, X):
        return softmax(self.encoder_.transform(X) @ self.W_ + self.b_)
