from __future__ import annotations

import numpy as np

from .base import Classifier, normalize_log

VAR_FLOOR = 1e-6


class NaiveBayes(Classifier):
    """Naive Bayes with add-one smoothed nominal likelihoods and per-class
    Gaussians for numeric attributes.  Priors are the raw training
    frequencies, so a class absent from training gets probability zero."""

    name = "naive_bayes"

    def __init__(self, alpha: float = 1.0):
        super().__init__()
        self.alpha = alpha

    def _fit(self, d):
        K = d.n_classes
        counts = d.class_counts().astype(float)
        with np.errstate(divide="ignore"):
            self.log_prior_ = np.log(counts / counts.sum())
        self.tables_ = []
        for j, attr in enumerate(d.schema):
            col = d.X[:, j]
            if attr.is_nominal:
                V = len(attr.values)
                table = np.zeros((K, V))
                np.add.at(table, (d.y, col.astype(int)), 1.0)
                table = (table + self.alpha) / (counts[:, None] + self.alpha * V)
                self.tables_.append(("nominal", np.log(table)))
            else:
                mean = np.zeros(K)
                var = np.full(K, 1.0)
                for c in range(K):
                    vals = col[d.y == c]
                    if vals.size:
                        mean[c] = vals.mean()
                        var[c] = vals.var()
                self.tables_.append(("numeric", (mean, np.maximum(var, VAR_FLOOR))))

    def _joint_log(self, X):
        logp = np.tile(self.log_prior_, (X.shape[0], 1))
        for j, (kind, params) in enumerate(self.tables_):
            col = X[:, j]
            if kind == "nominal":
                logp += params[:, col.astype(int)].T
            else:
                mean, var = params
                diff = col[:, None] - mean[None, :]
                logp += -0.5 * (np.log(2 * np.pi * var)[None, :] + diff ** 2 / var[None, :])
        return logp

    def _predict_proba(self, X):
        return normalize_log(self._joint_log(X))
