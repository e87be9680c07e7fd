from __future__ import annotations

import numpy as np

from ..data import Dataset, Instance


class NotFittedError(RuntimeError):
    pass


class Classifier:
    """Common surface: ``fit(dataset)`` then class-probability vectors over the
    training class domain."""

    name = "classifier"

    def __init__(self):
        self.n_classes_ = None

    def fit(self, d: Dataset) -> "Classifier":
        if len(d) == 0:
            raise ValueError("cannot fit on an empty dataset")
        if d.has_missing():
            raise ValueError("impute missing cells before fitting")
        self.n_classes_ = d.n_classes
        self.schema_ = d.schema
        self._fit(d)
        return self

    def _fit(self, d: Dataset) -> None:
        raise NotImplementedError

    def _check_fitted(self):
        if self.n_classes_ is None:
            raise NotFittedError(f"{self.name} used before fit")

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Distributions for the rows of a cell matrix laid out like the
        training schema."""
        self._check_fitted()
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        return self._predict_proba(X)

    def _predict_proba(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict_dataset(self, d: Dataset) -> np.ndarray:
        return self.predict_proba(d.X)

    def predict_distribution(self, inst: Instance) -> np.ndarray:
        row = [np.nan if v is None else v for v in inst.values]
        return self.predict_proba(np.array(row, dtype=float))[0]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def normalize_log(logp: np.ndarray) -> np.ndarray:
    """Row-wise exp-normalize of log scores; -inf entries become exact zeros."""
    top = logp.max(axis=1, keepdims=True)
    p = np.exp(logp - top)
    return p / p.sum(axis=1, keepdims=True)


def laplace_distribution(counts: np.ndarray, observed: np.ndarray) -> np.ndarray:
    """Add-one smoothed class frequencies restricted to the classes seen in
    training; unseen classes keep probability zero."""
    counts = np.asarray(counts, dtype=float)
    smoothed = np.where(observed, counts + 1.0, 0.0)
    return smoothed / smoothed.sum()


class InputEncoder:
    """Nominal-to-binary plus numeric scaling for the gradient-trained models.

    Two-valued nominal attributes become one 0/1 column, wider ones one-hot
    columns.  Numeric columns are either standardized (``"standard"``) or
    mapped to [-1, 1] over the training range (``"range"``).
    """

    def __init__(self, numeric_scaling: str = "standard"):
        self.numeric_scaling = numeric_scaling

    def fit(self, d: Dataset) -> "InputEncoder":
        self.plan_ = []
        for j, attr in enumerate(d.schema):
            if attr.is_nominal:
                self.plan_.append((j, "nominal", len(attr.values), 0.0, 1.0))
                continue
            col = d.X[:, j]
            if self.numeric_scaling == "range":
                lo, hi = col.min(), col.max()
                center, scale = (lo + hi) / 2.0, (hi - lo) / 2.0
            else:
                center, scale = col.mean(), col.std()
            self.plan_.append((j, "numeric", 0, center, scale if scale > 0 else 1.0))
        self.n_outputs_ = sum(1 if kind == "numeric" or width == 2 else width
                              for _, kind, width, _, _ in self.plan_)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        cols = []
        for j, kind, width, center, scale in self.plan_:
            col = X[:, j]
            if kind == "numeric":
                cols.append(((col - center) / scale)[:, None])
            elif width == 2:
                cols.append((col == 1).astype(float)[:, None])
            else:
                cols.append((col[:, None] == np.arange(width)[None, :]).astype(float))
        if not cols:
            return np.zeros((X.shape[0], 0))
        return np.hstack(cols)
