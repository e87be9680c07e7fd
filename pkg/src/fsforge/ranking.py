"""Entropy-based feature scoring: information gain and symmetrical uncertainty."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import NOMINAL, AttributeSpec, Dataset, DataError


TIE_TOLERANCE = 1e-12


class EmptySelectionError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureScore:
    attribute: int
    score: float
    rank: int


def _entropy_of_counts(counts: np.ndarray, base: float = 2.0) -> float:
    counts = np.asarray(counts, dtype=float)
    counts = counts[counts > 0]
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(-np.sum(p * np.log(p)) / math.log(base))


def entropy(labels: Sequence, base: float = 2.0) -> float:
    """Shannon entropy of a symbol sequence (bits by default)."""
    labels = list(labels)
    if not labels:
        raise ValueError("entropy of an empty sequence is undefined")
    _, counts = np.unique(np.asarray(labels, dtype=object).astype(str), return_counts=True)
    return _entropy_of_counts(counts, base)


def table_info_gain(table: np.ndarray, base: float = 2.0) -> float:
    """IG from a contingency table with attribute values on rows and classes on
    columns: H(class) - sum_v P(v) H(class | v)."""
    table = np.asarray(table, dtype=float)
    n = table.sum()
    if n == 0:
        return 0.0
    h_y = _entropy_of_counts(table.sum(axis=0), base)
    h_cond = sum(row.sum() / n * _entropy_of_counts(row, base) for row in table if row.sum() > 0)
    ig = h_y - h_cond
    # rounding residue of an exactly independent table must not pass a "> 0" cut
    return ig if ig > TIE_TOLERANCE else 0.0


def table_symmetrical_uncertainty(table: np.ndarray) -> float:
    table = np.asarray(table, dtype=float)
    denom = _entropy_of_counts(table.sum(axis=1)) + _entropy_of_counts(table.sum(axis=0))
    if denom <= 0:
        return 0.0
    return min(1.0, 2.0 * table_info_gain(table) / denom)


def contingency(d: Dataset, attribute: int) -> np.ndarray:
    attr = d.schema[attribute]
    if not attr.is_nominal:
        raise DataError(f"attribute {attr.name!r} is numeric; discretize it first")
    col = d.X[:, attribute]
    if np.isnan(col).any():
        raise DataError(f"attribute {attr.name!r} has missing cells; impute first")
    table = np.zeros((len(attr.values), d.n_classes))
    np.add.at(table, (col.astype(int), d.y), 1.0)
    return table


def info_gain(d: Dataset, attribute: int, base: float = 2.0) -> float:
    return table_info_gain(contingency(d, attribute), base)


def symmetrical_uncertainty(d: Dataset, attribute: int) -> float:
    return table_symmetrical_uncertainty(contingency(d, attribute))


def discretize(d: Dataset, attribute: int, bins: int) -> Dataset:
    """Equal-width binning of a numeric attribute into ``bins`` intervals.

    Bins are left-open/right-closed except the first, so with [0, 5, 10] and
    two bins the cut at 5 sends 5 to the upper bin.  A constant attribute
    becomes a single-bin nominal attribute.
    """
    attr = d.schema[attribute]
    if attr.is_nominal:
        raise DataError(f"attribute {attr.name!r} is already nominal")
    if bins < 2:
        raise DataError("need at least two bins")
    col = d.X[:, attribute]
    present = col[~np.isnan(col)]
    lo, hi = (present.min(), present.max()) if present.size else (0.0, 0.0)
    X = d.X.copy()
    if hi == lo:
        symbols = (f"[{lo:g}]",)
        X[~np.isnan(col), attribute] = 0
    else:
        edges = np.linspace(lo, hi, bins + 1)
        idx = np.searchsorted(edges[1:-1], col, side="right")
        X[:, attribute] = np.where(np.isnan(col), np.nan, idx)
        symbols = tuple(f"bin{k}" for k in range(bins))
    schema = list(d.schema)
    schema[attribute] = AttributeSpec(attr.name, NOMINAL, symbols)
    return d.replace(schema=tuple(schema), X=X)


def discretize_all(d: Dataset, bins: int = 10) -> Dataset:
    for j, attr in enumerate(d.schema):
        if not attr.is_nominal:
            d = discretize(d, j, bins)
    return d


def _rank(scores: Sequence[float]) -> list[FeatureScore]:
    """Descending order; scores within TIE_TOLERANCE of their neighbour count as
    equal and are ordered by attribute index, so rounding noise between
    mathematically equal scores cannot decide the order."""
    order = sorted(range(len(scores)), key=lambda j: (-scores[j], j))
    groups: list[list[int]] = []
    for j in order:
        if groups and scores[groups[-1][-1]] - scores[j] <= TIE_TOLERANCE:
            groups[-1].append(j)
        else:
            groups.append([j])
    order = [j for g in groups for j in sorted(g)]
    return [FeatureScore(j, float(scores[j]), r) for r, j in enumerate(order)]


def rank_features(d: Dataset, measure: str = "info_gain", base: float = 2.0) -> list[FeatureScore]:
    """Score every attribute and sort descending, ties by attribute index."""
    if measure == "info_gain":
        scores = [info_gain(d, j, base) for j in range(d.n_features)]
    elif measure == "symmetrical_uncertainty":
        scores = [symmetrical_uncertainty(d, j) for j in range(d.n_features)]
    else:
        raise ValueError(f"unknown ranking measure {measure!r}")
    return _rank(scores)


def select_above_threshold(scores: Sequence[FeatureScore], threshold: float = 0.0) -> list[int]:
    """Attributes scoring strictly above ``threshold``, in rank order."""
    chosen = [s.attribute for s in sorted(scores, key=lambda s: s.rank) if s.score > threshold]
    if not chosen:
        top = max((s.score for s in scores), default=0.0)
        raise EmptySelectionError(
            f"no feature scores above {threshold:g} (best score {top:.6g}); "
            "lower the threshold or use a top-k cut")
    return chosen


def select_top_k(scores: Sequence[FeatureScore], k: int) -> list[int]:
    if k < 1:
        raise EmptySelectionError("top-k selection needs k >= 1")
    return [s.attribute for s in sorted(scores, key=lambda s: s.rank)[:k]]
