"""SMOTE oversampling, Naive-Bayes misclassification filtering and merging."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .classifiers import NaiveBayes
from .data import Dataset, DataError

log = logging.getLogger(__name__)

SYNTHETIC_ONLY = "synthetic-only"
ALL = "all"


@dataclass(frozen=True)
class SmoteParams:
    """SMOTE knobs.

    ``target`` is ``"balance"`` (raise every class to the majority count) or a
    mapping of class symbol to oversampling percentage.  Under the
    ``"integer"`` convention percentages must be multiples of 100 and every
    class member seeds ``pct / 100`` synthetics; under ``"fractional"`` the
    class gets ``round(count * pct / 100)`` synthetics from random members.
    """

    k_neighbors: int = 5
    target: str | Mapping[str, float] = "balance"
    convention: str = "fractional"
    seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if self.convention not in ("fractional", "integer"):
            raise ValueError(f"unknown percentage convention {self.convention!r}")
        if isinstance(self.target, str):
            if self.target != "balance":
                raise ValueError(f"unknown target policy {self.target!r}")
        else:
            for cls, pct in self.target.items():
                if pct < 0:
                    raise ValueError(f"negative percentage for class {cls!r}")
                if self.convention == "integer" and pct % 100:
                    raise ValueError(f"percentage for class {cls!r} must be a multiple of 100")


@dataclass
class ResampleLog:
    generated: dict[str, int] = field(default_factory=dict)
    skipped: list[str] = field(default_factory=list)
    survivors: int | None = None
    removed: int | None = None
    final_size: int | None = None

    def as_dict(self) -> dict:
        return {"generated": dict(self.generated), "skipped": list(self.skipped),
                "survivors": self.survivors, "removed": self.removed,
                "final_size": self.final_size}


def _distance_matrix(d: Dataset, rows: np.ndarray, query: int) -> np.ndarray:
    """Euclidean distance over min-max normalised numeric attributes plus
    Hamming distance over nominal attributes."""
    X = d.X
    nominal = np.array([a.is_nominal for a in d.schema], dtype=bool)
    numeric = ~nominal
    dist = np.zeros(len(rows))
    if numeric.any():
        cols = X[:, numeric]
        lo, hi = cols.min(axis=0), cols.max(axis=0)
        span = np.where(hi > lo, hi - lo, 1.0)
        diff = (cols[rows] - cols[query]) / span
        dist += np.sqrt(np.sum(diff * diff, axis=1))
    if nominal.any():
        dist += np.sum(X[rows][:, nominal] != X[query, nominal], axis=1)
    return dist


def nearest_same_class_neighbors(d: Dataset, index: int, k: int) -> list[int]:
    """The ``k`` nearest members of ``index``'s class, excluding itself.

    Ties go to the lower instance index; fewer than ``k`` candidates returns
    all of them.
    """
    label = d.y[index]
    candidates = np.flatnonzero(d.y == label)
    candidates = candidates[candidates != index]
    if candidates.size == 0:
        raise DataError(f"class {d.class_domain[label]!r} has a single member; "
                        "nearest neighbours are undefined")
    dist = _distance_matrix(d, candidates, index)
    order = np.lexsort((candidates, dist))
    return [int(i) for i in candidates[order[:k]]]


def _vote(values: np.ndarray, own: float) -> float:
    vals, counts = np.unique(values, return_counts=True)
    tied = vals[counts == counts.max()]
    if own in tied:
        return float(own)
    return float(tied.min())


def synthesize(d: Dataset, x: int, neighbors: list[int], partner: int, u: float) -> np.ndarray:
    """One synthetic cell row from member ``x`` and its chosen ``partner``.

    Numeric cells interpolate ``x + u * (partner - x)``; nominal cells take the
    majority value over ``neighbors``, ties going to ``x``'s own value.
    """
    row = d.X[x].copy()
    for j, attr in enumerate(d.schema):
        if attr.is_nominal:
            row[j] = _vote(d.X[neighbors, j], d.X[x, j])
        else:
            row[j] = d.X[x, j] + u * (d.X[partner, j] - d.X[x, j])
    return row


def _class_rng(seed: int, class_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), 0x5307E, class_index]))


def smote_class(d: Dataset, label: str, n_synthetic: int, params: SmoteParams,
                members_in_turn: bool = False) -> Dataset:
    """Generate ``n_synthetic`` instances of class ``label``.

    Generators are drawn uniformly at random from the class, or, with
    ``members_in_turn``, cycled through in instance order.
    """
    c = d.class_domain.index(label)
    members = np.flatnonzero(d.y == c)
    if members.size < 2:
        raise DataError(f"class {label!r} has fewer than two members")
    rng = _class_rng(params.seed, c)
    neighbor_cache: dict[int, list[int]] = {}
    rows = np.empty((n_synthetic, d.n_features))
    for s in range(n_synthetic):
        x = int(members[s % members.size] if members_in_turn else members[rng.integers(members.size)])
        if x not in neighbor_cache:
            neighbor_cache[x] = nearest_same_class_neighbors(d, x, params.k_neighbors)
        nbrs = neighbor_cache[x]
        partner = nbrs[rng.integers(len(nbrs))]
        rows[s] = synthesize(d, x, nbrs, partner, float(rng.random()))
    return d.replace(X=rows, y=np.full(n_synthetic, c), synthetic=np.ones(n_synthetic, bool))


def _plan(d: Dataset, params: SmoteParams) -> dict[int, tuple[int, bool]]:
    counts = d.class_counts()
    plan = {}
    if params.target == "balance":
        top = counts.max()
        for c, n in enumerate(counts):
            if 0 < n < top:
                plan[c] = (int(top - n), False)
        return plan
    for label, pct in params.target.items():
        if label not in d.class_domain:
            raise DataError(f"unknown class {label!r} in SMOTE target")
        c = d.class_domain.index(label)
        if params.convention == "integer":
            plan[c] = (int(counts[c] * (pct // 100)), True)
        else:
            plan[c] = (int(round(counts[c] * pct / 100.0)), False)
    return plan


def balance_dataset(d: Dataset, params: SmoteParams = SmoteParams(),
                    run_log: ResampleLog | None = None) -> Dataset:
    """Oversample classes per ``params``; originals first, then synthetics in
    class order.  Singleton classes are skipped and noted in ``run_log``."""
    if np.count_nonzero(d.class_counts()) < 2:
        raise DataError("balancing needs at least two populated classes")
    out = d
    for c, (n, in_turn) in sorted(_plan(d, params).items()):
        label = d.class_domain[c]
        if n <= 0:
            continue
        if d.class_counts()[c] < 2:
            log.warning("skipping SMOTE for singleton class %r", label)
            if run_log is not None:
                run_log.skipped.append(label)
            continue
        out = out.concat(smote_class(d, label, n, params, members_in_turn=in_turn))
        if run_log is not None:
            run_log.generated[label] = n
    return out


def misclassification_filter(d: Dataset, scope: str = SYNTHETIC_ONLY,
                             run_log: ResampleLog | None = None) -> Dataset:
    """Drop in-scope instances that Naive Bayes, fitted on all of ``d``,
    assigns to a different class."""
    if len(d) == 0:
        raise DataError("cannot filter an empty dataset")
    if scope not in (SYNTHETIC_ONLY, ALL):
        raise ValueError(f"unknown filter scope {scope!r}")
    in_scope = d.synthetic if scope == SYNTHETIC_ONLY else np.ones(len(d), dtype=bool)
    if not in_scope.any():
        return d
    predicted = NaiveBayes().fit(d).predict(d.X)
    drop = in_scope & (predicted != d.y)
    kept = d.subset(np.flatnonzero(~drop))
    if scope == ALL:
        lost = (d.class_counts() > 0) & (kept.class_counts() == 0)
        if lost.any():
            names = [d.class_domain[c] for c in np.flatnonzero(lost)]
            raise DataError(f"filtering removed every instance of {names}")
    if run_log is not None:
        run_log.removed = int(drop.sum())
        run_log.survivors = int((kept.synthetic).sum())
    return kept


def merge_with_original(original: Dataset, filtered: Dataset) -> Dataset:
    """All original instances followed by the synthetic survivors of ``filtered``."""
    if original.schema != filtered.schema or original.class_domain != filtered.class_domain:
        raise DataError("schemas differ; cannot merge")
    survivors = filtered.subset(np.flatnonzero(filtered.synthetic))
    return original.concat(survivors)
