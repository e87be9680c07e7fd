from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .base import Classifier, laplace_distribution


@dataclass(frozen=True)
class Condition:
    attribute: int
    op: str  # "==", "<=", ">="
    value: float

    def covers(self, X: np.ndarray) -> np.ndarray:
        col = X[:, self.attribute]
        if self.op == "==":
            return col == self.value
        if self.op == "<=":
            return col <= self.value
        return col >= self.value


@dataclass
class Rule:
    label: int
    conditions: list[Condition]
    distribution: np.ndarray = field(default=None, repr=False)
    prune_error: float = 0.0

    def covers(self, X: np.ndarray) -> np.ndarray:
        mask = np.ones(X.shape[0], dtype=bool)
        for cond in self.conditions:
            mask &= cond.covers(X)
        return mask

    def describe(self, schema, class_domain) -> str:
        parts = []
        for c in self.conditions:
            attr = schema[c.attribute]
            value = attr.values[int(c.value)] if attr.is_nominal else f"{c.value:g}"
            parts.append(f"{attr.name} {c.op} {value}")
        return f"({' and '.join(parts)}) => {class_domain[self.label]}"


def foil_gain(p0: int, n0: int, p1: int, n1: int) -> float:
    if p1 == 0:
        return 0.0
    return p1 * (math.log2(p1 / (p1 + n1)) - math.log2(p0 / (p0 + n0)))


def _candidate_conditions(X, schema):
    for j, attr in enumerate(schema):
        values = np.unique(X[:, j])
        if attr.is_nominal:
            for v in values:
                yield Condition(j, "==", float(v))
        else:
            for t in (values[:-1] + values[1:]) / 2.0:
                yield Condition(j, "<=", float(t))
                yield Condition(j, ">=", float(t))


class RuleLearner(Classifier):
    """IREP-style sequential covering rule learner.

    Classes are handled from least to most frequent.  Each rule is grown on
    two thirds of the remaining data by greedy FOIL gain, pruned on the other
    third by deleting trailing conditions to maximise (p - n) / (p + n), and
    kept only while its prune-set error stays below 0.5.  The most frequent
    remaining class becomes the default rule.
    """

    name = "rule_learner"

    def __init__(self, grow_fraction: float = 2 / 3, seed: int = 0):
        super().__init__()
        self.grow_fraction = grow_fraction
        self.seed = seed

    def _fit(self, d):
        X, y, K = d.X, d.y, d.n_classes
        rng = np.random.default_rng(self.seed)
        self.observed_ = d.class_counts() > 0
        counts = d.class_counts()
        present = [c for c in np.argsort(counts, kind="stable") if counts[c] > 0]
        remaining = np.arange(len(d))
        self.rules_: list[Rule] = []
        for c in present[:-1]:
            while np.any(y[remaining] == c):
                rule = self._learn_rule(X, y, remaining, c, d.schema, rng)
                if rule is None:
                    break
                covered = rule.covers(X[remaining])
                rule.distribution = laplace_distribution(
                    np.bincount(y[remaining[covered]], minlength=K), self.observed_)
                self.rules_.append(rule)
                remaining = remaining[~covered]
        rest = np.bincount(y[remaining], minlength=K) if remaining.size else counts
        self.default_ = laplace_distribution(rest, self.observed_)
        self.default_label_ = int(np.argmax(rest))

    def _split(self, rows, rng):
        rows = rows[rng.permutation(rows.size)]
        cut = math.ceil(self.grow_fraction * rows.size)
        return rows[:cut], rows[cut:]

    def _learn_rule(self, X, y, rows, c, schema, rng):
        pos_g, pos_p = self._split(rows[y[rows] == c], rng)
        neg_g, neg_p = self._split(rows[y[rows] != c], rng)
        grow = np.concatenate([pos_g, neg_g])
        prune = np.concatenate([pos_p, neg_p])
        conditions = self._grow(X[grow], y[grow] == c, schema)
        if not conditions:
            return None
        Xp, is_pos = X[prune], y[prune] == c
        best_len, best_value, best_error = None, -np.inf, 1.0
        for length in range(len(conditions), 0, -1):
            covered = Rule(c, conditions[:length]).covers(Xp)
            p = int(np.sum(covered & is_pos))
            n = int(np.sum(covered & ~is_pos))
            if p + n == 0:
                continue
            value = (p - n) / (p + n)
            if value > best_value:
                best_len, best_value, best_error = length, value, n / (p + n)
        if best_len is None or best_error >= 0.5:
            return None
        return Rule(c, conditions[:best_len], prune_error=best_error)

    def _grow(self, X, is_pos, schema):
        conditions = []
        covered = np.ones(len(is_pos), dtype=bool)
        while True:
            p0 = int(np.sum(covered & is_pos))
            n0 = int(np.sum(covered & ~is_pos))
            if n0 == 0 or p0 == 0:
                break
            best, best_gain = None, 0.0
            for cond in _candidate_conditions(X[covered], schema):
                if cond in conditions:
                    continue
                mask = covered & cond.covers(X)
                p1 = int(np.sum(mask & is_pos))
                gain = foil_gain(p0, n0, p1, int(np.sum(mask & ~is_pos)))
                if gain > best_gain + 1e-12:
                    best, best_gain = cond, gain
            if best is None:
                break
            conditions.append(best)
            covered &= best.covers(X)
        return conditions

    def _predict_proba(self, X):
        out = np.tile(self.default_, (X.shape[0], 1))
        done = np.zeros(X.shape[0], dtype=bool)
        for rule in self.rules_:
            hit = rule.covers(X) & ~done
            out[hit] = rule.distribution
            done |= hit
        return out
