from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

import numpy as np

from .base import Classifier, laplace_distribution


def gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.sum(p * p))


@dataclass
class Split:
    attribute: int
    nominal: bool
    value: float  # domain index for nominal, threshold for numeric
    reduction: float

    def goes_left(self, X: np.ndarray) -> np.ndarray:
        col = X[:, self.attribute]
        return col == self.value if self.nominal else col <= self.value

    def describe(self, schema) -> str:
        attr = schema[self.attribute]
        if self.nominal:
            return f"{attr.name} = {attr.values[int(self.value)]}"
        return f"{attr.name} <= {self.value:g}"


@dataclass
class Node:
    id: int
    depth: int
    counts: np.ndarray
    rows: np.ndarray = field(repr=False)
    split: Split | None = None
    left: "Node | None" = None
    right: "Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.split is None


def best_split(X, y, rows, schema, n_classes, n_total) -> Split | None:
    """Best binary split of a node by reduction in size-weighted Gini impurity.

    Reductions are scaled by node size / ``n_total`` so candidates from
    different frontier leaves compare on one scale.
    """
    yr = y[rows]
    parent = np.bincount(yr, minlength=n_classes).astype(float)
    n = len(rows)
    base = gini(parent)
    best = None
    for j, attr in enumerate(schema):
        col = X[rows, j]
        if attr.is_nominal:
            candidates = [(v, col == v) for v in np.unique(col)]
        else:
            distinct = np.unique(col)
            candidates = [(t, col <= t) for t in (distinct[:-1] + distinct[1:]) / 2.0]
        for value, mask in candidates:
            nl = int(mask.sum())
            if nl == 0 or nl == n:
                continue
            cl = np.bincount(yr[mask], minlength=n_classes).astype(float)
            cr = parent - cl
            child = (nl * gini(cl) + (n - nl) * gini(cr)) / n
            reduction = (base - child) * n / n_total
            if reduction > 1e-12 and (best is None or reduction > best.reduction + 1e-15):
                best = Split(j, attr.is_nominal, float(value), reduction)
    return best


class BFTree(Classifier):
    """Best-first binary decision tree.

    Leaves wait in a frontier ordered by the impurity reduction of their best
    split; the leaf with the largest reduction is expanded next, regardless of
    depth.  Growth stops once no frontier leaf has an improving split.
    ``expansion_order_`` records node ids in the order they were split.
    """

    name = "bf_tree"

    def __init__(self, min_instances: int = 2, max_expansions: int | None = None):
        super().__init__()
        self.min_instances = min_instances
        self.max_expansions = max_expansions

    def _fit(self, d):
        X, y, K = d.X, d.y, d.n_classes
        self.observed_ = d.class_counts() > 0
        ids = itertools.count()
        n_total = len(d)

        def make(rows, depth):
            return Node(next(ids), depth, np.bincount(y[rows], minlength=K), rows)

        self.root_ = make(np.arange(n_total), 0)
        frontier = []
        order = itertools.count()

        def push(node):
            if len(node.rows) < self.min_instances:
                return
            split = best_split(X, y, node.rows, d.schema, K, n_total)
            if split is not None:
                heapq.heappush(frontier, (-split.reduction, next(order), node, split))

        push(self.root_)
        self.expansion_order_ = []
        while frontier:
            if self.max_expansions is not None and len(self.expansion_order_) >= self.max_expansions:
                break
            _, _, node, split = heapq.heappop(frontier)
            mask = split.goes_left(X[node.rows])
            node.split = split
            node.left = make(node.rows[mask], node.depth + 1)
            node.right = make(node.rows[~mask], node.depth + 1)
            self.expansion_order_.append(node.id)
            push(node.left)
            push(node.right)

    def leaves(self):
        stack, out = [self.root_], []
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.extend([node.right, node.left])
        return out

    @property
    def depth_(self) -> int:
        return max(leaf.depth for leaf in self.leaves())

    def _leaf_for(self, row):
        node = self.root_
        while not node.is_leaf:
            node = node.left if node.split.goes_left(row[None, :])[0] else node.right
        return node

    def _predict_proba(self, X):
        return np.array([laplace_distribution(self._leaf_for(row).counts, self.observed_)
                         for row in X])
