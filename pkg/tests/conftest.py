import math
import os
from pathlib import Path

import numpy as np
import pytest

from fsforge.data import AttributeSpec, Dataset

REPO = Path(__file__).resolve().parents[1]


def lung_cancer_path():
    candidates = [os.environ.get("FSFORGE_LUNG_CANCER"), REPO / "data" / "lung-cancer.data"]
    for c in candidates:
        if c and Path(c).is_file():
            return str(c)
    return None


@pytest.fixture
def lung_path():
    path = lung_cancer_path()
    if path is None:
        pytest.skip("UCI lung-cancer.data not available (set FSFORGE_LUNG_CANCER)")
    return path


def nominal(name, k):
    return AttributeSpec(name, "nominal", tuple(str(v) for v in range(k)))


def make_nominal(X, y, width=None, classes=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y)
    width = width or int(np.nanmax(X)) + 1
    classes = classes or tuple(f"c{k}" for k in range(max(2, int(y.max()) + 1)))
    schema = tuple(nominal(f"f{j}", width) for j in range(X.shape[1]))
    return Dataset(schema, classes, X, y)


def make_numeric(X, y, classes=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y)
    classes = classes or tuple(f"c{k}" for k in range(max(2, int(y.max()) + 1)))
    schema = tuple(AttributeSpec(f"x{j}", "numeric") for j in range(X.shape[1]))
    return Dataset(schema, classes, X, y)


def informative_fixture(seed, n=120, n_noise=4, width=2, rule="and"):
    """Two informative nominal features jointly determining the class, plus noise."""
    rng = np.random.default_rng(seed)
    a = rng.integers(0, width, n)
    b = rng.integers(0, width, n)
    if rule == "and":
        y = ((a == width - 1) & (b == width - 1)).astype(int)
    else:
        y = ((a + b) >= width).astype(int)
    noise = rng.integers(0, width, (n, n_noise))
    return make_nominal(np.column_stack([a, b, noise]), y, width=width)


def central_difference(f, theta, h=1e-6):
    """Central finite-difference gradient of scalar ``f`` at array ``theta``."""
    theta = np.array(theta, dtype=float)
    grad = np.zeros_like(theta)
    for idx in np.ndindex(theta.shape):
        old = theta[idx]
        theta[idx] = old + h
        up = f(theta)
        theta[idx] = old - h
        down = f(theta)
        theta[idx] = old
        grad[idx] = (up - down) / (2 * h)
    return grad


def relative_error(a, b):
    a, b = np.ravel(a), np.ravel(b)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12))


def logistic_gradient_error(seed):
    """Largest relative error between analytic and numeric logistic gradients."""
    from fsforge.classifiers.logistic import loss_and_grad

    rng = np.random.default_rng(seed)
    n, m, K = rng.integers(2, 7), rng.integers(1, 5), rng.integers(2, 4)
    X = rng.normal(size=(n, m))
    Y = np.eye(K)[rng.integers(0, K, n)]
    W, b = rng.normal(size=(m, K)), rng.normal(size=K)
    ridge = 1e-8 if seed % 2 else 0.1
    _, gW, gb = loss_and_grad(W, b, X, Y, ridge)
    nW = central_difference(lambda t: loss_and_grad(t, b, X, Y, ridge)[0], W)
    nb = central_difference(lambda t: loss_and_grad(W, t, X, Y, ridge)[0], b)
    return max(relative_error(gW, nW), relative_error(gb, nb))


def mlp_gradient_error(seed, n=3):
    """Largest relative error between backprop and numeric MLP gradients."""
    from fsforge.classifiers.mlp import loss_and_grad

    rng = np.random.default_rng(seed)
    m, H, K = rng.integers(1, 5), rng.integers(1, 5), rng.integers(2, 4)
    X = rng.uniform(-1, 1, size=(n, m))
    Y = np.eye(K)[rng.integers(0, K, n)]
    params = [rng.uniform(-0.5, 0.5, size=s) for s in [(m, H), (H,), (H, K), (K,)]]
    _, grads = loss_and_grad(params, X, Y)
    worst = 0.0
    for i, g in enumerate(grads):
        def f(t, i=i):
            trial = list(params)
            trial[i] = t
            return loss_and_grad(trial, X, Y)[0]
        worst = max(worst, relative_error(g, central_difference(f, params[i])))
    return worst


def xor_fixture():
    pattern = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])
    X = np.tile(pattern, (10, 1))
    return make_nominal(X, X[:, 0] ^ X[:, 1], width=2)


def oracle_nb_accuracy(d, cols, assignments):
    """Per-fold mean accuracy of add-one Naive Bayes, written with plain loops.

    Independent of the library classifier; nominal attributes only.
    """
    from collections import Counter

    K = d.n_classes
    rows = [([int(d.X[i, c]) for c in cols], int(d.y[i])) for i in range(len(d))]
    widths = [len(d.schema[c].values) for c in cols]
    accs = []
    for f in sorted(set(assignments.tolist())):
        train = [r for r, a in zip(rows, assignments) if a != f]
        test = [r for r, a in zip(rows, assignments) if a == f]
        prior = Counter(label for _, label in train)
        cell = Counter((j, v, label) for vals, label in train for j, v in enumerate(vals))
        hits = 0
        for vals, label in test:
            best, best_score = None, -math.inf
            for c in range(K):
                if prior[c] == 0:
                    continue
                s = math.log(prior[c] / len(train))
                for j, v in enumerate(vals):
                    s += math.log((cell[(j, v, c)] + 1) / (prior[c] + widths[j]))
                if s > best_score + 1e-12:
                    best, best_score = c, s
            hits += best == label
        accs.append(hits / len(test))
    return sum(accs) / len(accs)


def exhaustive_optimum(d, candidates, assignments):
    """Best oracle accuracy over every non-empty subset of ``candidates``."""
    import itertools

    best = -1.0
    for r in range(1, len(candidates) + 1):
        for cols in itertools.combinations(candidates, r):
            best = max(best, oracle_nb_accuracy(d, list(cols), assignments))
    return best


def imbalanced_fixture(seed=0, counts=(9, 13, 10), n_features=10, width=4):
    """Small all-nominal three-class dataset: three noisy class-linked features plus noise."""
    rng = np.random.default_rng(seed)
    y = np.repeat(np.arange(len(counts)), counts)
    X = rng.integers(0, width, (len(y), n_features))
    for j in range(3):
        keep = rng.random(len(y)) < 0.75 - 0.1 * j
        X[keep, j] = (y[keep] + j) % width
    return make_nominal(X, y, width=width, classes=tuple(str(c + 1) for c in range(len(counts))))


def write_csv(path, d):
    """Class first, then the attributes, like the UCI lung-cancer layout."""
    with open(path, "w") as fh:
        for i in range(len(d)):
            cells = [d.class_domain[d.y[i]]] + [d.schema[j].values[int(v)] for j, v in enumerate(d.X[i])]
            fh.write(",".join(cells) + "\n")
    return str(path)


ACCEPTANCE_LINES = []


class criterion:
    """Context manager that records one PASS/FAIL line per acceptance criterion."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.notes = []

    def note(self, text):
        self.notes.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        detail = "; ".join(self.notes)
        if exc is not None:
            detail = (detail + "; " if detail else "") + f"{exc_type.__name__}: {exc}".splitlines()[0]
        line = f"{status}  criterion {self.number}: {self.title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return False


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
