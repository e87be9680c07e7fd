"""Quick invariant sweep used by ``fsforge selftest``."""

from __future__ import annotations

import numpy as np

from .classifiers import CLASSIFIER_IDS, cross_validate
from .data import AttributeSpec, Dataset, stratified_folds
from .metrics import class_rates, relative_absolute_error
from .ranking import table_info_gain
from .resampling import SmoteParams, balance_dataset
from .wrapper import GaParams, evolve


def _toy(seed: int, n: int = 60) -> Dataset:
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 3, n)
    X = np.column_stack([
        np.where(rng.random(n) < 0.8, y, rng.integers(0, 3, n)),
        rng.integers(0, 3, n),
        y + rng.normal(0, 0.5, n),
        rng.normal(size=n),
    ]).astype(float)
    schema = (AttributeSpec("f0", "nominal", ("a", "b", "c")),
              AttributeSpec("f1", "nominal", ("a", "b", "c")),
              AttributeSpec("f2", "numeric"), AttributeSpec("f3", "numeric"))
    return Dataset(schema, ("x", "y", "z"), X, y)


def _checks():
    rng = np.random.default_rng(7)

    def ig_symmetry():
        for _ in range(200):
            t = rng.integers(0, 6, size=(rng.integers(2, 5), rng.integers(2, 5)))
            if t.sum() == 0:
                continue
            if abs(table_info_gain(t) - table_info_gain(t.T)) >= 1e-9:
                return False
        return True

    def smote_balance():
        d = _toy(1).subset(np.r_[0:60][np.r_[0:60] % 4 != 0])
        out = balance_dataset(d, SmoteParams(seed=3))
        return len(set(out.class_counts().tolist())) == 1

    def rate_complements():
        d = _toy(2)
        for _ in range(50):
            p = rng.dirichlet(np.ones(3), size=len(d))
            for r in class_rates(p, d).per_class.values():
                if abs(r["tp_rate"] + r["fn_rate"] - 1) > 1e-12 and r["tp_rate"] + r["fn_rate"] != 0:
                    return False
        return True

    def prior_rae():
        d = _toy(3)
        prior = d.class_counts() / len(d)
        return abs(relative_absolute_error(np.tile(prior, (len(d), 1)), d, prior) - 100) < 1e-9

    def valid_distributions():
        d = _toy(4)
        folds = stratified_folds(d, 5, 0)
        for model_id in CLASSIFIER_IDS:
            p = cross_validate(model_id, d, folds).distributions
            if np.any(p < 0) or np.max(np.abs(p.sum(axis=1) - 1)) > 1e-9:
                return False
        return True

    def ga_monotone():
        d = _toy(5)
        res = evolve([0, 1, 2, 3], d, stratified_folds(d, 5, 1), GaParams(max_generations=5, seed=2))
        best = [g.best_fitness for g in res.trace]
        return all(b2 >= b1 for b1, b2 in zip(best, best[1:])) and res.evaluations <= 20 * 6

    return [("information gain symmetry", ig_symmetry),
            ("SMOTE balances class counts", smote_balance),
            ("rate complements", rate_complements),
            ("prior predictor RAE = 100%", prior_rae),
            ("classifier outputs are distributions", valid_distributions),
            ("GA best-ever fitness is monotone", ga_monotone)]


def run_selftest(emit=print) -> int:
    failures = 0
    for name, check in _checks():
        ok = bool(check())
        failures += not ok
        emit(f"{'PASS' if ok else 'FAIL'}  {name}")
    return failures
