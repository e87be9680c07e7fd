"""Genetic wrapper search over feature bitmasks.

Fitness is the cross-validated accuracy of Naive Bayes restricted to the
masked features.  The initial population is a ladder of IG-rank prefixes,
evolution uses roulette selection, single-point crossover, bit-flip mutation
and (optionally) elitism.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .classifiers import cross_validate
from .data import Dataset, FoldPlan


@dataclass(frozen=True)
class GaParams:
    crossover_probability: float = 0.6
    max_generations: int = 20
    mutation_probability: float = 0.033
    population_size: int = 20
    elitism: int = 1
    seed: int = 0

    def __post_init__(self):
        for name in ("crossover_probability", "mutation_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0 <= self.elitism < self.population_size:
            raise ValueError("elitism must be in [0, population_size)")
        if self.max_generations < 0:
            raise ValueError("max_generations must be >= 0")


@dataclass
class Chromosome:
    mask: tuple[bool, ...]
    fitness: float | None = None

    def __post_init__(self):
        self.mask = tuple(bool(b) for b in self.mask)

    def __len__(self) -> int:
        return len(self.mask)

    @property
    def size(self) -> int:
        return sum(self.mask)

    def bits(self) -> str:
        return "".join("1" if b else "0" for b in self.mask)

    @classmethod
    def from_bits(cls, bits: str) -> "Chromosome":
        return cls(tuple(ch == "1" for ch in bits))


@dataclass
class Generation:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_mask_size: int


@dataclass
class GaResult:
    selected: list[int]
    best: Chromosome
    trace: list[Generation]
    evaluations: int
    populations: list[list[str]] = field(repr=False, default_factory=list)


def seed_population(ranked: Sequence[int], params: GaParams, rng: np.random.Generator,
                    noise: float | None = None) -> list[Chromosome]:
    """Prefix ladder over the IG ranking.

    Individual ``i`` switches on the top ``ceil((i + 1) * n / P)`` ranked
    candidates, then every other bit independently with probability
    ``noise`` (the mutation probability unless given).  Masks are indexed by
    position in ``ranked``.
    """
    n = len(ranked)
    if n == 0:
        raise ValueError("cannot seed a population over zero candidates")
    noise = params.mutation_probability if noise is None else noise
    pop = []
    for i in range(params.population_size):
        top = math.ceil((i + 1) * n / params.population_size)
        mask = np.zeros(n, dtype=bool)
        mask[:top] = True
        flips = rng.random(n) < noise
        mask[top:] |= flips[top:]
        pop.append(Chromosome(tuple(mask)))
    return pop


def wrapper_fitness(mask: Chromosome, d: Dataset, folds: FoldPlan,
                    candidates: Sequence[int] | None = None) -> float:
    """Mean per-fold Naive Bayes accuracy using only the masked features.

    ``candidates`` maps mask positions to dataset columns (identity when
    omitted).  Empty masks score 0.  The value is cached on the chromosome.
    """
    if mask.fitness is not None:
        return mask.fitness
    columns = [c for c, on in zip(candidates if candidates is not None else range(len(mask)),
                                  mask.mask) if on]
    if not columns:
        mask.fitness = 0.0
        return 0.0
    sub = d.select_features(columns)
    cv = cross_validate("naive_bayes", sub, folds)
    correct = np.argmax(cv.distributions, axis=1) == sub.y
    accs = [correct[test].mean() for _, test in folds.splits()]
    mask.fitness = float(np.mean(accs))
    return mask.fitness


def roulette_select(population: Sequence[Chromosome], rng: np.random.Generator) -> Chromosome:
    fit = np.array([c.fitness for c in population], dtype=float)
    total = fit.sum()
    if total <= 0:
        return population[int(rng.integers(len(population)))]
    r = rng.random() * total
    idx = int(np.searchsorted(np.cumsum(fit), r, side="right"))
    return population[min(idx, len(population) - 1)]


def crossover(a: Chromosome, b: Chromosome, rng: np.random.Generator, p: float,
              cut: int | None = None) -> tuple[Chromosome, Chromosome]:
    if len(a) != len(b):
        raise ValueError("parents have different mask lengths")
    n = len(a)
    if n < 2 or rng.random() >= p:
        return Chromosome(a.mask), Chromosome(b.mask)
    if cut is None:
        cut = int(rng.integers(1, n))
    return (Chromosome(a.mask[:cut] + b.mask[cut:]),
            Chromosome(b.mask[:cut] + a.mask[cut:]))


def mutate(c: Chromosome, rng: np.random.Generator, p: float) -> Chromosome:
    flips = rng.random(len(c)) < p
    if not flips.any():
        return c
    return Chromosome(tuple(bool(b) ^ bool(f) for b, f in zip(c.mask, flips)))


def evolve(candidates: Sequence[int], d: Dataset, folds: FoldPlan,
           params: GaParams = GaParams(), initial: Sequence[Chromosome] | None = None,
           fitness: Callable[[Chromosome], float] | None = None,
           workers: int = 1) -> GaResult:
    """Run the GA over ``candidates`` (dataset columns, best-ranked first).

    Returns the best mask ever evaluated; ties prefer fewer features, then
    earlier discovery.  Identical masks are evaluated once.
    """
    candidates = [int(c) for c in candidates]
    if not candidates:
        raise ValueError("no candidate features to search")
    rng = np.random.default_rng(np.random.SeedSequence([int(params.seed) & (2**64 - 1), 0x6A]))
    cache: dict[tuple, float] = {}
    discovered: dict[tuple, int] = {}
    evaluations = 0

    def score(c: Chromosome) -> float:
        if fitness is not None:
            return fitness(c)
        return wrapper_fitness(c, d, folds, candidates)

    def evaluate(pop):
        nonlocal evaluations
        fresh = []
        for c in pop:
            if c.mask in cache:
                c.fitness = cache[c.mask]
            elif not any(c.mask):
                c.fitness = cache[c.mask] = 0.0
            elif c.mask not in (m.mask for m in fresh):
                fresh.append(c)
        if workers > 1 and len(fresh) > 1:
            with ThreadPoolExecutor(workers) as ex:
                values = list(ex.map(score, fresh))
        else:
            values = [score(c) for c in fresh]
        for c, v in zip(fresh, values):
            c.fitness = cache[c.mask] = v
            discovered[c.mask] = len(discovered)
            evaluations += 1
        for c in pop:
            c.fitness = cache[c.mask]

    def key(c: Chromosome):
        return (-c.fitness, c.size, discovered.get(c.mask, math.inf))

    pop = ([Chromosome(c.mask) for c in initial] if initial is not None
           else seed_population(list(range(len(candidates))), params, rng))
    evaluate(pop)
    best: Chromosome | None = None
    trace, history = [], []

    def record(g):
        nonlocal best
        for c in pop:
            if any(c.mask) and (best is None or key(c) < key(best)):
                best = Chromosome(c.mask, c.fitness)
        fits = [c.fitness for c in pop]
        trace.append(Generation(g, best.fitness if best else 0.0, float(np.mean(fits)),
                                best.size if best else 0))
        history.append([c.bits() for c in pop])

    record(0)
    for g in range(1, params.max_generations + 1):
        nxt = [Chromosome(c.mask, c.fitness) for c in sorted(pop, key=key)[:params.elitism]]
        while len(nxt) < params.population_size:
            a = roulette_select(pop, rng)
            b = roulette_select(pop, rng)
            for child in crossover(a, b, rng, params.crossover_probability):
                child = mutate(child, rng, params.mutation_probability)
                if len(nxt) < params.population_size:
                    nxt.append(child)
        pop = nxt
        evaluate(pop)
        record(g)

    if best is None:
        # every mask was empty; fall back to the top-ranked candidate
        best = Chromosome(tuple(i == 0 for i in range(len(candidates))))
        best.fitness = score(best)
        evaluations += 1
    selected = [c for c, on in zip(candidates, best.mask) if on]
    return GaResult(selected, best, trace, evaluations, history)


def exhaustive_search(candidates: Sequence[int], d: Dataset, folds: FoldPlan) -> tuple[float, list[int]]:
    """Brute-force optimum over every non-empty subset (small ``candidates`` only)."""
    n = len(candidates)
    best_fit, best_cols = -1.0, []
    for code in range(1, 2 ** n):
        mask = Chromosome(tuple(bool(code >> i & 1) for i in range(n)))
        fit = wrapper_fitness(mask, d, folds, candidates)
        cols = [c for c, on in zip(candidates, mask.mask) if on]
        if fit > best_fit or (fit == best_fit and len(cols) < len(best_cols)):
            best_fit, best_cols = fit, cols
    return best_fit, best_cols
