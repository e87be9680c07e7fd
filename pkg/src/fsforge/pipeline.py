"""Phase 1 / Phase 2 orchestration and the five-classifier evaluation harness."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import data as data_mod
from .classifiers import CLASSIFIER_IDS, cross_validate, make_classifier, resubstitute
from .config import METHODS, ConfigError, PipelineConfig
from .data import Dataset, FoldPlan, impute_missing, stratified_folds
from .metrics import EvaluationReport, evaluate_predictions, summarize_group
from .ranking import discretize_all, rank_features, select_above_threshold, select_top_k
from .resampling import ResampleLog, balance_dataset, merge_with_original, misclassification_filter
from .wrapper import Chromosome, GaResult, evolve

log = logging.getLogger(__name__)


def derive_seed(seed: int, tag: str) -> int:
    """Stable 63-bit child seed for a named pipeline stage."""
    entropy = [int(seed) & (2**64 - 1)] + [ord(ch) for ch in tag]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0] >> 1)


def load_dataset(cfg: PipelineConfig) -> Dataset:
    if not cfg.data:
        raise ConfigError("no dataset path configured (--data)")
    if cfg.format == "lung-cancer":
        d = data_mod.load_lung_cancer(cfg.data)
    else:
        d = data_mod.load_path(cfg.data, cfg.format, cfg.class_column, cfg.all_nominal)
    return impute_missing(d)


@dataclass
class Phase1Result:
    dataset: Dataset
    log: ResampleLog


@dataclass
class Phase2Result:
    selected: list[int]
    candidates: list[int]
    ga: GaResult | None = None


@dataclass
class MethodRun:
    report: EvaluationReport
    selected: list[int]
    phase1: ResampleLog | None = None
    ga: GaResult | None = None
    extra: dict = field(default_factory=dict)


def run_phase1(d: Dataset, cfg: PipelineConfig) -> Phase1Result:
    """SMOTE to the majority count, filter misclassified synthetics, merge."""
    rlog = ResampleLog()
    smote = replace(cfg.smote, seed=derive_seed(cfg.seed, "smote"))
    balanced = balance_dataset(d, smote, rlog)
    filtered = misclassification_filter(balanced, cfg.filter_scope, rlog)
    merged = merge_with_original(d, filtered)
    rlog.final_size = len(merged)
    log.info("phase 1: %d originals, %d synthetic, %d survivors, %d total",
             len(d), int(balanced.synthetic.sum()), rlog.survivors or 0, len(merged))
    return Phase1Result(merged, rlog)


def _ranking_view(d: Dataset) -> Dataset:
    return d if d.all_nominal else discretize_all(d)


def _filter(d: Dataset, cfg: PipelineConfig, measure: str) -> list[int]:
    scores = rank_features(_ranking_view(d), measure)
    if cfg.ig_top_k is not None:
        return select_top_k(scores, cfg.ig_top_k)
    return select_above_threshold(scores, cfg.ig_threshold)


def _ga(candidates: list[int], d: Dataset, cfg: PipelineConfig,
        initial: Sequence[Chromosome] | None = None) -> GaResult:
    folds = stratified_folds(d, cfg.wrapper_folds, derive_seed(cfg.seed, "wrapper-folds"))
    params = replace(cfg.ga, seed=derive_seed(cfg.seed, "ga"))
    return evolve(candidates, d, folds, params, initial=initial)


def run_phase2(d: Dataset, cfg: PipelineConfig, measure: str = "info_gain") -> Phase2Result:
    """Rank, keep features above the threshold, then run the GA wrapper on them."""
    candidates = _filter(d, cfg, measure)
    result = _ga(candidates, d, cfg)
    log.info("phase 2: %d candidates -> %d selected (fitness %.4f)",
             len(candidates), len(result.selected), result.best.fitness)
    return Phase2Result(sorted(result.selected), candidates, result)


def _random_population(n: int, cfg: PipelineConfig) -> list[Chromosome]:
    rng = np.random.default_rng(derive_seed(cfg.seed, "ga-init"))
    return [Chromosome(tuple(rng.random(n) < 0.5)) for _ in range(cfg.ga.population_size)]


def select_features(d: Dataset, cfg: PipelineConfig) -> tuple[Dataset, list[int], dict]:
    """Apply ``cfg.method``; returns (evaluation dataset, selected columns, artifacts)."""
    m = cfg.method
    art: dict = {}
    if m == "all_features":
        return d, list(range(d.n_features)), art
    if m == "info_gain":
        return d, sorted(_filter(d, cfg, "info_gain")), art
    if m == "ga_wrapper":
        candidates = list(range(d.n_features))
        ga = _ga(candidates, d, cfg, _random_population(len(candidates), cfg))
        art["ga"] = ga
        return d, sorted(ga.selected), art
    if m == "su_ga_wrapper":
        p2 = run_phase2(d, cfg, "symmetrical_uncertainty")
        art["ga"], art["candidates"] = p2.ga, p2.candidates
        return d, p2.selected, art
    if m == "hybrid":
        p1 = run_phase1(d, cfg)
        p2 = run_phase2(p1.dataset, cfg)
        art["ga"], art["candidates"], art["phase1"] = p2.ga, p2.candidates, p1.log
        return p1.dataset, p2.selected, art
    raise ConfigError(f"unknown method {m!r}; valid methods: {', '.join(METHODS)}")


def _leak_free_predictions(model_id: str, original: Dataset, cols: list[int],
                           cfg: PipelineConfig, folds: FoldPlan):
    """CV on the original data with Phase 1 re-run inside every training split."""
    dist = np.zeros((len(original), original.n_classes))
    priors = np.zeros_like(dist)
    for f, (train, test) in enumerate(folds.splits()):
        fold_cfg = replace(cfg, seed=derive_seed(cfg.seed, f"leak-free-{f}"))
        train_d = run_phase1(original.subset(train), fold_cfg).dataset.select_features(cols)
        model = make_classifier(model_id, seed=derive_seed(cfg.seed, model_id)).fit(train_d)
        dist[test] = model.predict_proba(original.X[test][:, cols])
        counts = train_d.class_counts()
        priors[test] = counts / counts.sum()
    return dist, priors


def run_method(cfg: PipelineConfig, d: Dataset | None = None) -> MethodRun:
    """Select features per ``cfg.method`` and score the five classifiers on them."""
    if d is None:
        d = load_dataset(cfg)
    evaluated, cols, art = select_features(d, cfg)
    view = evaluated.select_features(cols)
    leak_free = cfg.leak_free and cfg.method == "hybrid" and cfg.evaluation == "cv"
    scored = d.select_features(cols) if leak_free else view
    folds = stratified_folds(scored, cfg.outer_folds, derive_seed(cfg.seed, "outer-folds"))
    results = []
    for model_id in CLASSIFIER_IDS:
        mseed = derive_seed(cfg.seed, model_id)
        if leak_free:
            dist, priors = _leak_free_predictions(model_id, d, cols, cfg, folds)
        elif cfg.evaluation == "resubstitution":
            cv = resubstitute(model_id, view, seed=mseed)
            dist, priors = cv.distributions, cv.priors
        else:
            cv = cross_validate(model_id, view, folds, seed=mseed)
            dist, priors = cv.distributions, cv.priors
        results.append(evaluate_predictions(model_id, dist, priors, scored, cfg.averaging))
    extra = {"evaluation": cfg.evaluation, "leak_free": leak_free,
             "class_counts": scored.class_count_map()}
    ga = art.get("ga")
    if ga is not None:
        extra["wrapper_fitness"] = ga.best.fitness
        extra["fitness_evaluations"] = ga.evaluations
    if "candidates" in art:
        extra["candidates"] = [d.schema[c].name for c in art["candidates"]]
    if "phase1" in art:
        extra["phase1"] = art["phase1"].as_dict()
    report = EvaluationReport(
        method=cfg.method, seed=int(cfg.seed),
        folds=folds.describe() if cfg.evaluation == "cv" else {"k": 0, "seed": 0, "n": len(scored)},
        classifiers=results, group=summarize_group(results), n_instances=len(scored),
        selected_features=[d.schema[c].name for c in cols], averaging=cfg.averaging, extra=extra)
    report.check_identities()
    return MethodRun(report, cols, art.get("phase1"), ga, extra)


def _run_one(args):
    cfg, d = args
    return run_method(cfg, d)


def compare_methods(cfgs: Sequence[PipelineConfig], d: Dataset | None = None,
                    jobs: int = 1) -> list[MethodRun]:
    """Run several method configs on one dataset, optionally in worker processes."""
    cfgs = list(cfgs)
    if not cfgs:
        raise ConfigError("nothing to compare")
    key = {(c.data, c.format, c.class_column, c.all_nominal, c.seed) for c in cfgs}
    if len(key) != 1:
        raise ConfigError("compared configs must share dataset and seed")
    if d is None:
        d = load_dataset(cfgs[0])
    if jobs > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(cfgs))) as ex:
            return list(ex.map(_run_one, [(c, d) for c in cfgs]))
    return [run_method(c, d) for c in cfgs]

