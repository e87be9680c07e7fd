"""Command-line entry point: run, compare, rank, smote, selftest."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import pipeline, report
from .config import FORMATS, METHODS, ConfigError, PipelineConfig, flatten_text
from .data import DataError, dump_arff
from .ranking import EmptySelectionError, rank_features, symmetrical_uncertainty

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3

log = logging.getLogger("fsforge")

# CLI flag dest -> flat config key
_FLAG_KEYS = {
    "data": "data", "format": "format", "class_col": "class_column", "all_nominal": "all_nominal",
    "method": "method", "seed": "seed", "folds": "folds", "ig_threshold": "ig_threshold",
    "ig_top_k": "ig_top_k", "smote_k": "smote_k", "ga_pop": "ga_pop", "ga_gens": "ga_gens",
    "ga_crossover": "ga_crossover", "ga_mutation": "ga_mutation", "elitism": "elitism",
    "filter_scope": "filter_scope", "leak_free": "leak_free", "wrapper_folds": "wrapper_folds",
    "evaluation": "evaluation", "averaging": "averaging",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI-style config file; flags override it")
    p.add_argument("--data", help="dataset path")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--class-col", type=int, help="0-based class column (default: last)")
    p.add_argument("--all-nominal", action="store_const", const=True, default=None,
                   help="treat every CSV column as nominal")
    p.add_argument("--seed", type=int, help="run seed (fallback: $FSFORGE_SEED, then 1)")
    p.add_argument("--folds", type=int, help="outer cross-validation folds (default 10)")
    p.add_argument("--wrapper-folds", type=int, help="wrapper fitness folds (default 5)")
    p.add_argument("--ig-threshold", type=float)
    p.add_argument("--ig-top-k", type=int)
    p.add_argument("--smote-k", type=int)
    p.add_argument("--ga-pop", type=int)
    p.add_argument("--ga-gens", type=int)
    p.add_argument("--ga-crossover", type=float)
    p.add_argument("--ga-mutation", type=float)
    p.add_argument("--elitism", type=int)
    p.add_argument("--filter-scope", choices=("synthetic-only", "all"))
    p.add_argument("--leak-free", action="store_const", const=True, default=None)
    p.add_argument("--evaluation", choices=("cv", "resubstitution"))
    p.add_argument("--averaging", choices=("macro", "micro"))
    p.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="evaluate one method")
    _common(p)
    p.add_argument("--method", choices=METHODS)
    p = sub.add_parser("compare", help="evaluate several methods")
    _common(p)
    p.add_argument("--methods", default=",".join(METHODS),
                   help="comma-separated methods (default: all five)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p = sub.add_parser("rank", help="IG/SU table as CSV")
    _common(p)
    p = sub.add_parser("smote", help="Phase 1 only; writes the merged dataset as ARFF")
    _common(p)
    sub.add_parser("selftest", help="run the built-in invariant checks")
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                values.update(flatten_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    if getattr(args, "seed", None) is None and "seed" not in values and os.environ.get("FSFORGE_SEED"):
        values["seed"] = os.environ["FSFORGE_SEED"]
    for dest, key in _FLAG_KEYS.items():
        v = getattr(args, dest, None)
        if v is not None:
            values[key] = v
    return PipelineConfig.from_mapping(values)


def _setup_logging(out_dir: str) -> logging.Handler:
    os.makedirs(out_dir, exist_ok=True)
    handler = logging.FileHandler(os.path.join(out_dir, "run.log"), mode="w", encoding="utf-8")
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("fsforge")
    root.setLevel(logging.INFO)
    root.addHandler(handler)
    return handler


def _print_summary(runs) -> None:
    print("method,ams,arae,atp_rate,atn_rate,afp_rate,afn_rate,n_features")
    for r in runs:
        g = r.report.group
        print(f"{r.report.method},{g['ams']:.4f},{g['arae']:.4f},{g['atp_rate']:.4f},"
              f"{g['atn_rate']:.4f},{g['afp_rate']:.4f},{g['afn_rate']:.4f},"
              f"{len(r.report.selected_features)}")


def cmd_run(args) -> int:
    cfg = resolve_config(args)
    handler = _setup_logging(args.out)
    try:
        log.info("config:\n%s", cfg.to_text())
        runs = [pipeline.run_method(cfg)]
        report.write_outputs(args.out, runs)
    finally:
        logging.getLogger("fsforge").removeHandler(handler)
        handler.close()
    _print_summary(runs)
    return EXIT_OK


def cmd_compare(args) -> int:
    base = resolve_config(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ConfigError(f"unknown methods {unknown}; valid: {', '.join(METHODS)}")
    handler = _setup_logging(args.out)
    try:
        runs = pipeline.compare_methods([base.with_method(m) for m in methods], jobs=args.jobs)
        report.write_outputs(args.out, runs)
    finally:
        logging.getLogger("fsforge").removeHandler(handler)
        handler.close()
    _print_summary(runs)
    return EXIT_OK


def rank_table(d) -> str:
    view = pipeline._ranking_view(d)
    scores = rank_features(view)
    lines = ["attribute,info_gain,symmetrical_uncertainty,rank"]
    for s in scores:
        su = symmetrical_uncertainty(view, s.attribute)
        lines.append(f"{d.schema[s.attribute].name},{s.score!r},{su!r},{s.rank}")
    return "\n".join(lines) + "\n"


def cmd_rank(args) -> int:
    cfg = resolve_config(args)
    text = rank_table(pipeline.load_dataset(cfg))
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "ranking.csv"), "w", encoding="utf-8") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_smote(args) -> int:
    cfg = resolve_config(args)
    handler = _setup_logging(args.out)
    try:
        result = pipeline.run_phase1(pipeline.load_dataset(cfg), cfg)
    finally:
        logging.getLogger("fsforge").removeHandler(handler)
        handler.close()
    path = os.path.join(args.out, "phase1.arff")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_arff(result.dataset))
    info = result.log.as_dict()
    print(f"generated={sum(info['generated'].values())} survivors={info['survivors']} "
          f"final_size={info['final_size']} -> {path}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    failures = run_selftest(print)
    return EXIT_INVARIANT if failures else EXIT_OK


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "rank": cmd_rank, "smote": cmd_smote,
            "selftest": cmd_selftest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, EmptySelectionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AssertionError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
