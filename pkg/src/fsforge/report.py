"""Report serialization: report.json, report.csv, plot-ready series and GA traces."""

from __future__ import annotations

import csv
import io
import json
import os
from typing import Sequence

from .metrics import RATE_KEYS

# (file stem, per-classifier field or group field)
PER_CLASSIFIER_SERIES = [(f"{k}_by_classifier", k) for k in
                         ("ms", "rae", "tp_rate", "tn_rate", "fp_rate", "fn_rate")]
GROUP_SERIES = [(f"{k}_by_method", k) for k in
                ("ams", "arae", "atp_rate", "atn_rate", "afp_rate", "afn_rate")]


def report_json(runs) -> str:
    payload = {"format": "fsforge-report/1",
               "methods": [r.report.to_dict() for r in runs]}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv(rows: Sequence[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _value(result, key):
    return result.ms if key == "ms" else result.rae if key == "rae" else result.rates[key]


def report_csv(runs) -> str:
    rows = []
    for r in runs:
        for c in r.report.classifiers:
            rows.append([r.report.method, c.classifier, c.ms, repr(c.rae)]
                        + [repr(c.rates[k]) for k in RATE_KEYS])
    return _csv(rows, ["method", "classifier", "ms", "rae"] + list(RATE_KEYS))


def series_tables(runs) -> dict[str, str]:
    """One wide CSV per parameter plus a long-form ``group_bars.csv``."""
    out = {}
    for stem, key in PER_CLASSIFIER_SERIES:
        rows = [[r.report.method, c.classifier, repr(float(_value(c, key)))]
                for r in runs for c in r.report.classifiers]
        out[f"{stem}.csv"] = _csv(rows, ["method", "classifier", key])
    long_rows = []
    for stem, key in GROUP_SERIES:
        rows = [[r.report.method, repr(r.report.group[key])] for r in runs]
        out[f"{stem}.csv"] = _csv(rows, ["method", key])
        long_rows += [[r.report.method, key, repr(r.report.group[key])] for r in runs]
    out["group_bars.csv"] = _csv(long_rows, ["method", "parameter", "value"])
    return out


def trace_csv(runs) -> str:
    rows = []
    for r in runs:
        if r.ga is None:
            continue
        for g in r.ga.trace:
            rows.append([r.report.method, g.generation, repr(g.best_fitness),
                         repr(g.mean_fitness), g.best_mask_size])
    return _csv(rows, ["method", "generation", "best_fitness", "mean_fitness", "best_mask_size"])


def write_outputs(out_dir: str, runs) -> list[str]:
    """Write every artefact under ``out_dir``; returns the written paths."""
    written = []

    def put(rel, text):
        path = os.path.join(out_dir, rel)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        written.append(path)

    put("report.json", report_json(runs))
    put("report.csv", report_csv(runs))
    for name, text in series_tables(runs).items():
        put(os.path.join("series", name), text)
    put(os.path.join("trace", "ga_trace.csv"), trace_csv(runs))
    for r in runs:
        put(os.path.join("selected", f"{r.report.method}.json"),
            json.dumps(r.report.selected_features) + "\n")
    return written
