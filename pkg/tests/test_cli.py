import json
import subprocess
import sys

import pytest

from conftest import imbalanced_fixture, write_csv
from fsforge.cli import EXIT_CONFIG, EXIT_DATA, EXIT_INVARIANT, EXIT_OK, main, resolve_config, build_parser
from fsforge.data import load_arff


@pytest.fixture(scope="module")
def csv_path(tmp_path_factory):
    return write_csv(tmp_path_factory.mktemp("data") / "small.data", imbalanced_fixture(5))


def common(csv_path, out):
    return ["--data", csv_path, "--format", "csv", "--class-col", "0", "--all-nominal",
            "--folds", "5", "--ga-gens", "3", "--out", str(out)]


def test_run_writes_outputs(csv_path, tmp_path, capsys):
    assert main(["run", *common(csv_path, tmp_path), "--method", "hybrid"]) == EXIT_OK
    for rel in ["report.json", "report.csv", "run.log", "trace/ga_trace.csv", "selected/hybrid.json",
                "series/ms_by_classifier.csv", "series/afn_rate_by_method.csv", "series/group_bars.csv"]:
        assert (tmp_path / rel).is_file(), rel
    out = capsys.readouterr().out
    assert out.startswith("method,ams,arae") and "hybrid," in out
    assert "phase 1" in (tmp_path / "run.log").read_text()
    payload = json.loads((tmp_path / "report.json").read_text())
    assert payload["methods"][0]["seed"] == 1


def test_compare_reports_identical_across_jobs(csv_path, tmp_path):
    args = common(csv_path, tmp_path / "a") + ["--methods", "all_features,hybrid"]
    assert main(["compare", *args]) == EXIT_OK
    args = common(csv_path, tmp_path / "b") + ["--methods", "all_features,hybrid", "--jobs", "2"]
    assert main(["compare", *args]) == EXIT_OK
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    assert len((tmp_path / "a" / "series" / "ms_by_classifier.csv").read_text().splitlines()) == 11


def test_unknown_method_is_config_error(csv_path, tmp_path, capsys):
    assert main(["compare", *common(csv_path, tmp_path), "--methods", "hybrid,ga_classifier"]) == EXIT_CONFIG
    assert "all_features" in capsys.readouterr().err


def test_threshold_error_exit_code(csv_path, tmp_path, capsys):
    assert main(["run", *common(csv_path, tmp_path), "--ig-threshold", "9"]) == EXIT_CONFIG
    assert "lower the threshold" in capsys.readouterr().err


def test_missing_file_is_data_error(tmp_path):
    assert main(["run", "--data", str(tmp_path / "none.arff"), "--out", str(tmp_path)]) == EXIT_DATA


def test_malformed_arff_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.arff"
    bad.write_text("@relation r\n@attribute a {x}\n@attribute c {p,q}\n@data\nx,z\n")
    assert main(["rank", "--data", str(bad), "--out", str(tmp_path)]) == EXIT_DATA
    assert "line 5" in capsys.readouterr().err


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[run]\nmethod = nope\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_flags_override_config_and_env_seed(tmp_path, monkeypatch):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[run]\nmethod = info_gain\nseed = 5\n[ga]\npopulation_size = 8\n")
    args = build_parser().parse_args(["run", "--config", str(cfg), "--ga-pop", "12"])
    resolved = resolve_config(args)
    assert (resolved.method, resolved.seed, resolved.ga.population_size) == ("info_gain", 5, 12)
    monkeypatch.setenv("FSFORGE_SEED", "77")
    assert resolve_config(build_parser().parse_args(["run"])).seed == 77
    assert resolve_config(build_parser().parse_args(["run", "--seed", "3"])).seed == 3
    assert resolve_config(build_parser().parse_args(["run", "--config", str(cfg)])).seed == 5


def test_rank_subcommand(csv_path, tmp_path, capsys):
    assert main(["rank", *common(csv_path, tmp_path)]) == EXIT_OK
    lines = (tmp_path / "ranking.csv").read_text().splitlines()
    assert lines[0] == "attribute,info_gain,symmetrical_uncertainty,rank"
    assert len(lines) == 11
    scores = [float(line.split(",")[1]) for line in lines[1:]]
    assert scores == sorted(scores, reverse=True)


def test_smote_subcommand(csv_path, tmp_path, capsys):
    assert main(["smote", *common(csv_path, tmp_path)]) == EXIT_OK
    merged = load_arff((tmp_path / "phase1.arff").read_text(), -1)
    assert 32 <= len(merged) <= 39
    assert "generated=7" in capsys.readouterr().out


def test_selftest_subcommand(capsys):
    assert main(["selftest"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("PASS") == 6 and "FAIL" not in out


def test_invariant_violation_exit_code(monkeypatch, csv_path, tmp_path):
    from fsforge import pipeline

    def broken(cfg, d=None):
        raise AssertionError("group value ams drifted")

    monkeypatch.setattr(pipeline, "run_method", broken)
    assert main(["run", *common(csv_path, tmp_path)]) == EXIT_INVARIANT


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fsforge", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "selftest" in proc.stdout
