"""End-to-end tests of the command-line interface: exit codes, file
artifacts, round-trips, and seed determinism."""
from __future__ import annotations

import csv
import json
import math

import numpy as np
import pytest

from logroots.cli import main, process_artifact_from_dict
from logroots.coeffs import TailSpec

DEG5_LINES = "0 0\n-20 3.141592653589793\n-20 0\n-20 3.141592653589793\n-20 0\n10 0\n"


def run(*argv):
    return main(list(argv))


# ----------------------------------------------------------------- usage


def test_missing_required_flag_exits_1(capsys):
    assert run("roots", "--spec", "fig1b", "--n", "100") == 1
    err = capsys.readouterr().err
    assert err.startswith("error:") and "usage: logroots roots" in err


def test_unknown_subcommand_exits_1(capsys):
    assert run("bogus") == 1
    assert "usage:" in capsys.readouterr().err


def test_unknown_flag_exits_1(capsys):
    assert run("el-alpha", "--frobnicate") == 1
    assert "usage:" in capsys.readouterr().err


def test_bad_grid_value_exits_1(capsys):
    assert run("el-alpha", "--grid", "abc") == 1
    err = capsys.readouterr().err
    assert "error:" in err and "usage: logroots el-alpha" in err


# --------------------------------------------------------------- el-alpha


def test_el_alpha_table(tmp_path):
    out = tmp_path / "table.csv"
    assert run("el-alpha", "--grid", "0.25,0.5,0.75", "--out", str(out)) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["alpha"] for r in rows] == ["0.25", "0.5", "0.75"]
    for r in rows:
        closed, integral = float(r["closed"]), float(r["integral"])
        assert abs(closed - integral) < 1e-6
        assert float(r["prob_two_segments"]) == 1.0 - float(r["alpha"])


def test_el_alpha_default_grid_has_19_rows(capsys):
    assert run("el-alpha") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "alpha,closed,integral,prob_two_segments"
    assert len(lines) == 20


# ------------------------------------------------------- simulate-process


def test_simulate_process_round_trip(tmp_path):
    out = tmp_path / "proc.json"
    assert run("simulate-process", "--alpha", "0.5", "--seed", "3",
               "--out", str(out)) == 0
    obj = json.loads(out.read_text())
    sample, majorant, count = process_artifact_from_dict(obj)
    assert sample.alpha == 0.5
    assert count == len(majorant.segments)
    assert obj["majorant"]["vertices"][0] == [0.0, 0.0]
    # re-serialization is the identity on the parsed dict
    assert json.loads(json.dumps(obj)) == obj


def test_simulate_process_seed_determinism(tmp_path):
    a, b, c = (tmp_path / name for name in ("a.json", "b.json", "c.json"))
    run("simulate-process", "--alpha", "0.25", "--seed", "9", "--out", str(a))
    run("simulate-process", "--alpha", "0.25", "--seed", "9", "--out", str(b))
    run("simulate-process", "--alpha", "0.25", "--seed", "10", "--out", str(c))
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_simulate_process_bad_miss_tol_exits_2(capsys):
    assert run("simulate-process", "--alpha", "0.5", "--seed", "1",
               "--miss-tol", "0.5") == 2
    assert capsys.readouterr().err.startswith("error:")


# ------------------------------------------------------------------- roots


def test_roots_csv_schema_and_verification(tmp_path):
    out = tmp_path / "roots.csv"
    assert run("roots", "--spec", "pareto_log", "--alpha", "0.5",
               "--n", "12", "--seed", "3", "--out", str(out)) == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["segment", "m", "log_r", "phase", "certified", "verified"]
    assert len(rows) == 12  # one predicted root per degree
    for r in rows:
        assert -math.pi < float(r["phase"]) <= math.pi
        if r["certified"] == "true":
            assert r["verified"] == "true"


def test_roots_spec_from_json_file(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(TailSpec(family="pareto_log", alpha=0.5).to_json())
    out = tmp_path / "roots.csv"
    assert run("roots", "--spec", str(spec_path), "--n", "10", "--seed", "4",
               "--out", str(out)) == 0
    assert len(out.read_text().splitlines()) == 11


def test_roots_seed_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run("roots", "--spec", "fig1b", "--n", "80", "--seed", "7", "--out", str(a))
    run("roots", "--spec", "fig1b", "--n", "80", "--seed", "7", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_roots_pareto_requires_alpha(capsys):
    assert run("roots", "--spec", "pareto_log", "--n", "10", "--seed", "1") == 2
    assert "--alpha" in capsys.readouterr().err


def test_roots_unknown_spec_exits_2(capsys):
    assert run("roots", "--spec", "cauchy", "--n", "10", "--seed", "1") == 2


# ------------------------------------------------------------ verify-lemma


def test_verify_lemma_degree5(tmp_path):
    coeffs = tmp_path / "deg5.txt"
    coeffs.write_text(DEG5_LINES)
    out = tmp_path / "verify.json"
    assert run("verify-lemma", "--coeffs-file", str(coeffs), "--out", str(out)) == 0
    obj = json.loads(out.read_text())
    assert obj["degree"] == 5
    assert obj["all_verified"] is True
    seg = obj["segments"][0]
    assert seg["certified"] is True
    assert 0.0 < seg["delta"] < 1e-8
    assert 0.0 < seg["zeta"] < 1e-3
    assert len(obj["boxes"]) == 5
    for box in obj["boxes"]:
        assert box["winding"] == 1 and box["verified"] is True
        assert box["log_radius"] == pytest.approx(-2.0)
    assert json.loads(json.dumps(obj)) == obj


def test_verify_lemma_malformed_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3\n")
    assert run("verify-lemma", "--coeffs-file", str(bad)) == 2
    assert "log_modulus phase" in capsys.readouterr().err


def test_verify_lemma_missing_file_exits_2(tmp_path):
    assert run("verify-lemma", "--coeffs-file", str(tmp_path / "nope.txt")) == 2


# -------------------------------------------------------------- experiment


def _write_config(path, **overrides):
    cfg = {
        "kind": "segment_count",
        "spec": {"family": "pareto_log", "alpha": 0.5, "c": 0.5, "p": 0.5,
                 "complex": False},
        "trials": 300,
        "master_seed": 11,
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return path


def test_experiment_runs_config(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json")
    out = tmp_path / "report.json"
    assert run("experiment", "--config", str(cfg), "--out", str(out)) == 0
    rep = json.loads(out.read_text())
    names = [s["name"] for s in rep["statistics"]]
    assert names == ["mean_segments", "prob_two_segments"]
    assert all(s["pass"] for s in rep["statistics"])


def test_experiment_flag_overrides_config(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json")
    out = tmp_path / "report.json"
    assert run("experiment", "--config", str(cfg), "--trials", "150",
               "--seed", "5", "--out", str(out)) == 0
    rep = json.loads(out.read_text())
    assert rep["config"]["trials"] == 150
    assert rep["config"]["master_seed"] == 5


def test_experiment_failing_statistic_exits_3(tmp_path):
    # seed 14 at 25 trials lands a rectangle mean outside its 3 sigma band
    cfg = _write_config(
        tmp_path / "cfg.json",
        kind="process_convergence",
        spec={"family": "pareto_log", "alpha": 1.0, "c": 0.5, "p": 0.5,
              "complex": False},
        trials=25,
        master_seed=14,
        n=400,
    )
    out = tmp_path / "report.json"
    assert run("experiment", "--config", str(cfg), "--out", str(out)) == 3
    rep = json.loads(out.read_text())
    assert any(s["pass"] is False for s in rep["statistics"])


def test_experiment_bad_config_exits_2(tmp_path, capsys):
    cfg = _write_config(tmp_path / "cfg.json", kind="nonsense")
    assert run("experiment", "--config", str(cfg)) == 2
    assert "unknown experiment kind" in capsys.readouterr().err


def test_experiment_missing_config_exits_2(tmp_path):
    assert run("experiment", "--config", str(tmp_path / "nope.json")) == 2


# --------------------------------------------------------------- plot-data


def test_plot_data_process_artifact(tmp_path, capsys):
    proc = tmp_path / "proc.json"
    run("simulate-process", "--alpha", "0.5", "--seed", "3", "--out", str(proc))
    capsys.readouterr()
    assert run("plot-data", str(proc)) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "x,y,series"
    series = {line.rsplit(",", 1)[1] for line in lines[1:]}
    assert series == {"atom", "hull"}


def test_plot_data_experiment_report(tmp_path, capsys):
    cfg = _write_config(tmp_path / "cfg.json", trials=60)
    rep = tmp_path / "report.json"
    run("experiment", "--config", str(cfg), "--out", str(rep))
    assert run("plot-data", str(rep), "--out", str(tmp_path / "plot.csv")) == 0
    rows = list(csv.DictReader((tmp_path / "plot.csv").open()))
    assert [r["series"] for r in rows] == ["mean_segments", "prob_two_segments"]


def test_plot_data_verify_artifact(tmp_path):
    coeffs = tmp_path / "deg5.txt"
    coeffs.write_text(DEG5_LINES)
    ver = tmp_path / "verify.json"
    run("verify-lemma", "--coeffs-file", str(coeffs), "--out", str(ver))
    out = tmp_path / "plot.csv"
    assert run("plot-data", str(ver), "--out", str(out)) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 5
    assert {r["series"] for r in rows} == {"segment0"}
    assert {float(r["y"]) for r in rows} == {-2.0}


def test_plot_data_unrecognized_artifact_exits_2(tmp_path, capsys):
    blob = tmp_path / "other.json"
    blob.write_text('{"answer": 42}')
    assert run("plot-data", str(blob)) == 2
    assert "unrecognized artifact" in capsys.readouterr().err
