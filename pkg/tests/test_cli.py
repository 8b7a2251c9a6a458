import csv
import json
import subprocess
import sys

import pytest

from archval.cli import parse_values, run_cli
from archval.scenario import f6_demo


def cli(argv):
    return run_cli([str(a) for a in argv])


def _files(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


def test_validate_bundled(capsys):
    assert cli(["validate", "-s", "f6_demo.json"]) == 0
    out = capsys.readouterr().out
    assert "178300" in out and "273800" in out


def test_validate_rejects_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    data = f6_demo().to_dict()
    data["components"][0]["masss"] = 1
    bad.write_text(json.dumps(data))
    assert cli(["validate", "-s", bad]) == 1
    assert "masss" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["simulate", "-s", "f6_demo"],
        ["value", "-s", "f6_demo", "--from", "monolithic", "--to", "fractionated", "-o", "x", "--risk-quantile", "1.5"],
        ["sweep", "-s", "f6_demo", "--param", "components.payload.cost", "--values", "a,b", "-o", "x"],
        ["simulate", "-s", "f6_demo", "--runs", "ten", "-o", "x"],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli(argv) == 2


def test_validation_errors_exit_1(tmp_path):
    assert cli(["simulate", "-s", "f6_demo", "-a", "nope", "-o", tmp_path]) == 1
    assert cli(["validate", "-s", tmp_path / "missing.json"]) == 1
    assert cli(["simulate", "-s", "f6_demo", "--runs", "0", "-o", tmp_path]) == 1


def test_parse_values():
    assert parse_values("5,10, 20") == [5, 10, 20]
    assert parse_values("5:100:5") == [float(v) for v in range(5, 105, 5)]
    assert parse_values("0.1:0.3:0.1") == pytest.approx([0.1, 0.2, 0.3])


def test_simulate_writes_trajectory(tmp_path):
    assert cli(["simulate", "-s", "f6_demo", "--runs", 300, "--grid-years", 5, "-o", tmp_path]) == 0
    rows = list(csv.reader((tmp_path / "trajectory.csv").open()))
    assert rows[0] == ["year", "architecture", "mean", "sd", "q05", "q25", "q50", "q75", "q95"]
    assert [(r[0], r[1]) for r in rows[1:3]] == [("5", "monolithic"), ("5", "fractionated")]
    assert len(rows) == 1 + 4 * 2
    for r in rows[1:]:
        for cell in r[2:]:
            digits = cell.lstrip("-").split("e")[0].replace(".", "").lstrip("0")
            assert len(digits) <= 6


def test_value_outputs(tmp_path, capsys):
    argv = ["value", "-s", "f6_demo", "--from", "monolithic", "--to", "fractionated", "--runs", 500, "-o", tmp_path]
    assert cli(argv) == 0
    assert (tmp_path / "value.csv").read_text().startswith("year,mean,sd,q05,q25,q50,q75,q95\n")
    report = (tmp_path / "decision.txt").read_text()
    assert "fractionation" in report and "recommend" in report


def test_env_states_panel_d(capsys):
    assert cli(["env-states", "-s", "env_panel_d"]) == 0
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l.startswith("S")]
    assert len(lines) == 4 and all("\tyes\t" in l for l in lines)
    assert "required states: 4" in out


def test_sweep_csv(tmp_path):
    argv = [
        "sweep", "-s", "f6_demo", "--param", "tech_package.F6TP.failure.mean", "--values", "10,40",
        "--param2", "tech_package.F6TP.failure.shape", "--values2", "5", "--runs", 200, "-o", tmp_path,
    ]
    assert cli(argv) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "tech_package.F6TP.failure.mean,tech_package.F6TP.failure.shape,mean,sd,q05,q95"
    assert len(lines) == 4
    assert lines[-1].startswith("# zero_crossing[tech_package.F6TP.failure.shape=5]=")


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "-s", "f6_demo", "--runs", 3000, "--seed", 7],
        ["value", "-s", "f6_demo", "--from", "monolithic", "--to", "fractionated", "--runs", 3000, "--seed", 42],
        ["sweep", "-s", "f6_demo", "--param", "tech_package.F6TP.failure.mean", "--values", "20,60", "--runs", 1000],
    ],
    ids=["simulate", "value", "sweep"],
)
def test_repeat_and_thread_invariance(argv, tmp_path, monkeypatch):
    outputs = []
    for i, threads in enumerate([1, 1, 4]):
        out = tmp_path / str(i)
        assert cli([*argv, "--threads", threads, "-o", out]) == 0
        outputs.append(_files(out))
    monkeypatch.setenv("ARCHVAL_THREADS", "2")
    out = tmp_path / "env"
    assert cli([*argv, "-o", out]) == 0
    outputs.append(_files(out))
    assert all(o == outputs[0] for o in outputs[1:])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "archval", "validate", "-s", "f6_demo"], capture_output=True, text=True)
    assert proc.returncode == 0 and "OK" in proc.stdout
