"""Command-line interface: config layering, artifacts, exit codes.

Everything runs in-process through ``main(argv)`` so exit codes and output
files can be asserted directly; one subprocess smoke covers the installed
entry point.
"""

from __future__ import annotations

import csv
import json
import shutil
import subprocess
import sys

import pytest

from eastmodel.cli import main


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# --------------------------------------------------------------------------
# subcommands end to end
# --------------------------------------------------------------------------

def test_selftest_passes(tmp_path, capsys):
    assert main(["selftest", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    payload = _read_json(tmp_path / "selftest.json")
    assert payload["meta"]["passed"] is True
    assert all(v["passed"] for v in payload["verdicts"])


def test_reach_emits_range_table(tmp_path):
    assert main(["reach", "--n", "4", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "reach.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["ell"]) for r in rows] == [1, 3, 7, 15]
    payload = _read_json(tmp_path / "reach.json")
    assert payload["config"]["n"] == 4
    assert payload["meta"]["passed"] is True


def test_gap_output_is_byte_stable(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        assert main(["gap", "--q", "0.5", "--L", "6", "--out", str(d)]) == 0
    assert (d1 / "gap.csv").read_bytes() == (d2 / "gap.csv").read_bytes()
    raw = (d1 / "gap.csv").read_bytes()
    assert raw.count(b"\r\n") == raw.count(b"\n")  # RFC-4180 line endings
    header = raw.split(b"\r\n", 1)[0].decode()
    assert header.split(",")[:2] == ["L", "q"]
    # floats are written as repr: shortest string that round-trips
    with open(d1 / "gap.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[1]["gap"] == "0.2928932188134522"


def test_limits_eval_table(tmp_path):
    assert main(["limits-eval", "--s-points", "8", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "limits-eval.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    by_q = {}
    for r in rows:
        by_q.setdefault(r["quantity"], []).append(r)
    assert float(by_q["laplace_at_0"][0]["value"]) == 1.0
    assert {"exp_integral_E1", "laplace_domain_length", "density", "mean"} <= set(by_q)


# --------------------------------------------------------------------------
# configuration layering
# --------------------------------------------------------------------------

def test_flags_beat_env_beats_file(tmp_path, monkeypatch):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("q = 0.4\nL = 3\n", encoding="utf-8")
    monkeypatch.setenv("EASTMODEL_L", "4")
    out = tmp_path / "o1"
    rc = main(
        ["gap", "--config", str(cfgfile), "--L", "5", "--out", str(out)]
    )
    assert rc == 0
    cfg = _read_json(out / "gap.json")["config"]
    assert cfg["q"] == 0.4  # from the file, nothing overrode it
    assert cfg["L"] == 5  # flag wins over env wins over file


def test_env_overrides_defaults(tmp_path, monkeypatch):
    monkeypatch.setenv("EASTMODEL_Q", "0.25")
    monkeypatch.setenv("EASTMODEL_L", "4")
    out = tmp_path / "o"
    assert main(["gap", "--out", str(out)]) == 0
    cfg = _read_json(out / "gap.json")["config"]
    assert cfg["q"] == 0.25 and cfg["L"] == 4


def test_unknown_config_file_key_exits_2(tmp_path, capsys):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("bogus = 1\n", encoding="utf-8")
    assert main(["gap", "--config", str(cfgfile), "--out", str(tmp_path)]) == 2
    assert "bogus" in capsys.readouterr().err


def test_unknown_env_key_exits_2(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("EASTMODEL_TYPO", "1")
    assert main(["gap", "--L", "3", "--out", str(tmp_path)]) == 2
    assert "TYPO" in capsys.readouterr().err


def test_env_key_for_other_subcommand_is_ignored(tmp_path, monkeypatch):
    # MU is meaningful for the quench subcommands, so it is not a typo here
    monkeypatch.setenv("EASTMODEL_MU", "geometric:0.5")
    assert main(["gap", "--L", "3", "--out", str(tmp_path)]) == 0


def test_config_round_trip(tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert (
        main(
            [
                "converge",
                "--alpha", "0.45",
                "--q", "0.3",
                "--L", "6",
                "--replicas", "500",
                "--out", str(out1),
            ]
        )
        == 0
    )
    payload = _read_json(out1 / "converge.json")
    argv = ["converge", "--out", str(out2)]
    for key, value in payload["config"].items():
        if key in ("subcommand", "out"):
            continue
        argv += [f"--{key.replace('_', '-')}", str(value)]
    assert main(argv) == 0
    replay = _read_json(out2 / "converge.json")
    assert replay["results"] == payload["results"]


# --------------------------------------------------------------------------
# exit codes and formats
# --------------------------------------------------------------------------

def test_usage_errors_exit_2(tmp_path, capsys):
    assert main([]) == 2
    assert main(["gap", "--q", "abc"]) == 2
    assert "invalid q value" in capsys.readouterr().err
    assert main(["no-such-command"]) == 2
    assert main(["gap", "--q", "1.5", "--out", str(tmp_path)]) == 2


def test_failed_verdict_exits_1(tmp_path, capsys):
    # identical pair indices leave nothing to distinguish: the aging
    # signature verdict must fail, and the exit code must say so
    rc = main(
        [
            "quench-aging",
            "--pairs", "1:2,1:2",
            "--replicas", "150",
            "--window", "32",
            "--out", str(tmp_path),
        ]
    )
    assert rc == 1
    assert "FAIL" in capsys.readouterr().out
    payload = _read_json(tmp_path / "quench-aging.json")
    assert payload["meta"]["passed"] is False


def test_format_selects_artifacts(tmp_path):
    out_csv = tmp_path / "c"
    out_json = tmp_path / "j"
    assert main(["reach", "--n", "3", "--format", "csv", "--out", str(out_csv)]) == 0
    assert (out_csv / "reach.csv").exists()
    assert not (out_csv / "reach.json").exists()
    assert main(["reach", "--n", "3", "--format", "json", "--out", str(out_json)]) == 0
    assert (out_json / "reach.json").exists()
    assert not (out_json / "reach.csv").exists()
    assert main(["reach", "--format", "yaml", "--out", str(tmp_path)]) == 2


def test_json_meta_records_versions_and_seed(tmp_path):
    assert main(["reach", "--n", "3", "--seed", "9", "--out", str(tmp_path)]) == 0
    meta = _read_json(tmp_path / "reach.json")["meta"]
    assert meta["seed"] == 9
    assert set(meta["versions"]) >= {"eastmodel", "python", "numpy", "scipy"}
    assert "wall_time_s" in meta


def test_installed_entry_point(tmp_path):
    east = shutil.which("east")
    if east is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run(
        [east, "reach", "--n", "2", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "reach.json").exists()


def test_python_dash_m_matches_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "eastmodel.cli", "reach", "--n", "2", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
