import json
import math
import os

import numpy as np
import pytest

from riesz_lab.cli import run


def test_zeta_value(capsys):
    assert run(["zeta", "--x", "2"]) == 0
    out = capsys.readouterr().out.strip()
    assert out.startswith("1.644934")


def test_zeta_pole_is_numeric_failure(capsys):
    assert run(["zeta", "--x", "1.0"]) == 2
    assert "zeta pole" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert run([]) == 1
    assert run(["minimize"]) == 1                       # missing required flags
    assert run(["minimize", "--model", "nope", "--n", "2"]) == 1
    assert run(["lattice-scan", "--s", "5"]) == 1       # s outside (0, 2)
    assert run(["frobnicate"]) == 1


def test_minimize_two_points(tmp_path, capsys):
    out = tmp_path / "report.json"
    argv = ["minimize", "--model", "semicircle", "--n", "2", "--trials", "4",
            "--seed", "1", "--no-timestamp", "--out", str(out)]
    assert run(argv) == 0
    report = json.loads(out.read_text())
    assert report["value"] == pytest.approx(1.0 - math.log(2.0), abs=1e-6)
    assert report["kernel_spec"]["case"] == "log1d"
    assert report["separation"]["all_in_support"] is True
    first = out.read_bytes()
    assert run(argv) == 0
    assert out.read_bytes() == first        # byte-identical reports


def test_minimize_append_csv(tmp_path):
    csv_path = tmp_path / "mins.csv"
    for n in (2, 3):
        assert run(["minimize", "--model", "semicircle", "--n", str(n),
                    "--trials", "2", "--seed", "1", "--no-timestamp",
                    "--out", str(tmp_path / f"r{n}.json"),
                    "--append-csv", str(csv_path)]) == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "n,value"
    assert len(lines) == 3


def test_split_check_csv(tmp_path):
    out = tmp_path / "rows.csv"
    assert run(["split-check", "--model", "semicircle", "--n", "8",
                "--count", "5", "--seed", "3", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("index,H,mean_field")
    assert len(lines) == 6
    for line in lines[1:]:
        gap = float(line.split(",")[-1])
        h = float(line.split(",")[1])
        assert abs(gap) <= 1e-9 * (1 + abs(h))


def test_fit_from_csv(tmp_path, capsys):
    data = tmp_path / "data.csv"
    rows = ["n,value"]
    for n in (8, 16, 32, 64):
        rows.append(f"{n},{0.75 * n * n - n * math.log(n) - 0.5 * n}")
    data.write_text("\n".join(rows) + "\n")
    out = tmp_path / "fit.json"
    assert run(["fit", "--model", "semicircle", "--data", str(data),
                "--xi", str(-math.log(2 * math.pi)), "--no-timestamp",
                "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["E_hat"] == pytest.approx(0.75, abs=1e-9)
    assert report["next_order_hat"] == pytest.approx(-0.5, abs=1e-9)
    assert report["predicted_next_order"] == pytest.approx(-0.5, abs=1e-7)


def test_green1d_paths(capsys):
    assert run(["green1d", "--N", "1", "--alpha", "0.5", "--x", "0.25"]) == 0
    out = capsys.readouterr().out
    assert "series" in out and "integral" in out
    series = float(out.splitlines()[0].split()[1])
    closed = -math.log(2 * math.sin(math.pi * 0.25)) / (2 * math.pi)
    assert series == pytest.approx(closed, abs=1e-8)


def test_periodic_w_from_file(tmp_path, capsys):
    pts = tmp_path / "points.txt"
    pts.write_text("0.0\n1.0\n2.0\n3.0\n")
    out = tmp_path / "w.json"
    assert run(["periodic-w", "--points", str(pts), "--eta", "0.1",
                "--no-timestamp", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["report"]["W_value"] == pytest.approx(
        -2 * math.pi * math.log(2 * math.pi), abs=1e-5)
    assert report["W_eta"] > report["report"]["W_value"]


def test_sample_trace(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    assert run(["sample", "--model", "semicircle", "--n", "4", "--beta", "2",
                "--steps", "3000", "--burn-in", "500", "--seed", "3",
                "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "step,energy,next_order_scaled"
    assert len(lines) > 100
    summary = json.loads(capsys.readouterr().out)
    assert summary["stats"]["max_energy_drift"] <= 1e-9
    assert run(["sample", "--model", "semicircle", "--n", "4",
                "--beta", "-1", "--steps", "10"]) == 1


def test_config_file_defaults_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("x = 2\n")
    assert run(["zeta", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.startswith("1.644934")
    # explicit flag wins over the config file
    assert run(["zeta", "--config", str(cfg), "--x", "3"]) == 0
    assert capsys.readouterr().out.startswith("1.202056")


def test_lattice_scan_small(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    assert run(["lattice-scan", "--s", "1.0", "--resolution", "16",
                "--out", str(out), "--threads", "2"]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x,y,relative_W"
    assert len(lines) == 16 * 16 + 1
    summary = json.loads(capsys.readouterr().err)
    assert summary["argmin"]["x"] == pytest.approx(0.5)
    assert summary["argmin"]["y"] == pytest.approx(math.sqrt(0.75))
