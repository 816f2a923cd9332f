import json
import math

import numpy as np
import pytest

from ocad.cli import main


def test_table1(capsys):
    assert main(["table1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "k,standard,classic,optimal"
    rows = {int(l.split(",")[0]): [float(v) for v in l.split(",")[1:]] for l in lines[1:]}
    assert rows[1] == pytest.approx([1 / 3, 0.5, 0.5], abs=1e-10)
    assert rows[6] == pytest.approx([1 / 13, 1 / 20, 1 - math.sqrt(30) / 6], abs=1e-9)
    assert rows[8][0] == pytest.approx(1 / 17, abs=1e-10)
    assert rows[8][1] == pytest.approx(1 / 30, abs=1e-12)
    assert rows[8][2] == pytest.approx(0.05767, abs=5e-5)


def test_build_verify_round_trip(tmp_path, capsys):
    out = tmp_path / "p4.json"
    assert main(["build", "P", "4", "-0.3", "optimal", "-o", str(out)]) == 0
    assert out.exists()
    assert main(["verify", str(out)]) == 0
    text = capsys.readouterr().out
    assert "criterion#4:      PASS" in text
    assert "criterion#2:      PASS" in text


def test_build_q_optimal(tmp_path):
    out = tmp_path / "q5.json"
    assert main(["build", "Q", "5", "0.7", "optimal", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["boundary_weight"] == pytest.approx(1 / 12, abs=1e-14)


def test_build_quasi_matches_optimal_for_quadratic(tmp_path):
    a = tmp_path / "quasi.json"
    b = tmp_path / "opt.json"
    assert main(["build", "P", "2", "0", "quasi", "-o", str(a)]) == 0
    assert main(["build", "P", "2", "0", "optimal", "-o", str(b)]) == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    assert da["boundary_weight"] == pytest.approx(db["boundary_weight"], abs=1e-14)


def test_build_numeric_octic(tmp_path, capsys):
    out = tmp_path / "p8.json"
    assert main(["build", "P", "8", "-0.4", "optimal", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["provenance"] == "numeric"
    assert main(["verify", str(out)]) == 0
    assert "criterion#4:      PASS" in capsys.readouterr().out


def test_build_degree_nine_retags_numeric_optimum(tmp_path):
    out = tmp_path / "p9.json"
    assert main(["build", "P", "9", "0.0", "optimal", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["space"]["degree"] == 9
    assert doc["boundary_weight"] == pytest.approx(0.05767, abs=5e-5)
    assert main(["verify", str(out)]) == 0


def test_verify_tampered_file_fails(tmp_path, capsys):
    path = tmp_path / "cad.json"
    assert main(["build", "P", "3", "-0.5", "optimal", "-o", str(path)]) == 0
    doc = json.loads(path.read_text())
    doc["boundary_weight"] += 1e-3
    path.write_text(json.dumps(doc))
    assert main(["verify", str(path)]) == 1
    assert "NOT FEASIBLE" in capsys.readouterr().out


def test_usage_errors(tmp_path):
    assert main(["build", "P", "10", "0.0", "optimal", "-o", str(tmp_path / "x.json")]) == 2
    assert main(["verify", str(tmp_path / "missing.json")]) == 2
    assert main(["bogus"]) == 2


def test_ratio_sweep(capsys):
    assert main(["ratio-sweep", "--k", "2", "--thetas=-1:1:0.25"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "theta,omega_star,classic_ratio,quasi_ratio"
    for line in lines[1:]:
        theta, star, classic, quasi = (float(v) for v in line.split(","))
        assert quasi == pytest.approx(1.0, abs=1e-12)  # quadratic: quasi is optimal
        if abs(abs(theta) - 1.0) < 1e-12:
            assert classic == pytest.approx(1.0, abs=1e-12)


def test_ratio_sweep_quasi_quality(capsys):
    for k in (4, 6):
        assert main(["ratio-sweep", "--k", str(k), "--thetas=-1:1:0.2"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()[1:]
        for line in lines:
            quasi = float(line.split(",")[3])
            assert 0.95 <= quasi <= 1.0 + 1e-12


def test_run_command(tmp_path, capsys):
    cfg = {
        "problem": {"kind": "advection"},
        "k": 1,
        "t_end": 0.05,
        "cad": "classic",
        "limiter": "simplified",
        "bounds": [-1, 1],
        "nx": 8,
        "ny": 8,
    }
    cfg_path = tmp_path / "case.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["run", str(cfg_path), "-o", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "errors.csv").exists()
    assert main(["run", str(tmp_path / "nope.json")]) == 2
