import csv
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from ssfrac import cli
from ssfrac.cli import main


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestGmlEval:
    def test_drift_csv(self, tmp_path):
        out = tmp_path / "e.csv"
        assert main(["gml-eval", "--phi", "drift:b=1", "--alpha", "0.5", "--z=-1,0,1", "--out", str(out)]) == 0
        rows = _rows(out)
        assert rows[0] == ["z", "value", "method", "est_error"]
        values = [float(r[1]) for r in rows[1:]]
        np.testing.assert_allclose(values, [math.exp(-2), 1.0, math.exp(2)], rtol=1e-13)

    def test_full_precision_roundtrip(self, tmp_path):
        out = tmp_path / "e.csv"
        main(["gml-eval", "--phi", "stable", "--alpha", "0.5", "--q", "30", "--out", str(out)])
        text = _rows(out)[1][1]
        assert len(text.replace(".", "").lstrip("0")) >= 16
        np.testing.assert_allclose(float(text), 0.018795888861416751497, rtol=1e-12)

    def test_bare_stable_takes_alpha(self, tmp_path):
        out = tmp_path / "e.json"
        main(["gml-eval", "--phi", "stable", "--alpha", "0.3", "--q", "1", "--format", "json", "--out", str(out)])
        data = json.loads(out.read_text())
        assert data["phi"] == "stable:alpha=0.3"
        np.testing.assert_allclose(data["rows"][0]["value"], 0.45659440832969067062, rtol=1e-11)

    def test_grid_syntax(self, tmp_path):
        out = tmp_path / "e.csv"
        main(["gml-eval", "--phi", "stable", "--alpha", "0.5", "--q", "0:2:5", "--out", str(out)])
        assert [float(r[0]) for r in _rows(out)[1:]] == [0.0, -0.5, -1.0, -1.5, -2.0]

    def test_forced_methods(self, tmp_path):
        for method, q in (("series", "2"), ("mellin_barnes", "100"), ("asymptotic", "100")):
            out = tmp_path / f"{method}.csv"
            assert main(["gml-eval", "--phi", "stable", "--alpha", "0.5", "--q", q,
                         "--method", method, "--out", str(out)]) == 0
            assert _rows(out)[1][2] == method

    def test_series_diverging_budget(self, capsys):
        assert main(["gml-eval", "--phi", "stable", "--alpha", "0.5", "--q", "100", "--method", "series"]) == 3
        assert "NonConvergence" in capsys.readouterr().err

    def test_stdout(self, capsys):
        assert main(["gml-eval", "--phi", "drift:b=1", "--alpha", "0.5", "--z", "0"]) == 0
        assert capsys.readouterr().out.startswith("z,value")


class TestExitCodes:
    @pytest.mark.parametrize("argv", [
        ["gml-eval", "--alpha", "0.5", "--z", "1"],
        ["gml-eval", "--phi", "gauss", "--alpha", "0.5", "--z", "1"],
        ["gml-eval", "--phi", "drift", "--alpha", "0.5", "--z", "a,b"],
        ["gml-eval", "--phi", "drift", "--alpha", "0.5"],
        ["gml-eval", "--phi", "drift", "--alpha", "0.5", "--z", "1", "--q", "1"],
        ["solve", "--model", "hermite", "--phi", "drift", "--alpha", "0.5"],
        ["solve", "--model", "laguerre", "--phi", "drift", "--alpha", "0.5", "--f", "sin:1"],
        ["nonsense"],
    ])
    def test_parse_errors(self, argv, capsys):
        assert main(argv) == 2
        assert "error" in capsys.readouterr().err

    @pytest.mark.parametrize("argv", [
        ["gml-eval", "--phi", "drift", "--alpha", "1.5", "--z", "1"],
        ["gml-eval", "--phi", "poisson:q=0.5", "--alpha", "1", "--z", "3"],
        ["gml-eval", "--phi", "stable", "--alpha", "0.5", "--z", "1", "--method", "mellin_barnes"],
        ["simulate", "--phi", "poisson:q=0.5", "--alpha", "0.5"],
        ["solve", "--model", "laguerre", "--phi", "drift", "--alpha", "0.5", "--t=-1"],
        ["verify", "--suite", "power", "--tol", "0"],
    ])
    def test_runtime_errors(self, argv, capsys):
        assert main(argv) == 3
        assert capsys.readouterr().err.startswith("ssfrac:")

    def test_verify_failure_is_one(self, capsys):
        assert main(["verify", "--suite", "scaling", "--tol", "1e-300"]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_verify_pass(self, tmp_path, capsys):
        out = tmp_path / "v.json"
        assert main(["verify", "--suite", "biorth", "--format", "json", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert all(c["passed"] for c in data["checks"])


class TestConfig:
    def test_config_supplies_required(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# drift run\nphi = drift:b=1\nalpha = 0.5\nz = 1\n")
        out = tmp_path / "e.csv"
        assert main(["gml-eval", "--config", str(cfg), "--out", str(out)]) == 0
        np.testing.assert_allclose(float(_rows(out)[1][1]), math.exp(2), rtol=1e-13)

    def test_flags_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("phi = drift:b=1\nalpha = 0.5\nz = 1\n")
        out = tmp_path / "e.csv"
        assert main(["gml-eval", "--config", str(cfg), "--q", "1", "--out", str(out)]) == 0
        np.testing.assert_allclose(float(_rows(out)[1][1]), math.exp(-2), rtol=1e-13)

    def test_unknown_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("phi = drift\nalpha = 0.5\ncolour = red\n")
        assert main(["gml-eval", "--config", str(cfg), "--z", "1"]) == 3

    def test_malformed_line(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("phi drift\n")
        assert main(["gml-eval", "--config", str(cfg), "--z", "1"]) == 3

    def test_missing_file(self, tmp_path):
        assert main(["gml-eval", "--config", str(tmp_path / "none.cfg"), "--z", "1"]) == 3


class TestSimulate:
    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        base = ["simulate", "--phi", "stable", "--alpha", "0.5", "--t", "0.5,1", "--n", "2000", "--seed", "7"]
        assert main(base + ["--out", str(a)]) == 0
        assert main(base + ["--out", str(b), "--workers", "3"]) == 0
        assert a.read_bytes() == b.read_bytes()
        data = json.loads(a.read_text())
        assert [s["t"] for s in data["summaries"]] == [0.5, 1.0]
        assert data["summaries"][0]["seed"] == 7

    def test_dump_and_csv(self, tmp_path):
        out, dump = tmp_path / "s.csv", tmp_path / "raw.csv"
        assert main(["simulate", "--phi", "drift:b=1", "--alpha", "0.5", "--n", "10", "--format", "csv",
                     "--dump", str(dump), "--out", str(out)]) == 0
        raw = _rows(dump)
        assert len(raw) == 11
        np.testing.assert_allclose(float(raw[1][0]), 2.0)
        assert _rows(out)[0] == ["t", "mean", "std_error", "n", "seed"]


class TestSolve:
    def test_drift_value_and_sidecar(self, tmp_path):
        out = tmp_path / "u.csv"
        assert main(["solve", "--model", "laguerre", "--phi", "drift:b=1", "--alpha", "0.5",
                     "--f", "mode:1", "--t", "1", "--x", "0,1", "--out", str(out)]) == 0
        rows = _rows(out)
        assert rows[0][0] == "t"
        np.testing.assert_allclose(float(rows[1][1]), math.exp(-2), rtol=1e-13)
        meta = json.loads((tmp_path / "u.json").read_text())
        assert meta["model"] == "laguerre" and meta["x"] == [0.0, 1.0]

    def test_polynomial_datum(self, tmp_path):
        out = tmp_path / "u.json"
        assert main(["solve", "--model", "jacobi:lam1=3,mu=1", "--phi", "stable", "--alpha", "0.5",
                     "--f", "poly:1,2", "--t", "0", "--x", "0.25", "--format", "json", "--out", str(out)]) == 0
        u = json.loads(out.read_text())["u"]
        np.testing.assert_allclose(u[0][0], 1.5, rtol=1e-12)


class TestAtomicWrite:
    def test_no_partial_file_on_failure(self, tmp_path, monkeypatch):
        target = tmp_path / "keep.csv"
        target.write_text("old\n")

        def boom(src, dst):
            raise OSError("disk full")

        monkeypatch.setattr(cli.os, "replace", boom)
        with pytest.raises(OSError):
            cli._atomic_write(str(target), "new\n")
        assert target.read_text() == "old\n"
        assert sorted(os.listdir(tmp_path)) == ["keep.csv"]


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run([sys.executable, "-m", "ssfrac", "gml-eval", "--phi", "drift:b=1",
                               "--alpha", "0.5", "--z", "0.5"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert float(proc.stdout.splitlines()[1].split(",")[1]) == pytest.approx(math.e, rel=1e-14)
