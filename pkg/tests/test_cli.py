"""Config parsing, CSV emission, subcommands, and exit codes."""

import math
import os

import numpy as np
import pytest

from specdet.cli import (
    CSV_HEADER,
    ConfigError,
    config_from_dict,
    emit_csv,
    parse_config,
    run_command,
)

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "configs")

MINIMAL = """
[problem]
n = 2

[problem.boundary]
kind = "degenerate"
d = 0.5

[[problem.coefficients]]
kind = "zero"

[[problem.coefficients]]
kind = "zero"

[job]
kind = "det"
lambda = [0.0, 0.0]
"""

SYMMETRIC_PROBLEM = """
[problem]
n = 2

[problem.boundary]
kind = "degenerate"
d = {d}

[[problem.coefficients]]
kind = "polynomial"
params = [[-0.5, 0.0], [1.0, 0.0]]

[[problem.coefficients]]
kind = "cosine-series"
params = [1.0]
"""


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestParseConfig:
    def test_minimal_valid(self):
        cfg = parse_config(MINIMAL)
        assert cfg.job == "det"
        assert cfg.lam == 0j
        assert cfg.problem.boundary.d == 0.5
        assert cfg.problem.integ.rel_tol == 1e-10

    def test_odd_order_rejected(self):
        text = MINIMAL.replace("n = 2", "n = 3")
        with pytest.raises(ConfigError, match="even"):
            parse_config(text)

    def test_coefficient_count_must_match(self):
        text = MINIMAL.replace(
            '[[problem.coefficients]]\nkind = "zero"\n\n[[problem.coefficients]]',
            "[[problem.coefficients]]",
        )
        with pytest.raises(ConfigError, match="coefficients"):
            parse_config(text)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(MINIMAL + "\n[problem.extras]\nfoo = 1\n")

    def test_toml_syntax_errors_reported(self):
        with pytest.raises(ConfigError, match="TOML"):
            parse_config("problem = [unclosed")

    def test_missing_lambda_for_det(self):
        text = MINIMAL.replace('lambda = [0.0, 0.0]', "")
        with pytest.raises(ConfigError, match="lambda"):
            parse_config(text)

    def test_scalar_complex_accepted(self):
        text = MINIMAL.replace("lambda = [0.0, 0.0]", "lambda = 2.5")
        assert parse_config(text).lam == 2.5 + 0j

    def test_bad_job_kind(self):
        text = MINIMAL.replace('kind = "det"', 'kind = "dance"')
        with pytest.raises(ConfigError, match="job.kind"):
            parse_config(text)

    def test_symmetrize_flag_projects_coefficients(self):
        text = (
            SYMMETRIC_PROBLEM.format(d=0.5).replace(
                'params = [1.0]', 'params = [1.0]'
            )
            + "\n[job]\nkind = \"det\"\nlambda = 0.0\n"
        ).replace("[problem]", "[problem]\nsymmetrize = true")
        cfg = parse_config(text)
        from specdet import symmetry_residual

        assert max(symmetry_residual(cfg.problem.coefficients)) < 1e-12

    def test_general_boundary_parsed(self):
        text = """
[problem]
n = 2

[problem.boundary]
kind = "general"
a = [[1.0, 0.0], [0.0, 0.0]]
b = [[0.0, 0.0], [1.0, 0.0]]

[[problem.coefficients]]
kind = "zero"

[[problem.coefficients]]
kind = "zero"

[job]
kind = "det"
lambda = 0.0
"""
        cfg = parse_config(text)
        assert cfg.problem.boundary.kind == "general"

    def test_round_trip_documented_configs(self):
        """Parsing, serializing, and re-validating preserves every field."""
        for name in sorted(os.listdir(CONFIG_DIR)):
            with open(os.path.join(CONFIG_DIR, name), encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
            again = config_from_dict(cfg.to_dict())
            assert again.to_dict() == cfg.to_dict(), name


class TestEmitCsv:
    def test_two_by_two_grid_writes_five_lines(self, tmp_path, symmetric2):
        from specdet import Rectangle, scan_grid
        from conftest import degenerate

        grid = scan_grid(degenerate(symmetric2, 0.5), Rectangle(-1, 1, -1, 1), 2, 2)
        path = str(tmp_path / "grid.csv")
        emit_csv(grid, path)
        raw = open(path, "rb").read()
        lines = raw.decode("utf-8").split("\n")
        assert lines[0] == CSV_HEADER
        assert len([ln for ln in lines if ln]) == 5
        assert b"\r" not in raw

    def test_empty_grid_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_csv([], str(tmp_path / "x.csv"))


class TestRunCommand:
    def test_det_constant_three(self, tmp_path, capsys):
        text = """
[problem]
n = 2

[problem.boundary]
kind = "degenerate"
d = 2.0

[[problem.coefficients]]
kind = "zero"

[[problem.coefficients]]
kind = "zero"

[job]
kind = "det"
lambda = [5.0, 7.0]
"""
        rc = run_command(["det", _write(tmp_path, "c.toml", text)])
        out = capsys.readouterr().out
        assert rc == 0
        re_delta = float(out.split("re_delta  =")[1].splitlines()[0])
        im_delta = float(out.split("im_delta  =")[1].splitlines()[0])
        assert abs(complex(re_delta, im_delta) - 3.0) <= 1e-7 * 3.0
        assert "est_error" in out

    def test_scan_deterministic_and_constant(self, tmp_path, capsys):
        text = SYMMETRIC_PROBLEM.format(d=0.5) + """
[job]
kind = "scan"
rect = [-100.0, 100.0, -20.0, 20.0]
nx = 5
ny = 5
output = "OUT"
"""
        out1 = str(tmp_path / "a.csv")
        out2 = str(tmp_path / "b.csv")
        cfg1 = _write(tmp_path, "s1.toml", text.replace("OUT", out1.replace("\\", "/")))
        cfg2 = _write(tmp_path, "s2.toml", text.replace("OUT", out2.replace("\\", "/")))
        assert run_command(["scan", cfg1]) == 0
        assert run_command(["scan", cfg2]) == 0
        b1, b2 = open(out1, "rb").read(), open(out2, "rb").read()
        assert b1 == b2
        rows = [ln.split(",") for ln in b1.decode().strip().split("\n")[1:]]
        abs_delta = np.array([float(r[4]) for r in rows])
        expect = 0.75 * math.exp(-0.125)
        assert np.max(np.abs(abs_delta - expect)) <= 1e-7
        capsys.readouterr()

    def test_scan_line_brackets_dirichlet(self, tmp_path, capsys):
        text = """
[problem]
n = 2

[problem.boundary]
kind = "general"
a = [[1.0, 0.0], [0.0, 0.0]]
b = [[0.0, 0.0], [1.0, 0.0]]

[[problem.coefficients]]
kind = "zero"

[[problem.coefficients]]
kind = "zero"

[job]
kind = "scan"
rect = [-45.0, -5.0, -1.0, 1.0]
nx = 101
ny = 1
output = "OUT"
"""
        out = str(tmp_path / "line.csv")
        cfg = _write(tmp_path, "line.toml", text.replace("OUT", out.replace("\\", "/")))
        assert run_command(["scan", cfg]) == 0
        capsys.readouterr()
        rows = [ln.split(",") for ln in open(out).read().strip().split("\n")[1:]]
        res = np.array([float(r[0]) for r in rows])
        red = np.array([float(r[2]) for r in rows])
        flips = np.nonzero(np.diff(np.sign(red)))[0]
        brackets = [(res[i], res[i + 1]) for i in flips]
        assert any(a <= -math.pi**2 <= b for a, b in brackets)
        assert any(a <= -4 * math.pi**2 <= b for a, b in brackets)

    def test_count_empty_spectrum(self, tmp_path, capsys):
        text = SYMMETRIC_PROBLEM.format(d=0.5) + """
[job]
kind = "count"
rect = [-200.0, 200.0, -50.0, 50.0]
panels = 16
"""
        rc = run_command(["count", _write(tmp_path, "c.toml", text)])
        out = capsys.readouterr().out
        assert rc == 0
        assert "winding          = 0" in out

    def test_count_unit_coupling_exits_two(self, tmp_path, capsys):
        text = SYMMETRIC_PROBLEM.format(d=1.0) + """
[job]
kind = "count"
rect = [-10.0, 10.0, -1.0, 1.0]
"""
        rc = run_command(["count", _write(tmp_path, "c.toml", text)])
        err = capsys.readouterr().err
        assert rc == 2
        assert "whole complex plane" in err

    def test_verify_symmetry_prints_residuals(self, tmp_path, capsys):
        text = SYMMETRIC_PROBLEM.format(d=0.5) + """
[job]
kind = "verify-symmetry"
"""
        rc = run_command(["verify-symmetry", _write(tmp_path, "v.toml", text)])
        out = capsys.readouterr().out
        assert rc == 0
        assert "m=1 residual=" in out and "m=2 residual=" in out

    def test_verify_symmetry_tol_failure(self, tmp_path, capsys):
        text = """
[problem]
n = 2

[problem.boundary]
kind = "degenerate"
d = 0.5

[[problem.coefficients]]
kind = "polynomial"
params = [1.0]

[[problem.coefficients]]
kind = "zero"

[job]
kind = "verify-symmetry"
tol = 1e-9
"""
        rc = run_command(["verify-symmetry", _write(tmp_path, "v.toml", text)])
        capsys.readouterr()
        assert rc == 2

    def test_missing_config_exits_one(self, capsys):
        rc = run_command(["det", "/nonexistent/path.toml"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_job_subcommand_mismatch_exits_one(self, tmp_path, capsys):
        rc = run_command(["count", _write(tmp_path, "c.toml", MINIMAL)])
        assert rc == 1
        capsys.readouterr()

    def test_reproduce_paper_passes(self, capsys):
        rc = run_command(["reproduce-paper", "--n", "2", "--d", "0.5"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "[FAIL]" not in out
        assert out.count("[PASS]") == 6

    def test_reproduce_paper_rejects_unit_coupling(self, capsys):
        rc = run_command(["reproduce-paper", "--d", "1.0"])
        assert rc == 1
        assert "away from" in capsys.readouterr().err

    def test_reproduce_paper_flags_broken_symmetry(self, tmp_path, capsys):
        """A non-symmetric problem from --config fails checks and exits 2."""
        text = """
[problem]
n = 2

[problem.boundary]
kind = "degenerate"
d = 0.5

[[problem.coefficients]]
kind = "polynomial"
params = [[-0.5, 0.0], [1.0, 0.0]]

[[problem.coefficients]]
kind = "polynomial"
params = [[0.0, 0.0], [1.0, 0.0]]

[job]
kind = "reproduce-paper"
"""
        rc = run_command(
            ["reproduce-paper", "--config", _write(tmp_path, "r.toml", text)]
        )
        out = capsys.readouterr().out
        assert rc == 2
        assert "[FAIL]" in out
