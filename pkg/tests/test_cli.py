"""
Tests for main.py - argument parsing, dispatch and exit codes.
"""
import io
import json

import pytest

FAST_GRID = ["--grid-M", "1000", "--rmax", "20"]


def _run(argv):
    from main import run
    out = io.StringIO()
    code = run(argv, stdout=out)
    return code, out.getvalue()


def _summary(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


class TestParser:
    """Tests for build_parser and usage errors."""

    def test_help_exits_zero(self, capsys):
        code, _ = _run(["--help"])
        assert code == 0
        assert "transform-check" in capsys.readouterr().out

    def test_subcommand_help_lists_identities(self, capsys):
        code, _ = _run(["threshold", "--help"])
        assert code == 0
        assert "identities:" in capsys.readouterr().out

    def test_missing_subcommand(self):
        assert _run([])[0] == 2

    def test_unknown_flag(self, capsys):
        code, _ = _run(["sp", "--frobnicate"])
        assert code == 2
        assert "--frobnicate" in capsys.readouterr().err

    @pytest.mark.parametrize("seed", ["-1", "0x1" + "0" * 16, "abc"])
    def test_bad_seed(self, seed):
        assert _run(["sp", "--seed", seed])[0] == 2

    def test_seed_type(self):
        from main import _seed
        assert _seed("0x5EED") == 0x5EED
        assert _seed("42") == 42


class TestConfigErrors:
    """Config and parameter problems exit with 2."""

    def test_zero_b(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("[params]\nb = 0\ns = 0.1\n", encoding="utf-8")
        code, out = _run(["sp", "--config", str(cfg), "--out", str(tmp_path / "out")])
        assert code == 2
        assert out == ""
        assert "b<2, b!=0" in capsys.readouterr().err

    def test_missing_config(self, tmp_path):
        assert _run(["sp", "--config", str(tmp_path / "none.cfg")])[0] == 2

    def test_bad_grid(self, tmp_path, capsys):
        code, _ = _run(["sp", "--grid-M", "4", "--out", str(tmp_path)])
        assert code == 2
        assert "grid.M" in capsys.readouterr().err


class TestSubcommands:
    """End-to-end subcommand runs on a coarse grid."""

    @pytest.mark.slow
    def test_sp(self, tmp_path):
        out_dir = tmp_path / "out"
        code, out = _run(["sp", "--out", str(out_dir)] + FAST_GRID)
        assert code == 0
        summary = _summary(out)
        assert 8.0 < float(summary["S_p"]) < 9.5
        assert "sp finished in" in out
        assert (out_dir / "sp_minimizer.csv").is_file()
        assert (out_dir / "sp_summary.csv").is_file()
        assert (out_dir / "runs.json").is_file()

    def test_transform_check(self, tmp_path):
        out_dir = tmp_path / "out"
        code, out = _run(["transform-check", "--out", str(out_dir)])
        assert code == 0
        summary = _summary(out)
        assert summary["checks"] == "6"
        assert summary["failed"] == "none"
        assert (out_dir / "transform_report.csv").read_text(encoding="utf-8").startswith(
            "name,anchor,measured,target,tolerance,passed\n")

    @pytest.mark.slow
    def test_threshold(self, tmp_path):
        code, out = _run(["threshold", "--out", str(tmp_path)])
        summary = _summary(out)
        assert summary["coherent"] == "true"
        assert code == (0 if summary["condition_18_holds"] == "true" else 1)
        assert (tmp_path / "annulus_sweep.csv").is_file()

    @pytest.mark.slow
    def test_solve(self, tmp_path):
        code, out = _run(["solve", "--out", str(tmp_path)] + FAST_GRID)
        summary = _summary(out)
        assert code == 0
        assert float(summary["level_identity_error"]) <= 1e-8
        assert summary["saddle_check_passed"] == "true"

    @pytest.mark.slow
    def test_sp_with_info_logging(self, tmp_path, capsys):
        """INFO logging on: solver events reach stderr as JSON and the run still succeeds."""
        code, _ = _run(["sp", "--log-level", "INFO", "--out", str(tmp_path)] + FAST_GRID)
        assert code == 0
        events = [json.loads(line) for line in capsys.readouterr().err.splitlines() if line.startswith("{")]
        converged = [e for e in events if e["message"] == "solver_converged"]
        assert converged
        assert converged[0]["level"] == "INFO"
        assert converged[0]["energy_level"] > 0.0

    @pytest.mark.slow
    @pytest.mark.integration
    def test_verify(self, tmp_path):
        code, out = _run(["verify", "--out", str(tmp_path)])
        summary = _summary(out)
        assert summary["failed"] == "none"
        assert code == 0
        report = (tmp_path / "verify_report.csv").read_text(encoding="utf-8")
        assert "limit_level_bound" in report
        assert "energy_transport" in report

    def test_budget_exhausted_exits_one(self, tmp_path, capsys):
        cfg = tmp_path / "short.cfg"
        cfg.write_text("[solver]\nmax_iters = 2\n", encoding="utf-8")
        code, _ = _run(["sp", "--config", str(cfg), "--out", str(tmp_path)] + FAST_GRID)
        assert code == 1
        assert "iterations" in capsys.readouterr().err


class TestDeterminism:
    """Same config, same bytes."""

    @pytest.mark.slow
    def test_sp_artifacts_identical(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        assert _run(["sp", "--out", str(first)] + FAST_GRID)[0] == 0
        assert _run(["sp", "--out", str(second)] + FAST_GRID)[0] == 0
        for name in ("sp_minimizer.csv", "sp_summary.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_transform_report_identical(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        _run(["transform-check", "--out", str(first), "--seed", "7"])
        _run(["transform-check", "--out", str(second), "--seed", "7"])
        name = "transform_report.csv"
        assert (first / name).read_bytes() == (second / name).read_bytes()

    @pytest.mark.slow
    @pytest.mark.integration
    def test_verify_report_identical(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        _run(["verify", "--out", str(first)])
        _run(["verify", "--out", str(second)])
        name = "verify_report.csv"
        assert (first / name).read_bytes() == (second / name).read_bytes()


class TestLedger:
    """Every completed run leaves a ledger entry."""

    def test_entry_written(self, tmp_path):
        from database import open_ledger, runs_for
        _run(["transform-check", "--out", str(tmp_path)])
        db = open_ledger(tmp_path)
        try:
            runs = runs_for(db, "transform-check")
        finally:
            db.close()
        assert len(runs) == 1
        assert runs[0]["exit_code"] == 0
        assert runs[0]["seed"] == 0x5EED
