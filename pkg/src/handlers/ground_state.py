"""
Ground-state handlers.

Subcommands:
- sp     - best constant S_p of the isotropic embedding
- solve  - Nehari minimiser and mountain-pass saddle of the model problem
"""
from pathlib import Path

from config import RunConfig
from energy import J_value
from solve import ground_state_sp, mountain_pass_path, nehari_minimize
from src.handlers.base import Outcome, add_subcommand, logger
from src.services.csv_export import write_key_values, write_radial_field
from verify import SADDLE_LEVEL, saddle_level_check

SP_ANCHORS = ("S_p = inf (int |grad v|^2 + a int v^2) / (int |v|^p)^{2/p}",)
SOLVE_ANCHORS = (
    "c = (1/2-1/p) (inf quotient_A)^{p/(p-2)}",
    SADDLE_LEVEL,
)
# |level - J(t* u)| relative bound for the ray-maximum algebra
LEVEL_IDENTITY_TOL = 1e-8


def run_sp(cfg: RunConfig, out_dir: Path) -> Outcome:
    params, grid = cfg.problem(), cfg.radial_grid()
    report = ground_state_sp(params, grid, cfg.solver_opts())
    precision = cfg.output.precision
    artifacts = [
        write_radial_field(out_dir / "sp_minimizer.csv", report.minimizer, precision),
        write_key_values(out_dir / "sp_summary.csv", {**report.summary(), "p": params.p}, precision),
    ]
    logger.info("sp_done", S_p=report.value, iterations=report.iterations)
    summary = {"S_p": report.value, "iterations": report.iterations,
               "gradient_norm": report.final_gradient_norm, "stagnated": report.stagnated}
    return Outcome(ok=True, summary=summary, artifacts=artifacts)


def run_solve(cfg: RunConfig, out_dir: Path) -> Outcome:
    params, pot, grid, opts = cfg.problem(), cfg.potentials(), cfg.radial_grid(), cfg.solver_opts()
    nehari = nehari_minimize(params, pot, grid, opts)
    path = mountain_pass_path(params, pot, grid, opts)

    J_critical = J_value(params, pot, nehari.critical_point)
    identity_error = abs(J_critical - nehari.level) / max(abs(nehari.level), 1e-300)
    saddle = saddle_level_check(nehari, path)

    precision = cfg.output.precision
    summary = {
        "regime": params.regime,
        "nehari_value": nehari.value,
        "nehari_level": nehari.level,
        "J_at_critical_point": J_critical,
        "level_identity_error": identity_error,
        "t_star": nehari.t_star,
        "mountain_pass_level": path.level,
        "path_max_index": path.path_max_index,
        "saddle_relative_error": abs(path.level - nehari.level) / abs(nehari.level),
        "saddle_check_passed": saddle.passed,
    }
    artifacts = [
        write_radial_field(out_dir / "nehari_ground_state.csv", nehari.critical_point, precision),
        write_radial_field(out_dir / "mountain_pass_saddle.csv", path.minimizer, precision),
        write_key_values(out_dir / "solve_summary.csv", summary, precision),
    ]
    ok = saddle.passed and identity_error <= LEVEL_IDENTITY_TOL
    return Outcome(ok=ok, summary=summary, artifacts=artifacts)


def register(subparsers, parents):
    add_subcommand(subparsers, "sp", run_sp, "compute S_p by preconditioned quotient descent",
                   SP_ANCHORS, parents)
    add_subcommand(subparsers, "solve", run_solve,
                   "Nehari minimiser and mountain-pass saddle of the model problem",
                   SOLVE_ANCHORS, parents)
