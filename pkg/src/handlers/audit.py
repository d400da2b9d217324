"""
Audit handlers.

Subcommands:
- verify           - the full check suite
- transform-check  - change-of-variables audits only
"""
from pathlib import Path

from config import RunConfig
from geometry import (
    ball_indicator_field,
    dipole_field,
    gaussian_field,
    power_bump_field,
    weighted_gaussian_field,
)
from src.handlers.base import Outcome, add_subcommand, logger
from src.services.csv_export import write_check_report
from verify import (
    EMBEDDING,
    ENERGY_TRANSPORT,
    GRADIENT,
    HARDY,
    LIMIT_LEVEL,
    MEASURE,
    QUADRATIC_FORM,
    SCALING_LAW,
    THETA_INVARIANCE,
    TRANSFORMED_LAPLACIAN,
    WEAK_EQUIVALENCE,
    lemma21_check,
    measure_check,
    run_suite,
    sample_shell,
)

VERIFY_ANCHORS = (HARDY, QUADRATIC_FORM, TRANSFORMED_LAPLACIAN, MEASURE, THETA_INVARIANCE,
                  SCALING_LAW, WEAK_EQUIVALENCE, LIMIT_LEVEL, ENERGY_TRANSPORT, EMBEDDING, GRADIENT)
TRANSFORM_ANCHORS = (TRANSFORMED_LAPLACIAN, MEASURE)


def _outcome(records, path: Path, precision: int) -> Outcome:
    failed = [r.name for r in records if not r.passed]
    for name in failed:
        logger.warning("check_failed_summary", check=name)
    summary = {"checks": len(records), "passed": len(records) - len(failed),
               "failed": ",".join(failed) or "none"}
    artifact = write_check_report(path, records, precision)
    return Outcome(ok=not failed, summary=summary, artifacts=[artifact])


def run_verify(cfg: RunConfig, out_dir: Path) -> Outcome:
    g = cfg.grid
    records = run_suite(cfg.problem(), cfg.potentials(), cfg.radial_grid(), cfg.solver_opts(),
                        tensor_n=g.tensor_n, tensor_L=g.tensor_L,
                        scaling_n=g.scaling_n, scaling_L=g.scaling_L)
    return _outcome(records, out_dir / "verify_report.csv", cfg.output.precision)


def run_transform_check(cfg: RunConfig, out_dir: Path) -> Outcome:
    params = cfg.problem()
    samples = sample_shell(params.N, 20, seed=cfg.solver.seed)
    records = [lemma21_check(params, v, samples)
               for v in (gaussian_field(), weighted_gaussian_field(), dipole_field())]
    records += [
        measure_check(params, gaussian_field()),
        measure_check(params, power_bump_field(2.0, 0.5, 1.5)),
        measure_check(params, ball_indicator_field(1.0), tol=1e-2),
    ]
    return _outcome(records, out_dir / "transform_report.csv", cfg.output.precision)


def register(subparsers, parents):
    add_subcommand(subparsers, "verify", run_verify, "run every audit check", VERIFY_ANCHORS, parents)
    add_subcommand(subparsers, "transform-check", run_transform_check,
                   "change-of-variables audits", TRANSFORM_ANCHORS, parents)
