"""
Threshold handler.

Compares the best transformed quotient with (1-b/2)^{(p-2)/p} mu^{-2/p} S_p
and the mountain-pass level with the compactness threshold. Exit status is
non-zero when the sufficient condition fails or the two verdicts disagree.
"""
from pathlib import Path

import numpy as np

from config import RunConfig
from solve import threshold_check
from src.handlers.base import Outcome, add_subcommand, logger
from src.services.csv_export import write_key_values, write_rows

ANCHORS = (
    "inf ||u||_A^2 / (int K_* |u|^p)^{2/p} < (1-b/2)^{(p-2)/p} mu^{-2/p} S_p",
    "c < (1/2-1/p) mu^{-2/(p-2)} S^{p/(p-2)}",
    "annulus trials: Dirichlet quotient -> 0 as r -> infinity",
)
ANNULUS_HEADER = ("r", "quotient", "dirichlet_quotient", "potential_quotient", "certificate")


def run_threshold(cfg: RunConfig, out_dir: Path) -> Outcome:
    params, pot, grid = cfg.problem(), cfg.potentials(), cfg.radial_grid()
    report = threshold_check(params, pot, grid, cfg.solver_opts())

    dirichlet = [t.dirichlet_quotient for t in report.annulus]
    trend = bool(len(dirichlet) > 1 and np.all(np.diff(dirichlet) < 0))
    summary = {**report.summary(), "coherent": report.coherent, "annulus_trend_decreasing": trend}

    precision = cfg.output.precision
    rows = [(t.r, t.quotient, t.dirichlet_quotient, t.potential_quotient, t.certificate)
            for t in report.annulus]
    artifacts = [
        write_key_values(out_dir / "threshold_report.csv", summary, precision),
        write_rows(out_dir / "annulus_sweep.csv", ANNULUS_HEADER, rows, precision),
    ]
    if not report.coherent:
        logger.error("threshold_incoherent", lhs=report.lhs, rhs=report.rhs)
    summary["note"] = report.note
    return Outcome(ok=report.coherent and report.condition_18_holds, summary=summary, artifacts=artifacts)


def register(subparsers, parents):
    add_subcommand(subparsers, "threshold", run_threshold,
                   "existence criterion and compactness threshold report", ANCHORS, parents)
