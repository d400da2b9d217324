"""
Quotient minimisers, the path-based saddle search and the threshold report.

All three solvers work on the radial discretisation described in
``energy``: a tridiagonal Gram matrix K, node weights, and a weight array W
in the p-integral. The outermost node is pinned to zero.

Usage:
    from solve import SolverOpts, ground_state_sp, nehari_minimize

    sp = ground_state_sp(params, grid, SolverOpts())
    gs = nehari_minimize(params, pot, grid, SolverOpts())
    gs.level, gs.critical_point
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.sparse.linalg import factorized

from energy import (
    RadialCoefficients,
    coefficient_breakdown,
    coefficient_p_integral,
    gram_matrix,
    isotropic_coefficients,
    limit_coefficients,
    quotient_A,
    transformed_coefficients,
)
from errors import BadEndpoint, GridError, NoConvergence, ZeroDenominator
from grids import RadialField, RadialGrid
from problem import PotentialPair, ProblemParams
from src.services.logger import get_solver_logger
from stats import SolverStats

logger = get_solver_logger()

ANNULUS_RADII = (10.0, 20.0, 40.0)
# one outbound leg plus four return legs need at least this many segments
MIN_PATH_NODES = 8
ASYMMETRY_NOTE = (
    "lhs is an upper bound on the infimum over all fields: a true condition verdict is "
    "conclusive, a false one is not"
)


@dataclass(frozen=True)
class SolverOpts:
    max_iters: int = 5000
    tol: float = 1e-8
    path_nodes: int = 40
    path_tol: float = 1e-6
    seed: int = 0x5EED
    armijo: float = 1e-4
    min_step: float = 2.0 ** -30
    stall_rtol: float = 1e-12
    stall_window: int = 10
    # accepted objective increase, relative; absorbs roundoff near the minimum
    roundoff_slack: float = 1e-13
    perturbation: float = 0.0
    log_every: int = 100


@dataclass(frozen=True)
class QuotientReport:
    value: float
    minimizer: RadialField
    iterations: int
    final_gradient_norm: float
    grid_meta: dict
    solver: str = "quotient"
    t_star: float = 1.0
    level: float = float("nan")
    converged: bool = True
    stagnated: bool = False
    history: Tuple[float, ...] = ()
    gradient_history: Tuple[float, ...] = ()
    path_max_index: Optional[int] = None
    elapsed: str = ""

    @property
    def critical_point(self) -> RadialField:
        """t_star * minimizer, a critical point of the functional."""
        return self.minimizer.scaled(self.t_star)

    def summary(self) -> dict:
        return {
            "solver": self.solver, "value": self.value, "level": self.level, "t_star": self.t_star,
            "iterations": self.iterations, "final_gradient_norm": self.final_gradient_norm,
            "converged": self.converged, "stagnated": self.stagnated,
        }


@dataclass(frozen=True)
class AnnulusTrial:
    r: float
    quotient: float
    dirichlet_quotient: float
    potential_quotient: float
    certificate: bool


@dataclass(frozen=True)
class ThresholdReport:
    lhs: float
    S_p: float
    S: float
    rhs: float
    ps_threshold: float
    mp_level: float
    condition_18_holds: bool
    level_below_threshold: bool
    regime: str
    lhs_source: str
    annulus: Tuple[AnnulusTrial, ...] = ()
    nehari_value: Optional[float] = None
    nehari_level: Optional[float] = None
    remark_certificate: bool = False
    degraded: bool = False
    note: str = ASYMMETRY_NOTE

    @property
    def coherent(self) -> bool:
        return (not self.condition_18_holds) or self.level_below_threshold

    def summary(self) -> dict:
        return {
            "lhs": self.lhs, "S_p": self.S_p, "S": self.S, "rhs": self.rhs,
            "ps_threshold": self.ps_threshold, "mp_level": self.mp_level,
            "nehari_value": self.nehari_value, "nehari_level": self.nehari_level,
            "condition_18_holds": self.condition_18_holds,
            "level_below_threshold": self.level_below_threshold,
            "remark_certificate": self.remark_certificate,
            "degraded": self.degraded, "regime": self.regime, "lhs_source": self.lhs_source,
        }


# -- shared pieces -----------------------------------------------------------

def _check_grid(params: ProblemParams, grid: RadialGrid):
    if grid.N != params.N:
        raise GridError(f"grid dimension {grid.N} does not match N={params.N}")


def initial_guess(grid: RadialGrid, opts: SolverOpts) -> np.ndarray:
    """exp(-r^2/2), optionally perturbed with a seeded multiplicative noise."""
    vals = np.exp(-0.5 * grid.r * grid.r)
    if opts.perturbation > 0:
        rng = np.random.default_rng(opts.seed)
        vals = vals * (1.0 + opts.perturbation * rng.uniform(-1.0, 1.0, grid.M))
    vals = np.maximum(vals, 0.0)
    vals[-1] = 0.0
    return vals


class _Operator:
    """Gram matrix, its factorised free block and the weighted p-integral for one problem."""

    def __init__(self, coeffs: RadialCoefficients, grid: RadialGrid, p: float):
        self.grid = grid
        self.p = p
        self.K = gram_matrix(coeffs, grid)
        self._solve_free = factorized(self.K[:-1, :-1].tocsc())
        self.wW = grid.w * coeffs.weight

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rhs)
        out[:-1] = self._solve_free(rhs[:-1])
        return out

    def p_integral(self, u: np.ndarray) -> float:
        return float(np.dot(self.wW, np.power(np.abs(u), self.p)))

    def energy(self, u: np.ndarray) -> float:
        return 0.5 * float(u @ (self.K @ u)) - float(np.dot(self.wW, np.power(np.maximum(u, 0.0), self.p))) / self.p

    def euclidean_gradient(self, u: np.ndarray) -> np.ndarray:
        g = self.K @ u - self.wW * np.power(np.maximum(u, 0.0), self.p - 1.0)
        g[-1] = 0.0
        return g

    def riesz_norm(self, euclidean: np.ndarray) -> float:
        """L2 norm of W^{-1} g over the free nodes."""
        free = euclidean[:-1]
        return float(np.sqrt(np.dot(free, free / self.grid.w[:-1])))


def _normalise(op: _Operator, u: np.ndarray) -> np.ndarray:
    B = op.p_integral(u)
    if B <= 0.0:
        raise ZeroDenominator("field has zero weighted p-integral", anchor="u!=0 on supp K")
    return u / B ** (1.0 / op.p)


def _minimize_quotient(
    coeffs: RadialCoefficients,
    grid: RadialGrid,
    p: float,
    opts: SolverOpts,
    label: str,
    initial: Optional[np.ndarray] = None,
) -> QuotientReport:
    """
    Minimise u.K.u / (sum w W |u|^p)^{2/p} over nonnegative fields.

    Each step moves along d = u - (A/B) K^{-1} f(u), the K-preconditioned
    gradient, with Armijo backtracking; iterates are clamped at zero and
    renormalised to unit p-integral.
    """
    log = logger.bind(solver=label)
    op = _Operator(coeffs, grid, p)
    u = np.array(initial_guess(grid, opts) if initial is None else initial, dtype=float)
    u = np.maximum(u, 0.0)
    u[-1] = 0.0
    u = _normalise(op, u)

    stats = SolverStats(label, stall_rtol=opts.stall_rtol, stall_window=opts.stall_window)
    log.info("solver_start", M=grid.M, p=p, max_iters=opts.max_iters, tol=opts.tol)

    Ku = op.K @ u
    A = float(u @ Ku)
    Q = A
    grad_norm = float("inf")
    converged = stagnated = False

    stop_reason = "max_iters"
    for it in range(opts.max_iters + 1):
        f = op.wW * np.power(u, p - 1.0)
        residual = Ku - A * f
        residual[-1] = 0.0
        t_star = A ** (1.0 / (p - 2.0))
        grad_norm = t_star * op.riesz_norm(residual)
        if it > 0:
            stats.record(Q, grad_norm)
        if grad_norm <= opts.tol:
            converged = True
            break
        if stats.stalled():
            stagnated, stop_reason = True, "stalled"
            break
        if it == opts.max_iters:
            break

        d = op.solve(residual)
        slope = 2.0 * float(residual @ d)
        tau, accepted = 1.0, False
        while tau >= opts.min_step:
            trial = np.maximum(u - tau * d, 0.0)
            trial[-1] = 0.0
            B_trial = op.p_integral(trial)
            if B_trial > 0.0:
                trial = trial / B_trial ** (1.0 / p)
                K_trial = op.K @ trial
                Q_trial = float(trial @ K_trial)
                if Q_trial <= Q - opts.armijo * tau * slope + opts.roundoff_slack * abs(Q):
                    accepted = True
                    break
            tau *= 0.5
            stats.backtracks += 1
        if not accepted:
            stats.rejected_steps += 1
            stagnated, stop_reason = True, "line_search"
            break

        u, Ku, A, Q = trial, K_trial, Q_trial, Q_trial
        log.progress("solver_progress", it + 1, every=opts.log_every, value=Q,
                     gradient_norm=grad_norm, step=tau)

    minimizer = RadialField(grid, u)
    t_star, level = A ** (1.0 / (p - 2.0)), (0.5 - 1.0 / p) * A ** (p / (p - 2.0))
    report = QuotientReport(
        value=Q,
        minimizer=minimizer,
        iterations=stats.iterations,
        final_gradient_norm=grad_norm,
        grid_meta=grid.meta(),
        solver=label,
        t_star=t_star,
        level=level,
        converged=converged,
        stagnated=stagnated,
        history=tuple(stats.objective),
        gradient_history=tuple(stats.gradient_norms),
        elapsed=stats.elapsed_text(),
    )
    if not converged:
        log.error("solver_failed", iterations=stats.iterations, value=Q, gradient_norm=grad_norm,
                  reason=stop_reason)
        raise NoConvergence(
            f"{label}: stopped ({stop_reason}) after {stats.iterations} iterations, "
            f"gradient norm {grad_norm:.3e} above {opts.tol:g}",
            partial=report,
        )
    log.info("solver_converged", iterations=stats.iterations, value=Q, energy_level=level,
             gradient_norm=grad_norm, elapsed=report.elapsed)
    return report


# -- public solvers ----------------------------------------------------------

def ground_state_sp(params: ProblemParams, grid: RadialGrid, opts: SolverOpts) -> QuotientReport:
    """S_p = inf (int |grad v|^2 + a int v^2) / (int |v|^p)^{2/p} over radial fields."""
    _check_grid(params, grid)
    return _minimize_quotient(isotropic_coefficients(params.a, grid), grid, params.p, opts, "sp")


def nehari_minimize(
    params: ProblemParams,
    pot: PotentialPair,
    grid: RadialGrid,
    opts: SolverOpts,
    limit: bool = False,
    initial: Optional[RadialField] = None,
) -> QuotientReport:
    """
    Minimise quotient_A; ``report.level`` is the ray-maximum level and
    ``report.critical_point`` the rescaled minimiser.

    With ``limit`` the coefficients are replaced by their values at
    infinity (V_* -> a, K_* -> mu, kappa -> 0).
    """
    _check_grid(params, grid)
    if limit:
        coeffs, label = limit_coefficients(params, grid), "nehari_limit"
    else:
        coeffs, label = transformed_coefficients(params, pot, grid), "nehari"
    start = None if initial is None else initial.vals
    return _minimize_quotient(coeffs, grid, params.p, opts, label, initial=start)


def _ray_max(op: _Operator, u: np.ndarray) -> np.ndarray:
    """u rescaled to the maximum of t -> J(t u); (t^{p-2} = |u|_K^2 / int W u+^p)."""
    A = float(u @ (op.K @ u))
    B = float(np.dot(op.wW, np.power(np.maximum(u, 0.0), op.p)))
    if A <= 0.0 or B <= 0.0:
        raise ZeroDenominator("field has no positive part on supp K", anchor="u+!=0")
    return (A / B) ** (1.0 / (op.p - 2.0)) * u


def _bridge_scale(op: _Operator, start: np.ndarray, end: np.ndarray, samples: int = 65) -> float:
    """R >= 1 with J(R w) < 0 for every w on the segment [start, end]."""
    needed = 1.0
    for s in np.linspace(0.0, 1.0, samples):
        w = (1.0 - s) * start + s * end
        A = float(w @ (op.K @ w))
        B = float(np.dot(op.wW, np.power(np.maximum(w, 0.0), op.p)))
        if B <= 0.0:
            raise BadEndpoint("segment to the endpoint leaves the positive cone", anchor="J(e)<0")
        needed = max(needed, (op.p * A / (2.0 * B)) ** (1.0 / (op.p - 2.0)))
    return 2.0 * needed


def _assemble_path(op: _Operator, m: np.ndarray, e: np.ndarray, P: int) -> np.ndarray:
    """
    P+1 nodes from 0 to e through m.

    The outbound leg is the ray segment [0, m]. The return leg runs
    m -> 2m -> 2Rm -> Re -> e, where J is negative from 2m on.
    """
    k = P // 2
    pieces = [np.linspace(0.0, 1.0, k + 1)[:, None] * m[None, :]]
    R = _bridge_scale(op, 2.0 * m, e)
    anchors = [m, 2.0 * m, 2.0 * R * m, R * e, e]
    sizes = [len(chunk) for chunk in np.array_split(np.arange(P - k), len(anchors) - 1)]
    for start, end, size in zip(anchors, anchors[1:], sizes):
        s = np.arange(1, size + 1) / size
        pieces.append(start[None, :] + s[:, None] * (end - start)[None, :])
    return np.concatenate(pieces)


def mountain_pass_path(
    params: ProblemParams,
    pot: PotentialPair,
    grid: RadialGrid,
    opts: SolverOpts,
    endpoint: Optional[RadialField] = None,
    limit: bool = False,
) -> QuotientReport:
    """
    Deform the path from 0 to a negative-energy endpoint until its highest
    point is a critical point.

    The path is kept in the form 0 -> m -> e with m the maximum of J on
    its own ray, so m is the highest node. Each iteration moves m along
    -K^{-1} J'(m), puts it back on its ray maximum and accepts the step
    under an Armijo test on J. Stationarity is the dual norm
    sqrt(J'(m) . K^{-1} J'(m)).

    The default endpoint is 2 t* g for the normalised initial guess g.
    """
    _check_grid(params, grid)
    p = params.p
    coeffs = limit_coefficients(params, grid) if limit else transformed_coefficients(params, pot, grid)
    label = "mountain_pass"
    log = logger.bind(solver=label)
    op = _Operator(coeffs, grid, p)

    if endpoint is None:
        g = _normalise(op, initial_guess(grid, opts))
        t_star = float(g @ (op.K @ g)) ** (1.0 / (p - 2.0))
        e = 2.0 * t_star * g
    else:
        e = np.array(endpoint.vals, dtype=float)
        e[-1] = 0.0
    end_energy = op.energy(e)
    if end_energy >= 0.0:
        raise BadEndpoint(f"endpoint energy {end_energy:.6g} is not negative", anchor="J(e)<0")

    P = max(int(opts.path_nodes), MIN_PATH_NODES)
    # highest point of the straight segment [0, e]
    m = _ray_max(op, np.maximum(e, 0.0))
    level = op.energy(m)
    stats = SolverStats(label, stall_rtol=opts.stall_rtol, stall_window=opts.stall_window)
    log.info("solver_start", M=grid.M, p=p, path_nodes=P, max_iters=opts.max_iters, tol=opts.path_tol)

    converged = stagnated = False
    stop_reason = "max_iters"
    dual = float("inf")
    for it in range(1, opts.max_iters + 1):
        grad = op.euclidean_gradient(m)
        d = op.solve(grad)
        dual = math.sqrt(max(float(grad @ d), 0.0))
        stats.record(level, dual)
        if dual < opts.path_tol:
            converged = True
            break
        if stats.stalled():
            stagnated, stop_reason = True, "stalled"
            break

        tau, accepted = 1.0, False
        while tau >= opts.min_step:
            trial = np.maximum(m - tau * d, 0.0)
            trial[-1] = 0.0
            if op.p_integral(trial) > 0.0:
                trial = _ray_max(op, trial)
                trial_energy = op.energy(trial)
                if trial_energy <= level - opts.armijo * tau * dual * dual + opts.roundoff_slack * abs(level):
                    accepted = True
                    break
            tau *= 0.5
            stats.backtracks += 1
        if not accepted:
            stats.rejected_steps += 1
            stagnated, stop_reason = True, "line_search"
            break
        m, level = trial, trial_energy
        log.progress("solver_progress", it, every=opts.log_every, energy_level=level, dual_norm=dual, step=tau)

    nodes = _assemble_path(op, m, e, P)
    energies = np.array([op.energy(n) for n in nodes])
    k = int(np.argmax(energies))
    norm_sq = float(m @ (op.K @ m))
    value = norm_sq / op.p_integral(m) ** (2.0 / p)
    report = QuotientReport(
        value=value,
        minimizer=RadialField(grid, m),
        iterations=stats.iterations,
        final_gradient_norm=dual,
        grid_meta=grid.meta(),
        solver=label,
        t_star=1.0,
        level=float(energies[k]),
        converged=converged,
        stagnated=stagnated,
        history=tuple(stats.objective),
        gradient_history=tuple(stats.gradient_norms),
        path_max_index=k,
        elapsed=stats.elapsed_text(),
    )
    if not converged:
        log.error("solver_failed", iterations=stats.iterations, energy_level=report.level, dual_norm=dual,
                  reason=stop_reason)
        raise NoConvergence(
            f"{label}: stopped ({stop_reason}) after {stats.iterations} iterations, "
            f"dual norm {dual:.3e} above {opts.path_tol:g}",
            partial=report,
        )
    log.info("solver_converged", iterations=stats.iterations, energy_level=report.level,
             dual_norm=dual, path_max_index=k, elapsed=report.elapsed)
    return report


# -- threshold ---------------------------------------------------------------

def smoothstep(s: np.ndarray) -> np.ndarray:
    s = np.clip(s, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def annulus_bump(grid: RadialGrid, r: float) -> RadialField:
    """1 on [5r/8, 7r/8], cubic ramps to 0 at r/2 and r."""
    if r > grid.r_max * (1.0 + 1e-12):
        raise GridError(f"annulus radius {r:g} exceeds r_max={grid.r_max:g}")
    rho = grid.r
    width = r / 8.0
    rising = smoothstep((rho - 0.5 * r) / width)
    falling = smoothstep((r - rho) / width)
    return RadialField(grid, np.minimum(rising, falling))


def annulus_trial(params: ProblemParams, pot: PotentialPair, grid: RadialGrid, r: float, rhs: float) -> AnnulusTrial:
    u = annulus_bump(grid, r)
    coeffs = transformed_coefficients(params, pot, grid)
    parts = coefficient_breakdown(coeffs, u, params.p)
    denom = coefficient_p_integral(coeffs, u, params.p, positive_part=False) ** (2.0 / params.p)
    eps_d = parts.dirichlet / denom
    eps_v = parts.potential / denom
    return AnnulusTrial(
        r=float(r),
        quotient=quotient_A(params, pot, u),
        dirichlet_quotient=eps_d,
        potential_quotient=eps_v,
        certificate=bool((2.0 + abs(params.kappa)) * max(eps_d, eps_v) < rhs),
    )


def threshold_constants(params: ProblemParams, S_p: float) -> Tuple[float, float, float]:
    """(S, rhs, ps_threshold) derived from S_p."""
    p, mu = params.p, params.mu
    S = params.beta ** ((p - 2.0) / p) * S_p
    rhs = mu ** (-2.0 / p) * S
    ps_threshold = (0.5 - 1.0 / p) * mu ** (-2.0 / (p - 2.0)) * S ** (p / (p - 2.0))
    return S, rhs, ps_threshold


def threshold_check(
    params: ProblemParams,
    pot: PotentialPair,
    grid: RadialGrid,
    opts: SolverOpts,
    radii: Sequence[float] = ANNULUS_RADII,
    sp_report: Optional[QuotientReport] = None,
) -> ThresholdReport:
    """Compare the best transformed quotient with the compactness threshold."""
    _check_grid(params, grid)
    p = params.p
    if sp_report is None:
        sp_report = ground_state_sp(params, grid, opts)
    S_p = sp_report.value
    S, rhs, ps_threshold = threshold_constants(params, S_p)

    trials = []
    for r in radii:
        if r > grid.r_max * (1.0 + 1e-12):
            logger.warning("annulus_skipped", r=r, r_max=grid.r_max)
            continue
        trials.append(annulus_trial(params, pot, grid, r, rhs))

    nehari = None
    degraded = False
    try:
        nehari = nehari_minimize(params, pot, grid, opts)
    except (NoConvergence, ZeroDenominator) as exc:
        degraded = True
        logger.warning("threshold_degraded", reason=str(exc))

    candidates = [(t.quotient, f"annulus(r={t.r:g})") for t in trials]
    if nehari is not None:
        candidates.append((nehari.value, "nehari"))
    if not candidates:
        raise GridError("no trial fields fit on the grid and the Nehari solve failed")
    lhs, source = min(candidates, key=lambda c: c[0])

    mp_level = (0.5 - 1.0 / p) * lhs ** (p / (p - 2.0))
    report = ThresholdReport(
        lhs=lhs,
        S_p=S_p,
        S=S,
        rhs=rhs,
        ps_threshold=ps_threshold,
        mp_level=mp_level,
        condition_18_holds=bool(lhs < rhs),
        level_below_threshold=bool(mp_level < ps_threshold),
        regime=params.regime,
        lhs_source=source,
        annulus=tuple(trials),
        nehari_value=None if nehari is None else nehari.value,
        nehari_level=None if nehari is None else nehari.level,
        remark_certificate=any(t.certificate for t in trials),
        degraded=degraded,
    )
    logger.info("threshold_report", **report.summary())
    return report
