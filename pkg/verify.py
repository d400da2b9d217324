"""
Audit checks.

Every check returns a ``CheckRecord``: what was measured, what it was
compared with, the tolerance and the verdict. ``anchor`` names the identity
or inequality being exercised so a failed report is self-explanatory.
Checks never raise on a failed comparison; they raise only when their
inputs are unusable.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from energy import (
    J_gradient,
    J_value,
    embedding_ratio,
    energy_E,
    grid_norm,
    h1_norm_sq,
    hardy_terms,
    norm_A_sq,
    norm_theta_sq,
    pairing,
    quotient_isotropic_tensor,
    quotient_theta,
    tensor_p_integral,
    transformed_coefficients,
    trial_fields,
)
from errors import BadPermutation, GridError, NotConverged
from geometry import (
    AnalyticField,
    TransformSpec,
    ball_indicator_field,
    bump_field,
    dipole_field,
    gaussian_field,
    inverse_map,
    jacobian_of_radius,
    lemma21_residual,
    power_bump_field,
    pull_field,
    pull_gradient,
    pull_radial,
    transport_grid,
    transported_weights,
    weighted_gaussian_field,
)
from grids import (
    RadialField,
    RadialGrid,
    TensorField,
    gradient_tensor,
    integrate_tensor,
    make_radial_grid,
    make_tensor_grid,
    radial_derivative,
    sample_tensor,
)
from problem import PotentialPair, ProblemParams
from solve import (
    QuotientReport,
    SolverOpts,
    ground_state_sp,
    mountain_pass_path,
    nehari_minimize,
)
from src.services.logger import get_check_logger

logger = get_check_logger()

SUITE_SEED = 0x5EED

HARDY = "int |x.grad v|^2/|x|^2 >= ((N-2)^2/4) int v^2/|x|^2"
HARDY_SHARPNESS = "Hardy constant (N-2)^2/4 is sharp"
QUADRATIC_FORM = "int A_ij d_i u d_j u = int |grad u|^2 + (b^2/4-b) int |x.grad u|^2/|x|^2"
TRANSFORMED_LAPLACIAN = "Laplacian of |x|^{-b(N-2)/4} v(|x|^{-b/2}x) = |y|^{-b(N+2)/(2(2-b))}(div(A grad v) - C_b v/|y|^2)"
MEASURE = "dx = (2/(2-b)) |y|^{bN/(2-b)} dy"
THETA_INVARIANCE = "||u||_theta quotient does not depend on theta"
SCALING_LAW = "S = (1-b/2)^{(p-2)/p} S_p"
STRETCH_IDENTITY = "stretching x_1 by (1-b/2) maps the isotropic quotient to the theta quotient"
WEAK_EQUIVALENCE = "weak solutions of the transformed and original equations correspond"
LIMIT_LEVEL = "J_theta(u) >= (1/2-1/p) mu^{-2/(p-2)} S^{p/(p-2)} on the limit Nehari set"
ENERGY_TRANSPORT = "Phi(u) = (2/(2-b)) J(v)"
EMBEDDING = "(int K|u|^p)^{1/p} <= C (||grad u||_2 + ||V^{1/2} u||_2)"
GRADIENT = "<J'(u),h> = (u,h)_A - int K_*(u+)^{p-1} h"
NORM_EQUIVALENCE = "||.||_A is equivalent to the H^1 norm"
SADDLE_LEVEL = "mountain-pass level equals the Nehari level"


@dataclass(frozen=True)
class CheckRecord:
    name: str
    anchor: str
    measured: float
    target: float
    tolerance: float
    passed: bool
    details: str = ""

    def row(self) -> Tuple:
        return (self.name, self.anchor, self.measured, self.target, self.tolerance, self.passed)


def _record(name: str, anchor: str, measured: float, target: float, tolerance: float,
            passed: bool, details: str = "") -> CheckRecord:
    record = CheckRecord(name=name, anchor=anchor, measured=float(measured), target=float(target),
                         tolerance=float(tolerance), passed=bool(passed), details=details)
    logger.verdict(name, record.passed, anchor=anchor, measured=record.measured, target=record.target,
                   tolerance=record.tolerance)
    return record


def _relative(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


# -- Hardy -------------------------------------------------------------------

def hardy_check(grid: RadialGrid, fields: Sequence[RadialField], slack: float = 1e-8) -> CheckRecord:
    """Worst relative margin (lhs - rhs)/lhs over the trial fields."""
    worst, worst_ratio = math.inf, math.inf
    for f in fields:
        lhs, rhs = hardy_terms(f)
        margin = 0.0 if lhs == 0.0 else (lhs - rhs) / lhs
        worst = min(worst, margin)
        if rhs > 0:
            worst_ratio = min(worst_ratio, lhs / rhs)
    if not fields:
        worst = 0.0
    return _record("hardy", HARDY, worst, 0.0, slack, worst >= -slack,
                   details=f"fields={len(fields)} min_ratio={worst_ratio:.6g}")


def near_extremal_field(N: int = 3, eps: float = 0.05, r_min: float = 1e-5, r_max: float = 100.0,
                        M: int = 20000) -> RadialField:
    """r^{-(N-2)/2+eps} sin(pi log(r/r_min)/log(r_max/r_min)) on a graded grid."""
    grid = make_radial_grid(N, r_min, r_max, M, "graded")
    r = grid.r
    phase = np.pi * np.log(r / r_min) / np.log(r_max / r_min)
    vals = np.power(r, -(N - 2) / 2.0 + eps) * np.sin(phase)
    vals[0] = vals[-1] = 0.0
    return RadialField(grid, vals)


def hardy_sharpness_check(N: int = 3, eps: float = 0.05, ceiling: float = 1.3) -> CheckRecord:
    lhs, rhs = hardy_terms(near_extremal_field(N, eps))
    ratio = lhs / rhs
    return _record("hardy_sharpness", HARDY_SHARPNESS, ratio, ceiling, 0.0, 1.0 < ratio < ceiling,
                   details=f"eps={eps:g}")


# -- tensor identities -------------------------------------------------------

def quadratic_form_identity_check(params: ProblemParams, u: TensorField, tol: float = 1e-12) -> CheckRecord:
    """A_ij double loop against the split |grad u|^2 + kappa |x.grad u|^2/|x|^2 form."""
    grads = [g.vals for g in gradient_tensor(u)]
    x = u.grid.coords
    r2 = sum(c * c for c in x)
    N = u.grid.N
    lhs = 0.0
    for i in range(N):
        for j in range(N):
            a_ij = (1.0 if i == j else 0.0) + params.kappa * x[i] * x[j] / r2
            lhs += integrate_tensor(a_ij * grads[i] * grads[j], u.grid)
    radial = sum(x[k] * grads[k] for k in range(N))
    rhs = (sum(integrate_tensor(g * g, u.grid) for g in grads)
           + params.kappa * integrate_tensor(radial * radial / r2, u.grid))
    diff = _relative(lhs, rhs)
    return _record("quadratic_form_identity", QUADRATIC_FORM, diff, 0.0, tol, diff <= tol,
                   details=f"lhs={lhs:.12g} rhs={rhs:.12g}")


@dataclass(frozen=True)
class SignedPermutation:
    """(G x)_i = signs[i] * x[axes[i]]."""
    axes: Tuple[int, ...]
    signs: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.axes)
        if sorted(self.axes) != list(range(n)):
            raise BadPermutation(f"axes {self.axes} are not a permutation of 0..{n - 1}")
        if len(self.signs) != n or any(s not in (1, -1) for s in self.signs):
            raise BadPermutation(f"signs {self.signs} must be {n} entries of +1/-1")

    def apply_field(self, u: TensorField) -> TensorField:
        """x -> u(G x) on the same lattice."""
        if len(self.axes) != u.grid.N:
            raise BadPermutation(f"permutation acts on {len(self.axes)} axes, field has {u.grid.N}")
        vals = np.transpose(u.vals, np.argsort(self.axes))
        for i, s in enumerate(self.signs):
            if s == -1:
                vals = np.flip(vals, axis=self.axes[i])
        return TensorField(u.grid, np.ascontiguousarray(vals))

    def apply_direction(self, theta) -> np.ndarray:
        """G^T theta, the direction that keeps theta.grad invariant."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for i, (axis, s) in enumerate(zip(self.axes, self.signs)):
            out[axis] = s * theta[i]
        return out


def theta_invariance_check(params: ProblemParams, u: TensorField, perm: SignedPermutation,
                           theta=(1.0, 0.0, 0.0), tol: float = 1e-12) -> CheckRecord:
    if u.grid.axis_scale != tuple([1.0] * u.grid.N):
        raise BadPermutation("lattice symmetries need an unstretched grid")
    moved = perm.apply_field(u)
    moved_theta = perm.apply_direction(theta)
    before = norm_theta_sq(params, u, theta).total_norm_sq
    after = norm_theta_sq(params, moved, moved_theta).total_norm_sq
    p_before = tensor_p_integral(u, params.p, positive_part=False)
    p_after = tensor_p_integral(moved, params.p, positive_part=False)
    diff = max(_relative(before, after), _relative(p_before, p_after))
    return _record("theta_invariance", THETA_INVARIANCE, diff, 0.0, tol, diff <= tol,
                   details=f"axes={perm.axes} signs={perm.signs} theta'={moved_theta.tolist()}")


def stretch_profile(params: ProblemParams, w: RadialField, stretch: float, n: int, L: float) -> TensorField:
    """u(x) = w(|(x_1/stretch, x_2, x_3)|) sampled on a fixed lattice."""
    grid = make_tensor_grid(params.N, L, n)

    def profile(x1, x2, x3):
        radius = np.sqrt((x1 / stretch) ** 2 + x2 ** 2 + x3 ** 2)
        return np.interp(radius, w.grid.r, w.vals, right=0.0)

    return sample_tensor(grid, profile)


def stretched_minimizer(params: ProblemParams, w: RadialField, n: int, L: float) -> TensorField:
    """The S_p profile stretched by 1-b/2 along x_1."""
    return stretch_profile(params, w, params.beta, n, L)


def scaling_law_check(params: ProblemParams, grid: RadialGrid, opts: SolverOpts, n: int = 128,
                      L: float = 10.0, order: int = 4, tol: float = 0.02,
                      sp_report: Optional[QuotientReport] = None) -> CheckRecord:
    """theta=(1,0,0) quotient of the stretched S_p minimiser against (1-b/2)^{(p-2)/p} S_p."""
    if params.N != 3:
        raise GridError(f"scaling law check runs on N=3 lattices, got N={params.N}")
    sp = sp_report or ground_state_sp(params, grid, opts)
    u = stretched_minimizer(params, sp.minimizer, n, L)
    measured = quotient_theta(params, u, (1.0, 0.0, 0.0), order=order)
    target = params.beta ** ((params.p - 2.0) / params.p) * sp.value
    err = _relative(measured, target)
    return _record("scaling_law", SCALING_LAW, measured, target, tol, err <= tol,
                   details=f"relative_error={err:.3g} n={n} L={L:g} order={order}")


def stretch_identity_check(params: ProblemParams, u: TensorField, order: int = 4,
                           tol: float = 1e-10) -> CheckRecord:
    """Same node values on a grid stretched along x_1: the quotient ratio is exactly (1-b/2)^{(p-2)/p}."""
    beta = params.beta
    stretched = TensorField(u.grid.stretched(0, beta), u.vals)
    ratio = quotient_theta(params, stretched, (1.0, 0.0, 0.0), order=order) / \
        quotient_isotropic_tensor(params, u, order=order)
    factor = beta ** ((params.p - 2.0) / params.p)
    err = abs(ratio / factor - 1.0)
    return _record("stretch_identity", STRETCH_IDENTITY, ratio, factor, tol, err <= tol)


# -- change of variables -----------------------------------------------------

def lemma21_check(params: ProblemParams, v: AnalyticField, samples: Sequence,
                  max_residual: float = 1e-4, slope_range: Tuple[float, float] = (1.8, 2.2)) -> CheckRecord:
    """Max residual at h = 1e-3|x| and the refinement slope between 1e-2|x| and 1e-3|x|."""
    spec = TransformSpec.from_params(params)
    coarse = max(lemma21_residual(spec, params, v, samples, rel_step=1e-2))
    fine = max(lemma21_residual(spec, params, v, samples, rel_step=1e-3))
    slope = math.log10(coarse / fine) if fine > 0 and coarse > 0 else float("nan")
    passed = fine < max_residual and slope_range[0] <= slope <= slope_range[1]
    return _record(f"transformed_laplacian[{v.name}]", TRANSFORMED_LAPLACIAN, fine, max_residual,
                   max_residual, passed, details=f"slope={slope:.4g} samples={len(samples)}")


def sample_shell(N: int, count: int, r_lo: float = 0.5, r_hi: float = 2.0, seed: int = SUITE_SEED) -> np.ndarray:
    """Random points with r_lo < |x| < r_hi."""
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((count, N))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.uniform(r_lo, r_hi, count)
    return directions * radii[:, None]


def measure_sides(params: ProblemParams, integrand: AnalyticField, extent: float = 8.0,
                  M: int = 20000) -> Tuple[float, float]:
    """(int f dx, int f(x(y)) jacobian dy) by two independent radial quadratures."""
    spec = TransformSpec.from_params(params)
    N = params.N
    e1 = np.zeros(N)
    e1[0] = 1.0

    x_grid = make_radial_grid(N, extent * 1e-7, extent, M, "graded")
    x_side = float(np.dot(x_grid.w, integrand.value(x_grid.r[:, None] * e1)))

    y_extent = extent ** spec.gamma
    y_grid = make_radial_grid(N, y_extent * 1e-7, y_extent, M, "graded")
    y_points = y_grid.r[:, None] * e1
    y_vals = integrand.value(inverse_map(spec, y_points)) * jacobian_of_radius(spec, y_grid.r)
    y_side = float(np.dot(y_grid.w, y_vals))
    return x_side, y_side


def measure_check(params: ProblemParams, integrand: AnalyticField, tol: float = 1e-5,
                  extent: float = 8.0, M: int = 20000) -> CheckRecord:
    x_side, y_side = measure_sides(params, integrand, extent, M)
    err = _relative(x_side, y_side)
    return _record(f"measure[{integrand.name}]", MEASURE, y_side, x_side, tol, err <= tol,
                   details=f"relative_error={err:.3g}")


# -- solutions across the transform -----------------------------------------

@dataclass(frozen=True)
class WeakResiduals:
    transformed: Tuple[float, ...]
    original: Tuple[float, ...]
    transported: Tuple[float, ...]
    bounds: Tuple[float, ...]
    factor: float


def _profile_on_axis(field_: AnalyticField, r: np.ndarray, N: int) -> Tuple[np.ndarray, np.ndarray]:
    pts = np.zeros((len(r), N))
    pts[:, 0] = r
    return field_.value(pts), field_.gradient(pts)[:, 0]


def weak_residuals(params: ProblemParams, pot: PotentialPair, v: RadialField,
                   test_profiles: Sequence[AnalyticField], gradient_tol: float = 1e-6) -> WeakResiduals:
    """
    Weak-form residuals of v (transformed equation) and of its pull-back u
    (original equation) against radial test profiles.

    ``original`` uses the image grid's own quadrature; ``transported`` uses
    the y-weights carried through the jacobian.
    """
    gnorm = grid_norm(J_gradient(params, pot, v), free_only=True)
    if gnorm > gradient_tol:
        raise NotConverged(f"gradient norm {gnorm:.3e} exceeds {gradient_tol:g}", anchor="J'(v)=0")

    spec = TransformSpec.from_params(params)
    p, N = params.p, params.N
    grid = v.grid
    coeffs = transformed_coefficients(params, pot, grid)
    rho = grid.r
    dv = radial_derivative(v).vals
    nonlinear_v = np.power(np.abs(v.vals), p - 2.0) * v.vals

    u = pull_radial(spec, v)
    x_grid = u.grid
    r = x_grid.r
    du = radial_derivative(u).vals
    du_chain = np.power(r, spec.alpha - 1.0) * (spec.alpha * v.vals + spec.gamma * rho * dv)
    V, K = pot.V(r), pot.K(r)
    nonlinear_u = np.power(np.abs(u.vals), p - 2.0) * u.vals
    w_t = transported_weights(spec, grid)
    h_sq = float(np.max(grid.h)) ** 2
    factor = 2.0 / (2.0 - params.b)

    transformed, original, transported, scales = [], [], [], []
    for psi in test_profiles:
        psi_v, psi_d = _profile_on_axis(psi, rho, N)
        terms = ((1.0 + params.kappa) * dv * psi_d, coeffs.potential * v.vals * psi_v,
                 -coeffs.weight * nonlinear_v * psi_v)
        transformed.append(float(np.dot(grid.w, sum(terms))))
        scales.append(float(sum(np.dot(grid.w, np.abs(t)) for t in terms)))

        x_pts = np.zeros((len(r), N))
        x_pts[:, 0] = r
        phi = pull_field(spec, psi, x_pts)
        dphi = pull_gradient(spec, psi, x_pts)[:, 0]
        original.append(float(np.dot(x_grid.w, du * dphi + V * u.vals * phi - K * nonlinear_u * phi)))
        transported.append(float(np.dot(w_t, du_chain * dphi + V * u.vals * phi - K * nonlinear_u * phi)))

    worst = max(abs(t) for t in transformed) if transformed else 0.0
    bounds = tuple(10.0 * factor * (worst + h_sq * s) for s in scales)
    return WeakResiduals(tuple(transformed), tuple(original), tuple(transported), bounds, factor)


def weak_equivalence_check(params: ProblemParams, pot: PotentialPair, v_solution: RadialField,
                           test_profiles: Sequence[AnalyticField], gradient_tol: float = 1e-6) -> CheckRecord:
    res = weak_residuals(params, pot, v_solution, test_profiles, gradient_tol)
    ratios = [abs(o) / b if b > 0 else (0.0 if o == 0 else math.inf) for o, b in zip(res.original, res.bounds)]
    audit = [abs(t - res.factor * y) / b if b > 0 else 0.0
             for t, y, b in zip(res.transported, res.transformed, res.bounds)]
    worst = max(ratios + audit) if ratios else 0.0
    return _record("weak_equivalence", WEAK_EQUIVALENCE, worst, 1.0, 0.0, worst <= 1.0,
                   details=f"max_original={max(map(abs, res.original), default=0):.3g} "
                           f"max_transformed={max(map(abs, res.transformed), default=0):.3g}")


def energy_transport_check(params: ProblemParams, pot: PotentialPair, v: RadialField,
                           tol: float = 1e-3) -> CheckRecord:
    """
    Phi of the pulled-back field against (2/(2-b)) J(v).

    u is evaluated on the image grid refined by uniform x-nodes. For b<0
    the transformed ground state blows up like a negative power of rho at
    the origin, so v must come from a grid that resolves it (graded).
    """
    spec = TransformSpec.from_params(params)
    u = pull_radial(spec, v, transport_grid(spec, v.grid))
    factor = 2.0 / (2.0 - params.b)
    original = energy_E(params, pot, u)
    transformed = norm_A_sq(params, pot, v)
    target = factor * J_value(params, pot, v)
    err = max(_relative(original.J_value, target),
              _relative(original.total_norm_sq, factor * transformed.total_norm_sq),
              _relative(original.nonlinear, factor * transformed.nonlinear))
    return _record("energy_transport", ENERGY_TRANSPORT, original.J_value, target, tol, err <= tol,
                   details=f"relative_error={err:.3g}")


def theta_limit_level(params: ProblemParams, w: RadialField, n: int = 128, L: float = 10.0,
                      order: int = 4, xatol: float = 1e-3) -> Tuple[float, float]:
    """
    Ground level of J_theta, theta=(1,0,0), minimised over stretches of a radial profile.

    Each trial resamples ``w`` along a stretched x_1 axis on the same lattice and
    evaluates the theta quotient there. Returns (level, best stretch).
    """
    if params.N != 3:
        raise GridError(f"theta limit level runs on N=3 lattices, got N={params.N}")
    theta = (1.0, 0.0, 0.0)
    result = minimize_scalar(
        lambda sigma: quotient_theta(params, stretch_profile(params, w, sigma, n, L), theta, order=order),
        bounds=(1.0 / (1.0 + 2.0 * abs(params.b)), 1.0 + abs(params.b)), method="bounded",
        options={"xatol": xatol},
    )
    p = params.p
    level = (0.5 - 1.0 / p) * params.mu ** (-2.0 / (p - 2.0)) * float(result.fun) ** (p / (p - 2.0))
    logger.debug("theta_limit_minimised", stretch=float(result.x), quotient=float(result.fun),
                 evaluations=int(result.nfev))
    return level, float(result.x)


def lemma43_check(params: ProblemParams, level: float, S: float, slack: float = 1e-2,
                  details: str = "") -> CheckRecord:
    p = params.p
    bound = (0.5 - 1.0 / p) * params.mu ** (-2.0 / (p - 2.0)) * S ** (p / (p - 2.0))
    return _record("limit_level_bound", LIMIT_LEVEL, level, bound, slack, level >= bound * (1.0 - slack),
                   details=details)


def embedding_check(params: ProblemParams, pot: PotentialPair, fields: Sequence[RadialField]) -> CheckRecord:
    """Largest embedding ratio over x-grid fields; finite and positive is the assertion."""
    ratios = [embedding_ratio(params, pot, u) for u in fields]
    worst = max(ratios) if ratios else float("nan")
    ok = bool(ratios) and all(math.isfinite(r) and r > 0 for r in ratios)
    return _record("embedding_constant", EMBEDDING, worst, float("inf"), 0.0, ok,
                   details=f"fields={len(ratios)} min={min(ratios, default=float('nan')):.6g}")


def norm_equivalence_check(params: ProblemParams, pot: PotentialPair, fields: Sequence[RadialField]) -> CheckRecord:
    ratios = [norm_A_sq(params, pot, u).total_norm_sq / h1_norm_sq(u) for u in fields]
    lo, hi = min(ratios), max(ratios)
    return _record("norm_equivalence", NORM_EQUIVALENCE, lo, 0.0, 0.0, lo > 0.0 and math.isfinite(hi),
                   details=f"C1={lo:.6g} C2={hi:.6g}")


def gradient_check(params: ProblemParams, pot: PotentialPair, fields: Sequence[RadialField],
                   directions: int = 5, eps: float = 1e-5, tol: float = 1e-5,
                   seed: int = SUITE_SEED) -> CheckRecord:
    """pairing(J_gradient, h) against central differences of J along seeded directions."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for u in fields:
        g = J_gradient(params, pot, u)
        envelope = np.exp(-u.grid.r / 5.0)
        for _ in range(directions):
            h = RadialField(u.grid, rng.standard_normal(u.grid.M) * envelope)
            exact = pairing(g, h)
            fd = (J_value(params, pot, RadialField(u.grid, u.vals + eps * h.vals))
                  - J_value(params, pot, RadialField(u.grid, u.vals - eps * h.vals))) / (2.0 * eps)
            worst = max(worst, abs(exact - fd) / (1.0 + abs(exact)))
    return _record("gradient_consistency", GRADIENT, worst, 0.0, tol, worst < tol,
                   details=f"fields={len(fields)} directions={directions}")


def saddle_level_check(nehari: QuotientReport, path: QuotientReport, tol: float = 1e-2) -> CheckRecord:
    err = _relative(path.level, nehari.level)
    return _record("saddle_level", SADDLE_LEVEL, path.level, nehari.level, tol, err <= tol,
                   details=f"relative_error={err:.3g} path_max_index={path.path_max_index}")


# -- suite -------------------------------------------------------------------

def weak_test_profiles() -> List[AnalyticField]:
    """Five smooth bumps covering 0.5 <= |y| <= 10."""
    edges = [(0.5, 1.5), (1.0, 3.0), (2.0, 5.0), (4.0, 8.0), (6.0, 10.0)]
    return [bump_field(lo, hi) for lo, hi in edges]


def random_tensor_field(n: int = 32, L: float = 4.0, seed: int = SUITE_SEED) -> TensorField:
    grid = make_tensor_grid(3, L, n)
    rng = np.random.default_rng(seed)
    return TensorField(grid, rng.standard_normal(grid.shape))


def run_suite(params: ProblemParams, pot: PotentialPair, grid: RadialGrid, opts: SolverOpts,
              tensor_n: int = 64, tensor_L: float = 8.0, scaling_n: int = 128,
              scaling_L: float = 10.0) -> List[CheckRecord]:
    """Every audit on the configured grids, in a fixed order."""
    records: List[CheckRecord] = []
    fields = trial_fields(grid)

    records.append(hardy_check(grid, fields))
    records.append(hardy_sharpness_check(params.N))
    records.append(norm_equivalence_check(params, pot, fields))
    records.append(gradient_check(params, pot, fields[:3]))

    samples = sample_shell(params.N, 20)
    for v in (gaussian_field(), weighted_gaussian_field(), dipole_field()):
        records.append(lemma21_check(params, v, samples))

    records.append(measure_check(params, gaussian_field()))
    records.append(measure_check(params, power_bump_field(2.0, 0.5, 1.5)))
    records.append(measure_check(params, ball_indicator_field(1.0), tol=1e-2))

    if params.N == 3:
        random_field = random_tensor_field()
        records.append(quadratic_form_identity_check(params, random_field))
        records.append(theta_invariance_check(params, random_field, SignedPermutation((1, 0, 2), (1, 1, 1))))
        records.append(theta_invariance_check(params, random_field, SignedPermutation((0, 1, 2), (-1, 1, 1)),
                                              theta=(1.0, 0.0, 0.0)))

    sp = ground_state_sp(params, grid, opts)
    if params.N == 3:
        records.append(scaling_law_check(params, grid, opts, n=scaling_n, L=scaling_L, sp_report=sp))
        smooth = stretched_minimizer(params, sp.minimizer, tensor_n, tensor_L)
        records.append(stretch_identity_check(params, smooth))

    nehari = nehari_minimize(params, pot, grid, opts)
    records.append(weak_equivalence_check(params, pot, nehari.critical_point, weak_test_profiles()))
    transport_field = nehari.critical_point
    if params.b < 0 and grid.spacing != "graded":
        graded = make_radial_grid(params.N, float(grid.r[0]), float(grid.r[-1]), grid.M, spacing="graded")
        transport_field = nehari_minimize(params, pot, graded, opts).critical_point
    records.append(energy_transport_check(params, pot, transport_field))

    records.append(embedding_check(params, pot, trial_fields(make_radial_grid(params.N, 1e-3, 40.0, 4000), count=20)))

    if params.N == 3:
        S = params.beta ** ((params.p - 2.0) / params.p) * sp.value
        level, stretch = theta_limit_level(params, sp.minimizer, n=scaling_n, L=scaling_L)
        records.append(lemma43_check(params, level, S,
                                     details=f"stretch={stretch:.4g} beta={params.beta:.4g} n={scaling_n}"))

    path = mountain_pass_path(params, pot, grid, opts)
    records.append(saddle_level_check(nehari, path))
    logger.info("suite_finished", checks=len(records), failed=sum(not r.passed for r in records))
    return records
