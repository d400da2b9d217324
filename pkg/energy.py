"""
Norms, quotients and functionals on discrete fields.

Radial functionals are assembled from three ingredients bundled in
``RadialCoefficients``:

    stiffness * sum_e c_e (du_e)^2  +  sum_i w_i P_i u_i^2  and  sum_i w_i W_i |u_i|^p

where c_e, w_i come from the grid and (stiffness, P, W) select the problem:

    transformed   (1 + kappa, V_*, K_*)
    limit         (1, a, mu)
    isotropic     (1, a, 1)      used for S_p

Because the anisotropic form reduces to (1 + kappa) u'^2 for radial fields,
the same edge sum serves every case.
"""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import scipy.sparse as sp
from cachetools import LRUCache, cached
from cachetools.keys import hashkey

from errors import DomainError, NonFinite, ZeroDenominator
from grids import (
    RadialField,
    RadialGrid,
    TensorField,
    gradient_tensor,
    integrate_tensor,
)
from problem import PotentialPair, ProblemParams, k_star, require_unit, v_star

TRIAL_SEED = 0x5EED


@dataclass(frozen=True)
class EnergyBreakdown:
    dirichlet: float
    aniso: float
    potential: float
    nonlinear: float
    total_norm_sq: float
    J_value: float

    def as_dict(self) -> dict:
        return {
            "dirichlet": self.dirichlet, "aniso": self.aniso, "potential": self.potential,
            "nonlinear": self.nonlinear, "total_norm_sq": self.total_norm_sq, "J_value": self.J_value,
        }


@dataclass(frozen=True, eq=False)
class RadialCoefficients:
    stiffness: float
    potential: np.ndarray
    weight: np.ndarray
    label: str


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@cached(cache=LRUCache(maxsize=32), key=lambda params, pot, grid: hashkey(params, pot, grid.key))
def transformed_coefficients(params: ProblemParams, pot: PotentialPair, grid: RadialGrid) -> RadialCoefficients:
    return RadialCoefficients(
        stiffness=1.0 + params.kappa,
        potential=_frozen(v_star(params, pot, grid.r)),
        weight=_frozen(k_star(params, pot, grid.r)),
        label="transformed",
    )


def limit_coefficients(params: ProblemParams, grid: RadialGrid) -> RadialCoefficients:
    """Constant-coefficient problem reached at infinity: V_* -> a, K_* -> mu, kappa -> 0."""
    return RadialCoefficients(
        stiffness=1.0,
        potential=_frozen(np.full(grid.M, params.a)),
        weight=_frozen(np.full(grid.M, params.mu)),
        label="limit",
    )


def isotropic_coefficients(a: float, grid: RadialGrid) -> RadialCoefficients:
    return RadialCoefficients(
        stiffness=1.0,
        potential=_frozen(np.full(grid.M, a)),
        weight=_frozen(np.ones(grid.M)),
        label="isotropic",
    )


def original_coefficients(pot: PotentialPair, grid: RadialGrid) -> RadialCoefficients:
    """V and K of the untransformed equation sampled on an x-grid."""
    return RadialCoefficients(
        stiffness=1.0,
        potential=_frozen(pot.V(grid.r)),
        weight=_frozen(pot.K(grid.r)),
        label="original",
    )


@cached(cache=LRUCache(maxsize=16), key=lambda grid: grid.key)
def stiffness_matrix(grid: RadialGrid) -> sp.csc_matrix:
    """Tridiagonal S with u.S.u = sum_e c_e (u_{e+1} - u_e)^2."""
    c = grid.edge_weight
    diag = np.zeros(grid.M)
    diag[:-1] += c
    diag[1:] += c
    return sp.diags([-c, diag, -c], [-1, 0, 1], format="csc")


def gram_matrix(coeffs: RadialCoefficients, grid: RadialGrid) -> sp.csc_matrix:
    """Discrete Gram matrix of the quadratic part of the functional."""
    return (coeffs.stiffness * stiffness_matrix(grid) + sp.diags(grid.w * coeffs.potential)).tocsc()


# -- radial evaluation -------------------------------------------------------

def _require_finite(vals: np.ndarray) -> None:
    if not np.all(np.isfinite(vals)):
        raise NonFinite("field contains NaN or Inf")


def dirichlet_energy(u: RadialField) -> float:
    """omega int u'^2 r^{N-1} dr via edge differences."""
    _require_finite(u.vals)
    du = np.diff(u.vals)
    return float(np.dot(u.grid.edge_weight, du * du))


def _power(vals: np.ndarray, p: float, positive_part: bool) -> np.ndarray:
    base = np.maximum(vals, 0.0) if positive_part else np.abs(vals)
    return np.power(base, p)


def coefficient_breakdown(coeffs: RadialCoefficients, u: RadialField, p: float) -> EnergyBreakdown:
    D = dirichlet_energy(u)
    w = u.grid.w
    potential = float(np.dot(w * coeffs.potential, u.vals * u.vals))
    nonlinear = float(np.dot(w * coeffs.weight, _power(u.vals, p, True)))
    aniso = (coeffs.stiffness - 1.0) * D
    total = D + aniso + potential
    return EnergyBreakdown(
        dirichlet=D, aniso=aniso, potential=potential, nonlinear=nonlinear,
        total_norm_sq=total, J_value=0.5 * total - nonlinear / p,
    )


def norm_A_sq(params: ProblemParams, pot: PotentialPair, u: RadialField) -> EnergyBreakdown:
    return coefficient_breakdown(transformed_coefficients(params, pot, u.grid), u, params.p)


def coefficient_p_integral(coeffs: RadialCoefficients, u: RadialField, p: float, positive_part: bool = True) -> float:
    _require_finite(u.vals)
    return float(np.dot(u.grid.w * coeffs.weight, _power(u.vals, p, positive_part)))


def weighted_p_integral(
    params: ProblemParams,
    pot: PotentialPair,
    u: RadialField,
    use_kstar: bool = True,
    positive_part: bool = True,
) -> float:
    """int W (u+)^p with W = K_* (or mu when ``use_kstar`` is off); |u|^p when ``positive_part`` is off."""
    if use_kstar:
        coeffs = transformed_coefficients(params, pot, u.grid)
    else:
        coeffs = limit_coefficients(params, u.grid)
    return coefficient_p_integral(coeffs, u, params.p, positive_part)


def J_value(params: ProblemParams, pot: PotentialPair, u: RadialField) -> float:
    return norm_A_sq(params, pot, u).J_value


def coefficient_gradient(coeffs: RadialCoefficients, u: RadialField, p: float) -> np.ndarray:
    """Riesz representative W^{-1} dJ of the discrete functional."""
    _require_finite(u.vals)
    grid = u.grid
    Su = stiffness_matrix(grid) @ u.vals
    dJ = coeffs.stiffness * Su + grid.w * coeffs.potential * u.vals \
        - grid.w * coeffs.weight * np.power(np.maximum(u.vals, 0.0), p - 1.0)
    return dJ / grid.w


def J_gradient(params: ProblemParams, pot: PotentialPair, u: RadialField) -> RadialField:
    coeffs = transformed_coefficients(params, pot, u.grid)
    return RadialField(u.grid, coefficient_gradient(coeffs, u, params.p))


def pairing(g: RadialField, h: RadialField) -> float:
    """Grid-weighted L2 pairing sum w_i g_i h_i."""
    return float(np.dot(g.grid.w, g.vals * h.vals))


def grid_norm(g: RadialField, free_only: bool = False) -> float:
    """sqrt(pairing(g, g)); ``free_only`` drops the pinned outer node."""
    vals, w = g.vals, g.grid.w
    if free_only:
        vals, w = vals[:-1], w[:-1]
    return float(np.sqrt(np.dot(w, vals * vals)))


def coefficient_quotient(coeffs: RadialCoefficients, u: RadialField, p: float) -> float:
    norm_sq = coefficient_breakdown(coeffs, u, p).total_norm_sq
    denom = coefficient_p_integral(coeffs, u, p, positive_part=False)
    if denom <= 0.0:
        raise ZeroDenominator("p-integral of the field vanishes", anchor="u!=0 on supp K")
    return norm_sq / denom ** (2.0 / p)


def quotient_A(params: ProblemParams, pot: PotentialPair, u: RadialField) -> float:
    """||u||_A^2 / (int K_* |u|^p)^{2/p}."""
    return coefficient_quotient(transformed_coefficients(params, pot, u.grid), u, params.p)


def quotient_p(params: ProblemParams, u: RadialField) -> float:
    """(int |grad u|^2 + a int u^2) / (int |u|^p)^{2/p}."""
    return coefficient_quotient(isotropic_coefficients(params.a, u.grid), u, params.p)


def ray_max(norm_sq: float, p_integral: float, p: float) -> Tuple[float, float]:
    """Maximiser and maximum of t -> t^2 A/2 - t^p B/p over t >= 0."""
    if norm_sq <= 0 or p_integral <= 0:
        raise DomainError(f"ray maximum needs positive inputs, got A={norm_sq}, B={p_integral}", anchor="A>0, B>0")
    if p <= 2:
        raise DomainError(f"ray maximum needs p>2, got p={p}", anchor="p>2")
    t_star = (norm_sq / p_integral) ** (1.0 / (p - 2.0))
    level = (0.5 - 1.0 / p) * (norm_sq / p_integral ** (2.0 / p)) ** (p / (p - 2.0))
    return t_star, level


def hardy_terms(u: RadialField) -> Tuple[float, float]:
    """(omega int u'^2 r^{N-1}, ((N-2)^2/4) omega int u^2 r^{N-3})."""
    grid = u.grid
    lhs = dirichlet_energy(u)
    rhs = 0.25 * (grid.N - 2) ** 2 * float(np.dot(grid.w, u.vals * u.vals / (grid.r * grid.r)))
    return lhs, rhs


def h1_norm_sq(u: RadialField) -> float:
    return dirichlet_energy(u) + float(np.dot(u.grid.w, u.vals * u.vals))


# -- original coordinates ----------------------------------------------------

def energy_E(params: ProblemParams, pot: PotentialPair, u_x: RadialField) -> EnergyBreakdown:
    """Breakdown of the untransformed functional; the nonlinear term uses |u|^p."""
    coeffs = original_coefficients(pot, u_x.grid)
    D = dirichlet_energy(u_x)
    potential = float(np.dot(u_x.grid.w * coeffs.potential, u_x.vals * u_x.vals))
    nonlinear = coefficient_p_integral(coeffs, u_x, params.p, positive_part=False)
    total = D + potential
    return EnergyBreakdown(
        dirichlet=D, aniso=0.0, potential=potential, nonlinear=nonlinear,
        total_norm_sq=total, J_value=0.5 * total - nonlinear / params.p,
    )


def phi_value(params: ProblemParams, pot: PotentialPair, u_x: RadialField) -> float:
    """1/2 (int |grad u|^2 + V u^2) - 1/p int K |u|^p on an x-grid."""
    return energy_E(params, pot, u_x).J_value


def embedding_ratio(params: ProblemParams, pot: PotentialPair, u_x: RadialField) -> float:
    """(int K |u|^p)^{1/p} / (||grad u||_2 + ||sqrt(V) u||_2)."""
    parts = energy_E(params, pot, u_x)
    denom = np.sqrt(parts.dirichlet) + np.sqrt(parts.potential)
    if denom <= 0.0:
        raise ZeroDenominator("energy norm of the field vanishes")
    return float(parts.nonlinear ** (1.0 / params.p) / denom)


# -- tensor evaluation -------------------------------------------------------

def tensor_breakdown(u: TensorField, kappa: float, a: float, mu: float, p: float, theta,
                     order: int = 2) -> EnergyBreakdown:
    """int |grad u|^2 + kappa int (theta.grad u)^2 + a int u^2, and mu int (u+)^p."""
    theta = np.asarray(theta, dtype=float)
    require_unit(theta)
    if not u.is_finite():
        raise NonFinite("tensor field contains NaN or Inf")
    grads = gradient_tensor(u, order=order)
    grid = u.grid
    D = sum(integrate_tensor(g.vals * g.vals, grid) for g in grads)
    directional = sum(t * g.vals for t, g in zip(theta, grads))
    aniso = kappa * integrate_tensor(directional * directional, grid)
    potential = a * integrate_tensor(u.vals * u.vals, grid)
    nonlinear = mu * tensor_p_integral(u, p)
    total = D + aniso + potential
    return EnergyBreakdown(
        dirichlet=D, aniso=aniso, potential=potential, nonlinear=nonlinear,
        total_norm_sq=total, J_value=0.5 * total - nonlinear / p,
    )


def norm_theta_sq(params: ProblemParams, u: TensorField, theta, order: int = 2) -> EnergyBreakdown:
    """||u||_theta^2 = int |grad u|^2 + kappa int (theta.grad u)^2 + a int u^2."""
    return tensor_breakdown(u, params.kappa, params.a, params.mu, params.p, theta, order=order)


def tensor_p_integral(u: TensorField, p: float, positive_part: bool = True) -> float:
    """int (u+)^p (or |u|^p) without any weight."""
    return integrate_tensor(_power(u.vals, p, positive_part), u.grid)


def J_theta_value(params: ProblemParams, u: TensorField, theta, order: int = 2) -> float:
    return norm_theta_sq(params, u, theta, order=order).J_value


def _tensor_quotient(parts: EnergyBreakdown, u: TensorField, p: float) -> float:
    denom = tensor_p_integral(u, p, positive_part=False)
    if denom <= 0.0:
        raise ZeroDenominator("p-integral of the tensor field vanishes")
    return parts.total_norm_sq / denom ** (2.0 / p)


def quotient_theta(params: ProblemParams, u: TensorField, theta, order: int = 2) -> float:
    """||u||_theta^2 / (int |u|^p)^{2/p}."""
    return _tensor_quotient(norm_theta_sq(params, u, theta, order=order), u, params.p)


def quotient_isotropic_tensor(params: ProblemParams, u: TensorField, order: int = 2) -> float:
    """(int |grad u|^2 + a int u^2) / (int |u|^p)^{2/p} on a tensor grid."""
    parts = tensor_breakdown(u, 0.0, params.a, params.mu, params.p, (1.0, 0.0, 0.0), order=order)
    return _tensor_quotient(parts, u, params.p)


# -- trial fields ------------------------------------------------------------

def trial_fields(grid: RadialGrid, count: int = 50, seed: int = TRIAL_SEED) -> List[RadialField]:
    """
    Deterministic test fields vanishing at r_max: Gaussians of several widths,
    smooth annulus bumps and random piecewise-linear profiles.
    """
    rng = np.random.default_rng(seed)
    r = grid.r
    reach = min(grid.r_max, 20.0)
    n_gauss = count // 5
    n_bump = (count - n_gauss) // 2
    n_linear = count - n_gauss - n_bump
    fields = []

    for sigma in np.geomspace(0.3, reach / 6.0, n_gauss):
        vals = np.exp(-(r / sigma) ** 2)
        vals[-1] = 0.0
        fields.append(RadialField(grid, vals))

    for _ in range(n_bump):
        lo = rng.uniform(0.05, 0.6) * reach
        hi = lo + rng.uniform(0.1, 0.4) * reach
        q = (r - lo) * (hi - r)
        inside = q > 0
        vals = np.where(inside, np.exp(-1.0 / np.where(inside, q, 1.0) + 4.0 / (hi - lo) ** 2), 0.0)
        fields.append(RadialField(grid, vals))

    for _ in range(n_linear):
        knots = np.sort(rng.uniform(grid.r_min, reach, 8))
        knots = np.concatenate([[grid.r_min], knots, [reach]])
        heights = np.concatenate([[0.0], rng.uniform(-1.0, 1.0, 8), [0.0]])
        fields.append(RadialField(grid, np.interp(r, knots, heights, right=0.0)))

    return fields

