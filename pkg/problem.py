"""
Problem parameters, potentials and their transformed counterparts.

Usage:
    from problem import validate_params, model_potentials, v_star

    params = validate_params(N=3, a=1.0, b=1.0, s=0.5, mu=1.0)
    pot = model_potentials(params)
    v_star(params, pot, 1.0)   # 11/16
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

import numpy as np

from errors import DomainError, ParamError
from src.services.logger import get_logger

logger = get_logger("problem")

RadialEvaluator = Callable[[np.ndarray], np.ndarray]

# Constraint labels used in error anchors and CLI messages
ADMISSIBLE_B = "b<2, b!=0, 0<s/b<1"
EXPONENT_RULE = "p=2(N-2s/b)/(N-2)"
POSITIVE_LIMITS = "lim |x|^b V = a > 0, lim |x|^s K = mu > 0"


@dataclass(frozen=True)
class ProblemParams:
    """Validated physical parameters plus the constants derived from them."""
    N: int
    a: float
    b: float
    s: float
    mu: float
    p: float
    C_b: float
    kappa: float

    @property
    def beta(self) -> float:
        """1 - b/2; (1 + kappa) == beta**2."""
        return 1.0 - self.b / 2.0

    @property
    def critical_sobolev(self) -> float:
        return 2.0 * self.N / (self.N - 2)

    @property
    def regime(self) -> str:
        return "vanishing" if self.b > 0 else "coercive"

    def as_dict(self) -> dict:
        return {
            "N": self.N, "a": self.a, "b": self.b, "s": self.s, "mu": self.mu,
            "p": self.p, "C_b": self.C_b, "kappa": self.kappa, "regime": self.regime,
        }


@dataclass(frozen=True)
class PotentialPair:
    """
    Radial evaluators r -> V(r), r -> K(r).

    ``limits`` holds the (a, mu) certificate a custom pair was declared with;
    it is only used for diagnostics.
    """
    V: RadialEvaluator
    K: RadialEvaluator
    kind: Literal["model", "custom"] = "model"
    limits: Optional[tuple] = field(default=None)


def validate_params(N: int, a: float, b: float, s: float, mu: float) -> ProblemParams:
    """Check admissibility and derive p, C_b and kappa."""
    if int(N) != N:
        raise ParamError(f"N must be an integer, got {N}", anchor="N>=3")
    N = int(N)
    if N < 3:
        raise ParamError(f"N={N} is below 3", anchor="N>=3")
    if b == 0:
        raise ParamError("b=0 is excluded", anchor=ADMISSIBLE_B)
    if b >= 2:
        raise ParamError(f"b={b} must be below 2", anchor=ADMISSIBLE_B)
    ratio = s / b
    if not (0.0 < ratio < 1.0):
        raise ParamError(f"s/b={ratio:g} is outside (0, 1)", anchor=ADMISSIBLE_B)
    if a <= 0 or mu <= 0:
        raise ParamError(f"a={a} and mu={mu} must both be positive", anchor=POSITIVE_LIMITS)

    p = 2.0 * (N - 2.0 * s / b) / (N - 2.0)
    C_b = (b / 4.0) * (1.0 - b / 4.0) * (N - 2) ** 2
    kappa = b * b / 4.0 - b

    # Implied by 0 < s/b < 1 in exact arithmetic
    if not (2.0 < p < 2.0 * N / (N - 2)):
        raise ParamError(f"derived p={p} is not strictly between 2 and 2N/(N-2)", anchor=EXPONENT_RULE)

    return ProblemParams(N=N, a=float(a), b=float(b), s=float(s), mu=float(mu),
                         p=p, C_b=C_b, kappa=kappa)


def model_potentials(params: ProblemParams) -> PotentialPair:
    """V(r) = a/(1+r)^b and K(r) = mu/(1+r)^s."""
    a, b, s, mu = params.a, params.b, params.s, params.mu

    def V(r):
        return a / np.power(1.0 + np.asarray(r, dtype=float), b)

    def K(r):
        return mu / np.power(1.0 + np.asarray(r, dtype=float), s)

    return PotentialPair(V=V, K=K, kind="model", limits=(a, mu))


def custom_potentials(
    params: ProblemParams,
    V: RadialEvaluator,
    K: RadialEvaluator,
    a_limit: float,
    mu_limit: float,
    check_radii: Optional[np.ndarray] = None,
) -> PotentialPair:
    """
    Wrap user-supplied radial profiles.

    Positivity is checked on ``check_radii``; the declared limits are compared
    with ``params`` and a mismatch is logged, never raised.
    """
    if check_radii is None:
        check_radii = np.concatenate([[0.0], np.logspace(-3, 3, 61)])
    v_vals = np.asarray(V(check_radii), dtype=float)
    k_vals = np.asarray(K(check_radii), dtype=float)
    if not (np.all(np.isfinite(v_vals)) and np.all(v_vals > 0)):
        raise ParamError("custom V must be positive and finite", anchor="V(x)>0")
    if not (np.all(np.isfinite(k_vals)) and np.all(k_vals > 0)):
        raise ParamError("custom K must be positive and finite", anchor="K(x)>0")
    if not (math.isclose(a_limit, params.a, rel_tol=1e-9) and math.isclose(mu_limit, params.mu, rel_tol=1e-9)):
        logger.warning("potential_limits_mismatch", declared_a=a_limit, declared_mu=mu_limit,
                       a=params.a, mu=params.mu)
    return PotentialPair(V=V, K=K, kind="custom", limits=(float(a_limit), float(mu_limit)))


def _as_radii(rho) -> np.ndarray:
    return np.asarray(rho, dtype=float)


def _unwrap(values: np.ndarray, like):
    return float(values) if np.ndim(like) == 0 else values


def v_star(params: ProblemParams, pot: PotentialPair, rho):
    """rho^{2b/(2-b)} V(rho^{2/(2-b)}) + C_b rho^{-2}; scalar or array input."""
    r = _as_radii(rho)
    if np.any(r <= 0):
        raise DomainError("V_* is undefined at the origin", anchor="rho>0")
    b = params.b
    vals = np.power(r, 2 * b / (2 - b)) * pot.V(np.power(r, 2 / (2 - b))) + params.C_b / (r * r)
    return _unwrap(vals, rho)


def k_star(params: ProblemParams, pot: PotentialPair, rho):
    """
    rho^{2s/(2-b)} K(rho^{2/(2-b)}).

    For 0<b<2 the value at rho=0 is the continuous extension 0; for b<0 the
    transformed weight is singular there and rho=0 is rejected.
    """
    r = _as_radii(rho)
    if np.any(r < 0):
        raise DomainError("K_* takes a radius, got a negative value", anchor="rho>=0")
    b, s = params.b, params.s
    at_origin = r == 0
    if np.any(at_origin) and b < 0:
        raise DomainError("K_* is singular at the origin when b<0", anchor="rho>0")
    safe = np.where(at_origin, 1.0, r)
    vals = np.power(safe, 2 * s / (2 - b)) * pot.K(np.power(safe, 2 / (2 - b)))
    vals = np.where(at_origin, 0.0, vals)
    return _unwrap(vals, rho)


def anisotropy_apply(kappa: float, y, g) -> np.ndarray:
    """A(y) g = g + kappa (y.g) y / |y|^2."""
    y = np.asarray(y, dtype=float)
    g = np.asarray(g, dtype=float)
    norm_sq = float(y @ y)
    if norm_sq == 0.0:
        raise DomainError("A(y) is undefined at y=0", anchor="|y|>0")
    return g + kappa * float(y @ g) / norm_sq * y


def b_theta_apply(kappa: float, theta, g) -> np.ndarray:
    """B(theta) g = g + kappa (theta.g) theta for a unit vector theta."""
    theta = np.asarray(theta, dtype=float)
    g = np.asarray(g, dtype=float)
    require_unit(theta)
    return g + kappa * float(theta @ g) * theta


def require_unit(theta: np.ndarray, tol: float = 1e-12) -> None:
    if abs(float(np.linalg.norm(theta)) - 1.0) > tol:
        raise DomainError(f"theta must be a unit vector, |theta|={np.linalg.norm(theta):.15g}", anchor="|theta|=1")
