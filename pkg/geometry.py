"""
Change of variables y = |x|^{-b/2} x and the field transform
u(x) = |x|^{-b(N-2)/4} v(y).

All maps work on R^N minus the origin and accept either one N-vector or a
batch shaped (..., N). ``AnalyticField`` carries exact derivatives so the
transformed Laplacian can be checked pointwise against finite differences.
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from errors import DomainError, ParamError, StepError
from grids import RadialField, RadialGrid, radial_grid_from_nodes
from problem import ADMISSIBLE_B, ProblemParams

MAX_RELATIVE_STEP = 0.5


@dataclass(frozen=True)
class TransformSpec:
    b: float
    N: int

    def __post_init__(self):
        if self.b >= 2 or self.b == 0:
            raise ParamError(f"transform needs b<2 and b!=0, got b={self.b}", anchor=ADMISSIBLE_B)

    @classmethod
    def from_params(cls, params: ProblemParams) -> "TransformSpec":
        return cls(b=params.b, N=params.N)

    @property
    def gamma(self) -> float:
        """|y| = |x|^gamma."""
        return 1.0 - self.b / 2.0

    @property
    def alpha(self) -> float:
        """Power of |x| in front of v."""
        return -self.b * (self.N - 2) / 4.0

    @property
    def inverse_exponent(self) -> float:
        return self.b / (2.0 - self.b)


@dataclass(frozen=True)
class AnalyticField:
    """
    A scalar field with exact first and second derivatives.

    value: (..., N) -> (...); gradient: (..., N) -> (..., N);
    hessian: (..., N) -> (..., N, N).
    """
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    name: str = "field"


def _norms(points: np.ndarray, what: str) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    norms = np.linalg.norm(points, axis=-1)
    if np.any(norms == 0.0):
        raise DomainError(f"{what} is undefined at the origin", anchor="|x|>0")
    return norms


# -- field factories ---------------------------------------------------------

def radial_field(f, df, d2f, name: str) -> AnalyticField:
    """AnalyticField v(y) = f(|y|) from a profile and its first two derivatives."""

    def radius(y):
        return np.linalg.norm(np.asarray(y, dtype=float), axis=-1)

    def unit(y):
        y = np.asarray(y, dtype=float)
        rho = radius(y)[..., None]
        return y / np.where(rho == 0.0, 1.0, rho)

    def value(y):
        return f(radius(y))

    def gradient(y):
        return df(radius(y))[..., None] * unit(y)

    def hessian(y):
        y = np.asarray(y, dtype=float)
        rho = radius(y)
        e = unit(y)
        outer = e[..., :, None] * e[..., None, :]
        eye = np.eye(y.shape[-1])
        tangential = df(rho) / np.where(rho == 0.0, 1.0, rho)
        return d2f(rho)[..., None, None] * outer + tangential[..., None, None] * (eye - outer)

    return AnalyticField(value=value, gradient=gradient, hessian=hessian, name=name)


def constant_field(c: float = 1.0) -> AnalyticField:
    zero = lambda rho: np.zeros_like(np.asarray(rho, dtype=float))
    return radial_field(lambda rho: np.full_like(np.asarray(rho, dtype=float), c), zero, zero,
                        name=f"constant({c:g})")


def gaussian_field(c: float = 1.0) -> AnalyticField:
    """exp(-c|y|^2)."""

    def f(rho):
        return np.exp(-c * rho * rho)

    def df(rho):
        return -2.0 * c * rho * f(rho)

    def d2f(rho):
        return (4.0 * c * c * rho * rho - 2.0 * c) * f(rho)

    return radial_field(f, df, d2f, name=f"gaussian({c:g})")


def weighted_gaussian_field() -> AnalyticField:
    """|y|^2 exp(-|y|^2)."""

    def f(rho):
        return rho * rho * np.exp(-rho * rho)

    def df(rho):
        return (2.0 * rho - 2.0 * rho ** 3) * np.exp(-rho * rho)

    def d2f(rho):
        return (2.0 - 10.0 * rho ** 2 + 4.0 * rho ** 4) * np.exp(-rho * rho)

    return radial_field(f, df, d2f, name="weighted_gaussian")


def dipole_field() -> AnalyticField:
    """y_1 exp(-|y|^2); not radial."""

    def value(y):
        y = np.asarray(y, dtype=float)
        return y[..., 0] * np.exp(-np.sum(y * y, axis=-1))

    def gradient(y):
        y = np.asarray(y, dtype=float)
        e = np.exp(-np.sum(y * y, axis=-1))[..., None]
        first = np.zeros_like(y)
        first[..., 0] = 1.0
        return e * (first - 2.0 * y[..., :1] * y)

    def hessian(y):
        y = np.asarray(y, dtype=float)
        n = y.shape[-1]
        e = np.exp(-np.sum(y * y, axis=-1))[..., None, None]
        first = np.zeros_like(y)
        first[..., 0] = 1.0
        g = first - 2.0 * y[..., :1] * y
        # d_j [e (delta_i1 - 2 y_1 y_i)]
        term = -2.0 * y[..., None, :] * g[..., :, None]
        term = term - 2.0 * y[..., :, None] * first[..., None, :]
        term = term - 2.0 * y[..., :1, None] * np.eye(n)
        return e * term

    return AnalyticField(value=value, gradient=gradient, hessian=hessian, name="dipole")


def _bump_profile(r1: float, r2: float):
    if not (0.0 <= r1 < r2):
        raise DomainError(f"bump support needs 0 <= r1 < r2, got [{r1}, {r2}]")
    q_max = 0.25 * (r2 - r1) ** 2

    def parts(rho):
        rho = np.asarray(rho, dtype=float)
        q = (rho - r1) * (r2 - rho)
        inside = q > 0.0
        q_safe = np.where(inside, q, 1.0)
        f = np.where(inside, np.exp(1.0 / q_max - 1.0 / q_safe), 0.0)
        dq = r1 + r2 - 2.0 * rho
        return f, q_safe, dq

    def f(rho):
        return parts(rho)[0]

    def df(rho):
        val, q, dq = parts(rho)
        return val * dq / (q * q)

    def d2f(rho):
        val, q, dq = parts(rho)
        return val * (dq * dq / q ** 4 - 2.0 * dq * dq / q ** 3 - 2.0 / (q * q))

    return f, df, d2f


def bump_field(r1: float, r2: float) -> AnalyticField:
    """Smooth radial bump supported on r1 < |y| < r2 with peak value 1."""
    f, df, d2f = _bump_profile(r1, r2)
    return radial_field(f, df, d2f, name=f"bump({r1:g},{r2:g})")


def power_bump_field(k: float, r1: float, r2: float) -> AnalyticField:
    """|y|^k times a smooth bump on (r1, r2)."""
    g, dg, d2g = _bump_profile(r1, r2)

    def f(rho):
        return np.power(rho, k) * g(rho)

    def df(rho):
        return k * np.power(rho, k - 1) * g(rho) + np.power(rho, k) * dg(rho)

    def d2f(rho):
        return (k * (k - 1) * np.power(rho, k - 2) * g(rho)
                + 2.0 * k * np.power(rho, k - 1) * dg(rho)
                + np.power(rho, k) * d2g(rho))

    return radial_field(f, df, d2f, name=f"power_bump({k:g},{r1:g},{r2:g})")


def ball_indicator_field(R: float) -> AnalyticField:
    """Indicator of |y| <= R. Derivatives are reported as zero; quadrature use only."""
    zero = lambda rho: np.zeros_like(np.asarray(rho, dtype=float))
    return radial_field(lambda rho: (np.asarray(rho) <= R).astype(float), zero, zero,
                        name=f"ball({R:g})")


# -- maps --------------------------------------------------------------------

def forward_map(spec: TransformSpec, x) -> np.ndarray:
    """y = |x|^{-b/2} x."""
    x = np.asarray(x, dtype=float)
    r = _norms(x, "forward map")
    return np.power(r, -spec.b / 2.0)[..., None] * x


def inverse_map(spec: TransformSpec, y) -> np.ndarray:
    """x = |y|^{b/(2-b)} y."""
    y = np.asarray(y, dtype=float)
    rho = _norms(y, "inverse map")
    return np.power(rho, spec.inverse_exponent)[..., None] * y


def pull_field(spec: TransformSpec, v: AnalyticField, x):
    x = np.asarray(x, dtype=float)
    r = _norms(x, "pulled field")
    out = np.power(r, spec.alpha) * v.value(forward_map(spec, x))
    return float(out) if out.ndim == 0 else out


def pull_gradient(spec: TransformSpec, v: AnalyticField, x) -> np.ndarray:
    """Exact gradient of pull_field with respect to x."""
    x = np.asarray(x, dtype=float)
    r = _norms(x, "pulled gradient")
    y = forward_map(spec, x)
    xhat = x / r[..., None]
    gv = v.gradient(y)
    # dy/dx = |x|^{-b/2} (I - (b/2) xhat xhat^T), symmetric
    chain = np.power(r, -spec.b / 2.0)[..., None] * (
        gv - (spec.b / 2.0) * np.sum(xhat * gv, axis=-1, keepdims=True) * xhat
    )
    radial_part = spec.alpha * np.power(r, spec.alpha - 1.0)[..., None] * xhat * v.value(y)[..., None]
    return radial_part + np.power(r, spec.alpha)[..., None] * chain


def jacobian_factor(spec: TransformSpec, y):
    """(2/(2-b)) |y|^{bN/(2-b)}: dx = jacobian_factor(y) dy."""
    rho = _norms(y, "jacobian factor")
    out = jacobian_of_radius(spec, rho)
    return float(out) if np.ndim(out) == 0 else out


def jacobian_of_radius(spec: TransformSpec, rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("jacobian factor is undefined at the origin", anchor="|y|>0")
    return (2.0 / (2.0 - spec.b)) * np.power(rho, spec.b * spec.N / (2.0 - spec.b))


def anisotropy_divergence(kappa: float, y) -> np.ndarray:
    """sum_j d/dy_j A_ij(y) = kappa (N-1) y_i / |y|^2."""
    y = np.asarray(y, dtype=float)
    rho = _norms(y, "anisotropy divergence")
    return kappa * (y.shape[-1] - 1) * y / (rho * rho)[..., None]


def transformed_operator(spec: TransformSpec, params: ProblemParams, v: AnalyticField, y) -> np.ndarray:
    """
    |y|^{-b(N+2)/(2(2-b))} (div(A grad v) - C_b v / |y|^2) in non-divergence form.

    This is the Laplacian of the pulled field expressed through v.
    """
    y = np.asarray(y, dtype=float)
    rho = _norms(y, "transformed operator")
    e = y / rho[..., None]
    H = v.hessian(y)
    g = v.gradient(y)
    trace = np.trace(H, axis1=-2, axis2=-1)
    radial_second = np.einsum("...i,...ij,...j->...", e, H, e)
    principal = trace + params.kappa * radial_second
    drift = np.sum(anisotropy_divergence(params.kappa, y) * g, axis=-1)
    hardy = params.C_b * v.value(y) / (rho * rho)
    weight = np.power(rho, -spec.b * (spec.N + 2) / (2.0 * (2.0 - spec.b)))
    return weight * (principal + drift - hardy)


def lemma21_residual(
    spec: TransformSpec,
    params: ProblemParams,
    v: AnalyticField,
    x_samples: Sequence,
    rel_step: float = 1e-3,
    h: Optional[float] = None,
) -> List[float]:
    """
    |FD Laplacian of pull_field - transformed_operator| at each sample.

    The step is ``rel_step * |x|`` unless an absolute ``h`` is given; any
    stencil reaching half way to the origin is rejected.
    """
    residuals = []
    for x in x_samples:
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        if r == 0.0:
            raise DomainError("sample at the origin", anchor="|x|>0")
        step = h if h is not None else rel_step * r
        if step <= 0 or step >= MAX_RELATIVE_STEP * r:
            raise StepError(f"step {step:g} is too large for |x|={r:g}", anchor="h<|x|/2")
        offsets = step * np.eye(spec.N)
        stencil = np.concatenate([x[None, :], x + offsets, x - offsets])
        u = pull_field(spec, v, stencil)
        laplacian = (np.sum(u[1:]) - 2.0 * spec.N * u[0]) / (step * step)
        rhs = transformed_operator(spec, params, v, forward_map(spec, x))
        residuals.append(float(abs(laplacian - rhs)))
    return residuals


# -- radial transport --------------------------------------------------------

def image_grid(spec: TransformSpec, grid: RadialGrid) -> RadialGrid:
    """Nodes r_i = rho_i^{2/(2-b)} with their own trapezoid weights."""
    return radial_grid_from_nodes(spec.N, np.power(grid.r, 1.0 / spec.gamma))


def transported_weights(spec: TransformSpec, grid: RadialGrid) -> np.ndarray:
    """y-grid weights carried to x through dx = jacobian dy."""
    return jacobian_of_radius(spec, grid.r) * grid.w


def transport_grid(spec: TransformSpec, grid: RadialGrid, refine: int = 4) -> RadialGrid:
    """
    Image nodes merged with a uniform x-grid of refine*M nodes.

    For b<0 the image of a uniform rho-grid is coarse near the origin
    (dr = drho r^{1-gamma}/gamma); the uniform nodes fill that gap.
    """
    image = np.power(grid.r, 1.0 / spec.gamma)
    uniform = np.linspace(image[0], image[-1], refine * grid.M)
    # drop uniform nodes that would sit on top of an image node
    gap = 1e-9 * (image[-1] - image[0])
    idx = np.searchsorted(image, uniform)
    above = image[np.minimum(idx, len(image) - 1)]
    below = image[np.maximum(idx - 1, 0)]
    nearest = np.minimum(np.abs(uniform - above), np.abs(uniform - below))
    nodes = np.union1d(image, uniform[nearest > gap])
    return radial_grid_from_nodes(spec.N, nodes)


def pull_radial(spec: TransformSpec, v: RadialField, x_grid: Optional[RadialGrid] = None) -> RadialField:
    """
    u = r^alpha v(r^gamma), on the image grid by default.

    On any other x-grid v is read off its piecewise linear interpolant.
    """
    if x_grid is None:
        x_grid = image_grid(spec, v.grid)
        return RadialField(x_grid, np.power(x_grid.r, spec.alpha) * v.vals)
    rho = np.clip(np.power(x_grid.r, spec.gamma), v.grid.r[0], v.grid.r[-1])
    return RadialField(x_grid, np.power(x_grid.r, spec.alpha) * np.interp(rho, v.grid.r, v.vals))
