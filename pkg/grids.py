"""
Radial and Cartesian discretizations.

Every functional in the toolkit is a sum over one of these grids, so the
weights defined here are the single source of quadrature truth:

* ``RadialGrid`` - nodes r_0 < ... < r_{M-1} with composite-trapezoid weights
  that already include the sphere area omega_{N-1} r^{N-1}.
* ``TensorGrid`` - a cell-centred lattice on [-L, L]^3 that never places a
  node at the origin.
"""
import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Literal, Sequence, Tuple

import numpy as np
from scipy.special import gamma

from errors import GridError

MIN_RADIAL_NODES = 16
MAX_TENSOR_NODES = 128
TENSOR_DIMENSIONS = (3,)

Spacing = Literal["uniform", "graded", "custom"]


def sphere_area(N: int) -> float:
    """Surface area omega_{N-1} of the unit sphere in R^N."""
    return 2.0 * math.pi ** (N / 2.0) / float(gamma(N / 2.0))


@dataclass(frozen=True, eq=False)
class RadialGrid:
    N: int
    r: np.ndarray
    w: np.ndarray
    spacing: str = "uniform"
    key: tuple = field(init=False)

    def __post_init__(self):
        digest = hashlib.sha1(np.ascontiguousarray(self.r).tobytes()).hexdigest()[:16]
        object.__setattr__(self, "key", (self.N, self.spacing, len(self.r), digest))

    @property
    def M(self) -> int:
        return len(self.r)

    @property
    def r_min(self) -> float:
        return float(self.r[0])

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    @property
    def omega(self) -> float:
        return sphere_area(self.N)

    @cached_property
    def h(self) -> np.ndarray:
        """Edge lengths r_{i+1} - r_i."""
        return np.diff(self.r)

    @cached_property
    def edge_weight(self) -> np.ndarray:
        """omega * mean(r^{N-1}) / h per edge; sum c_e (du)^2 approximates omega int u'^2 r^{N-1} dr."""
        rp = self.r ** (self.N - 1)
        return self.omega * 0.5 * (rp[:-1] + rp[1:]) / self.h

    def meta(self) -> dict:
        return {"N": self.N, "r_min": self.r_min, "r_max": self.r_max, "M": self.M, "spacing": self.spacing}


@dataclass(eq=False)
class RadialField:
    grid: RadialGrid
    vals: np.ndarray

    def __post_init__(self):
        self.vals = np.asarray(self.vals, dtype=float)
        if self.vals.shape != (self.grid.M,):
            raise GridError(f"field has shape {self.vals.shape}, grid has {self.grid.M} nodes")

    def scaled(self, t: float) -> "RadialField":
        return RadialField(self.grid, t * self.vals)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.vals)))


def _trapezoid_weights(N: int, r: np.ndarray) -> np.ndarray:
    h = np.diff(r)
    half_cells = np.zeros_like(r)
    half_cells[:-1] += 0.5 * h
    half_cells[1:] += 0.5 * h
    return sphere_area(N) * r ** (N - 1) * half_cells


def radial_grid_from_nodes(N: int, r: Sequence[float], spacing: Spacing = "custom") -> RadialGrid:
    """Grid on explicit nodes (used for images of grids under the change of variables)."""
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or len(r) < 3:
        raise GridError("radial grid needs a 1-D array of at least 3 nodes")
    if r[0] <= 0:
        raise GridError(f"r_min={r[0]} must be positive")
    if np.any(np.diff(r) <= 0):
        raise GridError("radial nodes must be strictly increasing")
    return RadialGrid(N=int(N), r=r, w=_trapezoid_weights(N, r), spacing=spacing)


def make_radial_grid(
    N: int,
    r_min: float = 1e-3,
    r_max: float = 40.0,
    M: int = 4000,
    spacing: Spacing = "uniform",
) -> RadialGrid:
    """Uniform or geometrically graded nodes with trapezoid weights."""
    if N < 1:
        raise GridError(f"dimension N={N} must be positive")
    if not (0 < r_min < r_max):
        raise GridError(f"need 0 < r_min < r_max, got r_min={r_min}, r_max={r_max}")
    if M < MIN_RADIAL_NODES:
        raise GridError(f"M={M} is below the minimum of {MIN_RADIAL_NODES} nodes")
    if spacing == "uniform":
        r = np.linspace(r_min, r_max, M)
    elif spacing == "graded":
        r = np.geomspace(r_min, r_max, M)
    else:
        raise GridError(f"unknown spacing '{spacing}'")
    return RadialGrid(N=int(N), r=r, w=_trapezoid_weights(N, r), spacing=spacing)


def radial_derivative(f: RadialField) -> RadialField:
    """Second-order central differences inside, second-order one-sided at both ends."""
    if f.grid.M < 3:
        raise GridError("radial derivative needs at least 3 nodes")
    return RadialField(f.grid, np.gradient(f.vals, f.grid.r, edge_order=2))


def integrate_radial(f_vals, grid: RadialGrid) -> float:
    f_vals = np.asarray(f_vals, dtype=float)
    if f_vals.shape != grid.w.shape:
        raise GridError(f"integrand has {f_vals.size} values, grid has {grid.M} nodes")
    return float(np.dot(f_vals, grid.w))


def sample_radial(grid: RadialGrid, profile) -> RadialField:
    """RadialField from a vectorized profile r -> value."""
    return RadialField(grid, np.asarray(profile(grid.r), dtype=float))


# -- Cartesian lattice -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TensorGrid:
    """
    Cell-centred lattice x_k = -L + (k + 1/2) 2L/n per axis.

    ``axis_scale`` stretches individual axes; a stretched grid shares node
    values with its parent and only changes coordinates and cell volume.
    """
    N: int
    L: float
    n: int
    axis_scale: Tuple[float, ...] = (1.0, 1.0, 1.0)

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def spacings(self) -> Tuple[float, ...]:
        return tuple(self.h * s for s in self.axis_scale)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n,) * self.N

    @cached_property
    def axes(self) -> List[np.ndarray]:
        base = -self.L + (np.arange(self.n) + 0.5) * self.h
        return [base * s for s in self.axis_scale]

    @cached_property
    def coords(self) -> List[np.ndarray]:
        return np.meshgrid(*self.axes, indexing="ij")

    @cached_property
    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c * c for c in self.coords))

    def stretched(self, axis: int, factor: float) -> "TensorGrid":
        scale = list(self.axis_scale)
        scale[axis] *= factor
        return TensorGrid(N=self.N, L=self.L, n=self.n, axis_scale=tuple(scale))


@dataclass(eq=False)
class TensorField:
    grid: TensorGrid
    vals: np.ndarray

    def __post_init__(self):
        self.vals = np.asarray(self.vals, dtype=float)
        if self.vals.size != self.grid.n ** self.grid.N:
            raise GridError(f"field has {self.vals.size} values, grid has {self.grid.n ** self.grid.N}")
        self.vals = self.vals.reshape(self.grid.shape)

    @property
    def flat_vals(self) -> np.ndarray:
        return self.vals.ravel()

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.vals)))


def make_tensor_grid(N: int = 3, L: float = 8.0, n: int = 64) -> TensorGrid:
    if N not in TENSOR_DIMENSIONS:
        raise GridError(f"tensor grids support N=3 only, got N={N}")
    if n % 2:
        raise GridError(f"n={n} must be even so the origin is not a node")
    if not (4 <= n <= MAX_TENSOR_NODES):
        raise GridError(f"n={n} must lie in [4, {MAX_TENSOR_NODES}]")
    if L <= 0:
        raise GridError(f"half width L={L} must be positive")
    return TensorGrid(N=N, L=float(L), n=int(n))


def sample_tensor(grid: TensorGrid, func) -> TensorField:
    """TensorField from func(x1, x2, x3) evaluated on the node arrays."""
    return TensorField(grid, func(*grid.coords))


def _fourth_order_axis(vals: np.ndarray, spacing: float, axis: int) -> np.ndarray:
    out = np.gradient(vals, spacing, axis=axis, edge_order=2)
    n = vals.shape[axis]
    if n < 5:
        return out

    def take(start, stop):
        idx = [slice(None)] * vals.ndim
        idx[axis] = slice(start, stop)
        return vals[tuple(idx)]

    inner = [slice(None)] * vals.ndim
    inner[axis] = slice(2, n - 2)
    out[tuple(inner)] = (
        -take(4, n) + 8.0 * take(3, n - 1) - 8.0 * take(1, n - 3) + take(0, n - 4)
    ) / (12.0 * spacing)
    return out


def gradient_tensor(f: TensorField, order: int = 2) -> List[TensorField]:
    """Per-axis central differences (order 2 or 4), one-sided second order at faces."""
    if f.grid.n < 4:
        raise GridError("tensor gradient needs at least 4 nodes per axis")
    if order not in (2, 4):
        raise GridError(f"difference order must be 2 or 4, got {order}")
    out = []
    for axis, spacing in enumerate(f.grid.spacings):
        if order == 2:
            d = np.gradient(f.vals, spacing, axis=axis, edge_order=2)
        else:
            d = _fourth_order_axis(f.vals, spacing, axis)
        out.append(TensorField(f.grid, d))
    return out


def integrate_tensor(vals, grid: TensorGrid) -> float:
    vals = np.asarray(vals, dtype=float)
    if vals.size != grid.n ** grid.N:
        raise GridError(f"integrand has {vals.size} values, grid has {grid.n ** grid.N}")
    return float(vals.sum() * grid.cell_volume)
