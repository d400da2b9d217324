"""
Shared pytest fixtures for the critnls tests.

This conftest.py provides fixtures WITHOUT importing project modules at
module level. Project modules are imported inside fixtures and tests so the
environment prepared by run_tests.py is in place first.
"""
import math

import numpy as np
import pytest
from tinydb import TinyDB
from tinydb.storages import MemoryStorage


# ============================================================================
# Database Fixtures
# ============================================================================

@pytest.fixture
def temp_db():
    """In-memory TinyDB instance for testing."""
    db = TinyDB(storage=MemoryStorage)
    yield db
    db.close()


@pytest.fixture
def populated_ledger(temp_db):
    """Ledger with runs of several subcommands."""
    runs = temp_db.table("runs")
    runs.insert_multiple([
        {"subcommand": "sp", "seed": 1, "exit_code": 0, "timestamp": "2026-01-01T10:00:00"},
        {"subcommand": "verify", "seed": 1, "exit_code": 0, "timestamp": "2026-01-02T10:00:00"},
        {"subcommand": "sp", "seed": 2, "exit_code": 0, "timestamp": "2026-01-03T10:00:00"},
        {"subcommand": "threshold", "seed": 1, "exit_code": 1, "timestamp": "2026-01-04T10:00:00"},
    ])
    return temp_db


# ============================================================================
# Problem Fixtures
# ============================================================================

@pytest.fixture(scope="session")
def model_params():
    """Vanishing regime: N=3, a=1, b=1, s=1/2, mu=1 (p=4)."""
    from problem import validate_params
    return validate_params(3, 1.0, 1.0, 0.5, 1.0)


@pytest.fixture(scope="session")
def coercive_params():
    """Coercive regime: N=3, a=1, b=-2, s=-1, mu=1 (p=4)."""
    from problem import validate_params
    return validate_params(3, 1.0, -2.0, -1.0, 1.0)


@pytest.fixture(scope="session")
def model_pot(model_params):
    from problem import model_potentials
    return model_potentials(model_params)


@pytest.fixture(scope="session")
def coercive_pot(coercive_params):
    from problem import model_potentials
    return model_potentials(coercive_params)


# ============================================================================
# Grid Fixtures
# ============================================================================

@pytest.fixture(scope="session")
def default_grid():
    """Default radial grid: [1e-3, 40], M=4000."""
    from grids import make_radial_grid
    return make_radial_grid(3, 1e-3, 40.0, 4000)


@pytest.fixture(scope="session")
def small_grid():
    """Coarser grid for tests that only need qualitative solver output."""
    from grids import make_radial_grid
    return make_radial_grid(3, 1e-3, 20.0, 1000)


@pytest.fixture
def solver_opts():
    from solve import SolverOpts
    return SolverOpts()


# ============================================================================
# Solver Results (computed once per session)
# ============================================================================

@pytest.fixture(scope="session")
def sp_report(model_params, default_grid):
    from solve import SolverOpts, ground_state_sp
    return ground_state_sp(model_params, default_grid, SolverOpts())


@pytest.fixture(scope="session")
def nehari_report(model_params, model_pot, default_grid):
    from solve import SolverOpts, nehari_minimize
    return nehari_minimize(model_params, model_pot, default_grid, SolverOpts())


# ============================================================================
# Analytic Fields
# ============================================================================

@pytest.fixture
def analytic_fields():
    """The three smooth fields used for the transformed-Laplacian audit."""
    from geometry import dipole_field, gaussian_field, weighted_gaussian_field
    return [gaussian_field(), weighted_gaussian_field(), dipole_field()]


@pytest.fixture
def shell_samples():
    """20 seeded points with 0.5 < |x| < 2."""
    from verify import sample_shell
    return sample_shell(3, 20)


# ============================================================================
# Shooting Oracle
# ============================================================================

def shooting_ground_state(a: float = 1.0, N: int = 3, p: float = 4.0, r_max: float = 30.0, bisections: int = 60):
    """
    Positive radial ground state of -w'' - (N-1)/r w' + a w = w^{p-1} by shooting.

    Returns (w(0), S_p) with S_p = (int w^p)^{1-2/p}, which holds because the
    ground state sits on the Nehari manifold of the isotropic problem.
    """
    from scipy.integrate import solve_ivp

    omega = 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)

    def rhs(r, y):
        w, dw, _ = y
        return [dw, -(N - 1) / r * dw + a * w - abs(w) ** (p - 2.0) * w,
                omega * r ** (N - 1) * abs(w) ** p]

    def crossed(r, y):
        return y[0]
    crossed.terminal = True
    crossed.direction = -1

    def turned(r, y):
        return y[1]
    turned.terminal = True
    turned.direction = 1

    def shoot(beta):
        r0 = 1e-6
        curvature = (a * beta - beta ** (p - 1.0)) / N
        y0 = [beta + 0.5 * curvature * r0 ** 2, curvature * r0, 0.0]
        return solve_ivp(rhs, (r0, r_max), y0, events=(crossed, turned), rtol=1e-11, atol=1e-13)

    lo, hi = a ** (1.0 / (p - 2.0)) * 1.001, 20.0
    for _ in range(bisections):
        mid = 0.5 * (lo + hi)
        if shoot(mid).t_events[0].size:
            hi = mid
        else:
            lo = mid
    sol = shoot(lo)
    integral = sol.y[2, -1]
    return lo, integral ** (1.0 - 2.0 / p)


@pytest.fixture(scope="session")
def shooting_oracle():
    """(w(0), S_p) for N=3, a=1, p=4."""
    return shooting_ground_state()


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)
