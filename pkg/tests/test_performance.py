"""
Performance tests for the radial and tensor kernels.

These establish baseline timings for the inner loops of the solvers and
the audit suite.
"""
import time

import numpy as np
import pytest


@pytest.mark.benchmark
class TestRadialKernels:
    """Benchmarks on the default radial grid."""

    def test_j_gradient(self, benchmark, model_params, model_pot, default_grid):
        from energy import J_gradient
        from grids import RadialField
        u = RadialField(default_grid, np.exp(-default_grid.r ** 2))
        g = benchmark(J_gradient, model_params, model_pot, u)
        assert g.is_finite()

    def test_stiffness_solve(self, benchmark, model_params, model_pot, default_grid):
        """Factorised tridiagonal solve used in every descent step."""
        from scipy.sparse.linalg import factorized

        from energy import gram_matrix, transformed_coefficients
        K = gram_matrix(transformed_coefficients(model_params, model_pot, default_grid), default_grid)
        solve = factorized(K[:-1, :-1].tocsc())
        rhs = np.ones(default_grid.M - 1)
        x = benchmark(solve, rhs)
        assert np.all(np.isfinite(x))

    def test_trial_fields_fast(self, default_grid):
        from energy import trial_fields
        start = time.perf_counter()
        trial_fields(default_grid)
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"trial fields took {elapsed:.3f}s"


@pytest.mark.benchmark
class TestTensorKernels:
    """Benchmarks on a 64^3 lattice."""

    def test_quotient_theta(self, benchmark, model_params):
        from energy import quotient_theta
        from grids import make_tensor_grid, sample_tensor
        grid = make_tensor_grid(3, 8.0, 64)
        u = sample_tensor(grid, lambda x1, x2, x3: np.exp(-(x1 ** 2 + x2 ** 2 + x3 ** 2)))
        value = benchmark(quotient_theta, model_params, u, (1.0, 0.0, 0.0))
        assert value > 0

    def test_fourth_order_gradient(self, benchmark):
        from grids import gradient_tensor, make_tensor_grid, sample_tensor
        grid = make_tensor_grid(3, 8.0, 64)
        u = sample_tensor(grid, lambda x1, x2, x3: np.exp(-(x1 ** 2 + x2 ** 2 + x3 ** 2)))
        grads = benchmark(gradient_tensor, u, 4)
        assert len(grads) == 3


@pytest.mark.slow
class TestSolverBudget:
    """Wall-clock guards on the solvers."""

    def test_sp_within_budget(self, model_params, small_grid):
        from solve import SolverOpts, ground_state_sp
        start = time.perf_counter()
        report = ground_state_sp(model_params, small_grid, SolverOpts())
        elapsed = time.perf_counter() - start
        assert report.converged
        assert elapsed < 30.0, f"S_p solve took {elapsed:.1f}s"
