"""
Tests for energy.py - norms, quotients and functionals.
"""
import math

import numpy as np
import pytest


def _gaussian(grid):
    from grids import RadialField
    vals = np.exp(-grid.r ** 2)
    vals[-1] = 0.0
    return RadialField(grid, vals)


# closed forms for u = exp(-r^2) in R^3
GRAD_SQ = 1.5 * math.pi ** 1.5 / math.sqrt(2.0)
L2_SQ = (math.pi / 2.0) ** 1.5
L4_P = (math.pi / 4.0) ** 1.5


class TestDirichletAndHardy:
    """Tests for dirichlet_energy, hardy_terms and h1_norm_sq."""

    def test_dirichlet_gaussian(self, default_grid):
        from energy import dirichlet_energy
        assert dirichlet_energy(_gaussian(default_grid)) == pytest.approx(GRAD_SQ, rel=1e-3)

    def test_hardy_ratio_is_three(self, default_grid):
        """For exp(-r^2) in R^3 the Hardy sides differ by a factor 3."""
        from energy import hardy_terms
        lhs, rhs = hardy_terms(_gaussian(default_grid))
        assert lhs / rhs == pytest.approx(3.0, rel=5e-3)

    def test_h1_norm(self, default_grid):
        from energy import h1_norm_sq
        assert h1_norm_sq(_gaussian(default_grid)) == pytest.approx(GRAD_SQ + L2_SQ, rel=1e-3)

    def test_non_finite_rejected(self, small_grid):
        from energy import dirichlet_energy
        from errors import NonFinite
        from grids import RadialField
        vals = np.zeros(small_grid.M)
        vals[3] = np.nan
        with pytest.raises(NonFinite):
            dirichlet_energy(RadialField(small_grid, vals))


class TestBreakdown:
    """Tests for norm_A_sq and the coefficient sets."""

    def test_aniso_term(self, model_params, model_pot, default_grid):
        """Radial fields: aniso = kappa * dirichlet and total = (1+kappa) D + potential."""
        from energy import norm_A_sq
        parts = norm_A_sq(model_params, model_pot, _gaussian(default_grid))
        assert parts.aniso == pytest.approx(model_params.kappa * parts.dirichlet, rel=1e-12)
        assert parts.total_norm_sq == pytest.approx(
            model_params.beta ** 2 * parts.dirichlet + parts.potential, rel=1e-12)
        assert parts.J_value == pytest.approx(0.5 * parts.total_norm_sq - parts.nonlinear / model_params.p)

    def test_as_dict_keys(self, model_params, model_pot, small_grid):
        from energy import norm_A_sq
        d = norm_A_sq(model_params, model_pot, _gaussian(small_grid)).as_dict()
        assert set(d) == {"dirichlet", "aniso", "potential", "nonlinear", "total_norm_sq", "J_value"}

    def test_coefficients_cached(self, model_params, model_pot, small_grid):
        from energy import transformed_coefficients
        first = transformed_coefficients(model_params, model_pot, small_grid)
        assert transformed_coefficients(model_params, model_pot, small_grid) is first

    def test_coefficients_read_only(self, model_params, model_pot, small_grid):
        from energy import transformed_coefficients
        coeffs = transformed_coefficients(model_params, model_pot, small_grid)
        with pytest.raises(ValueError):
            coeffs.potential[0] = 0.0

    def test_limit_coefficients(self, coercive_params, small_grid):
        from energy import limit_coefficients
        coeffs = limit_coefficients(coercive_params, small_grid)
        assert coeffs.stiffness == 1.0
        assert np.all(coeffs.potential == coercive_params.a)
        assert np.all(coeffs.weight == coercive_params.mu)

    def test_stiffness_matrix_matches_dirichlet(self, small_grid, rng):
        from energy import dirichlet_energy, stiffness_matrix
        from grids import RadialField
        u = rng.standard_normal(small_grid.M)
        S = stiffness_matrix(small_grid)
        assert float(u @ (S @ u)) == pytest.approx(dirichlet_energy(RadialField(small_grid, u)), rel=1e-12)


class TestPIntegrals:
    """Tests for weighted_p_integral."""

    def test_positive_part(self, model_params, model_pot, small_grid):
        from energy import weighted_p_integral
        u = _gaussian(small_grid).scaled(-1.0)
        assert weighted_p_integral(model_params, model_pot, u) == 0.0
        assert weighted_p_integral(model_params, model_pot, u, positive_part=False) > 0.0

    def test_limit_weight(self, model_params, model_pot, default_grid):
        """With mu weights the Gaussian p-integral is (pi/4)^{3/2}."""
        from energy import weighted_p_integral
        value = weighted_p_integral(model_params, model_pot, _gaussian(default_grid), use_kstar=False)
        assert value == pytest.approx(L4_P, rel=1e-4)

    def test_kstar_weight_smaller(self, model_params, model_pot, default_grid):
        """K_* < mu everywhere in the model vanishing regime."""
        from energy import weighted_p_integral
        u = _gaussian(default_grid)
        assert weighted_p_integral(model_params, model_pot, u) < weighted_p_integral(
            model_params, model_pot, u, use_kstar=False)


class TestGradient:
    """Tests for J_gradient and pairing."""

    def test_matches_central_differences(self, model_params, model_pot, small_grid, rng):
        from energy import J_gradient, J_value, pairing
        from grids import RadialField
        u = _gaussian(small_grid)
        g = J_gradient(model_params, model_pot, u)
        for _ in range(3):
            h = RadialField(small_grid, rng.standard_normal(small_grid.M) * np.exp(-0.1 * small_grid.r))
            eps = 1e-5
            fd = (J_value(model_params, model_pot, RadialField(small_grid, u.vals + eps * h.vals))
                  - J_value(model_params, model_pot, RadialField(small_grid, u.vals - eps * h.vals))) / (2 * eps)
            assert pairing(g, h) == pytest.approx(fd, rel=1e-6, abs=1e-9)

    def test_grid_norm_free_only(self, small_grid):
        from energy import grid_norm
        from grids import RadialField
        vals = np.zeros(small_grid.M)
        vals[-1] = 1.0
        f = RadialField(small_grid, vals)
        assert grid_norm(f) > 0.0
        assert grid_norm(f, free_only=True) == 0.0


class TestRayMax:
    """Tests for ray_max."""

    def test_closed_form(self):
        from energy import ray_max
        t_star, level = ray_max(2.0, 2.0, 4.0)
        assert t_star == pytest.approx(1.0)
        assert level == pytest.approx(0.5)

    def test_is_maximum(self):
        from energy import ray_max
        A, B, p = 3.0, 0.7, 3.5
        t_star, level = ray_max(A, B, p)
        t = np.linspace(0.0, 3.0 * t_star, 2001)
        values = 0.5 * t ** 2 * A - t ** p * B / p
        assert level == pytest.approx(values.max(), rel=1e-5)
        assert 0.5 * t_star ** 2 * A - t_star ** p * B / p == pytest.approx(level)

    @pytest.mark.parametrize("A,B,p", [(0.0, 1.0, 4.0), (1.0, -1.0, 4.0), (1.0, 1.0, 2.0)])
    def test_rejects(self, A, B, p):
        from energy import ray_max
        from errors import DomainError
        with pytest.raises(DomainError):
            ray_max(A, B, p)


class TestQuotients:
    """Tests for quotient_A, quotient_p and their tensor versions."""

    def test_quotient_p_gaussian(self, model_params, default_grid):
        from energy import quotient_p
        expected = (GRAD_SQ + L2_SQ) / math.sqrt(L4_P)
        assert quotient_p(model_params, _gaussian(default_grid)) == pytest.approx(expected, rel=1e-3)

    def test_scale_invariant(self, model_params, model_pot, small_grid):
        from energy import quotient_A
        u = _gaussian(small_grid)
        assert quotient_A(model_params, model_pot, u.scaled(3.7)) == pytest.approx(
            quotient_A(model_params, model_pot, u), rel=1e-12)

    def test_zero_field(self, model_params, model_pot, small_grid):
        from energy import quotient_A
        from errors import ZeroDenominator
        from grids import RadialField
        with pytest.raises(ZeroDenominator):
            quotient_A(model_params, model_pot, RadialField(small_grid, np.zeros(small_grid.M)))

    def test_tensor_matches_radial(self, model_params, default_grid):
        """Isotropic quotient of the Gaussian agrees on both grids."""
        from energy import quotient_isotropic_tensor, quotient_p
        from grids import make_tensor_grid, sample_tensor
        grid = make_tensor_grid(3, 8.0, 64)
        u = sample_tensor(grid, lambda x1, x2, x3: np.exp(-(x1 ** 2 + x2 ** 2 + x3 ** 2)))
        assert quotient_isotropic_tensor(model_params, u, order=4) == pytest.approx(
            quotient_p(model_params, _gaussian(default_grid)), rel=5e-3)

    def test_theta_term_radial_field(self, model_params):
        """A radial field on a cubic lattice has int (theta.grad u)^2 = D/3 along each axis."""
        from energy import norm_theta_sq
        from grids import make_tensor_grid, sample_tensor
        grid = make_tensor_grid(3, 6.0, 32)
        u = sample_tensor(grid, lambda x1, x2, x3: np.exp(-(x1 ** 2 + x2 ** 2 + x3 ** 2)))
        for theta in np.eye(3):
            parts = norm_theta_sq(model_params, u, theta)
            assert parts.aniso == pytest.approx(model_params.kappa * parts.dirichlet / 3.0, rel=1e-10)

    def test_theta_must_be_unit(self, model_params):
        from energy import quotient_theta
        from errors import DomainError
        from grids import make_tensor_grid, sample_tensor
        u = sample_tensor(make_tensor_grid(3, 4.0, 16), lambda x1, x2, x3: np.exp(-x1 ** 2))
        with pytest.raises(DomainError):
            quotient_theta(model_params, u, (1.0, 1.0, 0.0))


class TestOriginalCoordinates:
    """Tests for energy_E, phi_value and embedding_ratio."""

    def test_phi_matches_breakdown(self, model_params, model_pot, small_grid):
        from energy import energy_E, phi_value
        u = _gaussian(small_grid)
        parts = energy_E(model_params, model_pot, u)
        assert parts.aniso == 0.0
        assert phi_value(model_params, model_pot, u) == pytest.approx(parts.J_value)

    def test_embedding_ratio_bounded(self, model_params, model_pot, default_grid):
        from energy import embedding_ratio, trial_fields
        ratios = [embedding_ratio(model_params, model_pot, f) for f in trial_fields(default_grid, count=10)]
        assert all(0.0 < r < 10.0 for r in ratios)


class TestTrialFields:
    """Tests for trial_fields."""

    def test_count_and_boundary(self, small_grid):
        from energy import trial_fields
        fields = trial_fields(small_grid)
        assert len(fields) == 50
        assert all(f.vals[-1] == 0.0 for f in fields)
        assert all(np.any(f.vals != 0.0) for f in fields)

    def test_deterministic(self, small_grid):
        from energy import trial_fields
        a = trial_fields(small_grid, count=12, seed=7)
        b = trial_fields(small_grid, count=12, seed=7)
        assert all(np.array_equal(x.vals, y.vals) for x, y in zip(a, b))
