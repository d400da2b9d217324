"""
Tests for solve.py - quotient minimisers, the mountain-pass path and the threshold report.
"""
import numpy as np
import pytest


class TestGroundStateSp:
    """Tests for ground_state_sp against a shooting oracle."""

    @pytest.mark.slow
    def test_value_matches_shooting(self, sp_report, shooting_oracle):
        _, S_p = shooting_oracle
        assert sp_report.converged
        assert sp_report.value == pytest.approx(S_p, rel=5e-3)

    @pytest.mark.slow
    def test_profile_peak(self, sp_report, shooting_oracle):
        """t* times the minimiser is the ground state; its peak is w(0)."""
        w0, _ = shooting_oracle
        assert sp_report.critical_point.vals[0] == pytest.approx(w0, rel=1e-2)

    @pytest.mark.slow
    def test_minimizer_normalised_and_nonnegative(self, sp_report):
        u = sp_report.minimizer
        assert np.all(u.vals >= 0.0)
        assert u.vals[-1] == 0.0
        assert float(np.dot(u.grid.w, u.vals ** 4)) == pytest.approx(1.0, rel=1e-10)

    @pytest.mark.slow
    def test_history_monotone(self, sp_report):
        """Accepted steps never raise the quotient beyond roundoff."""
        h = sp_report.history
        assert all(b <= a * (1.0 + 1e-12) for a, b in zip(h, h[1:]))

    def test_budget_exhausted(self, model_params, small_grid):
        from errors import NoConvergence
        from solve import SolverOpts, ground_state_sp
        with pytest.raises(NoConvergence) as exc:
            ground_state_sp(model_params, small_grid, SolverOpts(max_iters=2))
        partial = exc.value.partial
        assert partial is not None
        assert partial.iterations == 2
        assert not partial.converged
        assert np.isfinite(partial.value)

    @pytest.mark.parametrize("overrides,reason", [
        (dict(stall_rtol=1.0, stall_window=1), "stalled"),
        (dict(min_step=2.0), "line_search"),
    ])
    def test_early_stop_is_not_convergence(self, model_params, small_grid, overrides, reason):
        """Stopping above tol raises with the stagnated partial report."""
        from errors import NoConvergence
        from solve import SolverOpts, ground_state_sp
        with pytest.raises(NoConvergence, match=reason) as exc:
            ground_state_sp(model_params, small_grid, SolverOpts(**overrides))
        partial = exc.value.partial
        assert partial.stagnated
        assert not partial.converged
        assert partial.final_gradient_norm > SolverOpts().tol

    @pytest.mark.slow
    @pytest.mark.parametrize("a", [0.5, 2.0])
    def test_scaling_in_a(self, default_grid, sp_report, a):
        """S_p(a) = a^{1-(N/2)(p-2)/p} S_p(1)."""
        from problem import validate_params
        from solve import SolverOpts, ground_state_sp
        params = validate_params(3, a, 1.0, 0.5, 1.0)
        report = ground_state_sp(params, default_grid, SolverOpts())
        exponent = 1.0 - 1.5 * (params.p - 2.0) / params.p
        assert report.value == pytest.approx(a ** exponent * sp_report.value, rel=1e-2)

    @pytest.mark.slow
    @pytest.mark.parametrize("r_max,M", [(40.0, 8000), (60.0, 6000)])
    def test_mesh_stability(self, model_params, sp_report, r_max, M):
        """Doubling M or stretching r_max by 1.5 moves S_p by under 1%."""
        from grids import make_radial_grid
        from solve import SolverOpts, ground_state_sp
        grid = make_radial_grid(3, 1e-3, r_max, M)
        report = ground_state_sp(model_params, grid, SolverOpts())
        assert report.value == pytest.approx(sp_report.value, rel=1e-2)

    def test_dimension_mismatch(self, model_params):
        from errors import GridError
        from grids import make_radial_grid
        from solve import SolverOpts, ground_state_sp
        with pytest.raises(GridError):
            ground_state_sp(model_params, make_radial_grid(4, 1e-3, 10.0, 100), SolverOpts())


class TestInitialGuess:
    """Tests for initial_guess."""

    def test_default_is_gaussian(self, small_grid):
        from solve import SolverOpts, initial_guess
        vals = initial_guess(small_grid, SolverOpts())
        assert vals[-1] == 0.0
        assert np.allclose(vals[:-1], np.exp(-0.5 * small_grid.r[:-1] ** 2))

    def test_perturbation_seeded(self, small_grid):
        from solve import SolverOpts, initial_guess
        a = initial_guess(small_grid, SolverOpts(perturbation=0.1, seed=11))
        b = initial_guess(small_grid, SolverOpts(perturbation=0.1, seed=11))
        c = initial_guess(small_grid, SolverOpts(perturbation=0.1, seed=12))
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert np.all(a >= 0.0)


class TestNehari:
    """Tests for nehari_minimize."""

    @pytest.mark.slow
    def test_level_identity(self, model_params, model_pot, nehari_report):
        """J at t* times the minimiser equals (1/2 - 1/p) value^{p/(p-2)}."""
        from energy import J_value
        p = model_params.p
        assert nehari_report.level == pytest.approx((0.5 - 1.0 / p) * nehari_report.value ** (p / (p - 2.0)),
                                                    rel=1e-12)
        assert J_value(model_params, model_pot, nehari_report.critical_point) == pytest.approx(
            nehari_report.level, rel=1e-8)

    @pytest.mark.slow
    def test_critical_point(self, model_params, model_pot, nehari_report):
        from energy import J_gradient, grid_norm
        g = J_gradient(model_params, model_pot, nehari_report.critical_point)
        assert grid_norm(g, free_only=True) <= 1e-6

    @pytest.mark.slow
    def test_value_at_most_annulus_trials(self, model_params, model_pot, default_grid, nehari_report):
        from energy import quotient_A
        from solve import annulus_bump
        for r in (10.0, 20.0):
            assert nehari_report.value <= quotient_A(model_params, model_pot, annulus_bump(default_grid, r))

    def test_limit_equals_isotropic_when_mu_is_one(self, model_params, model_pot, small_grid):
        """Limit coefficients (1, a, 1) coincide with the S_p problem for mu=1."""
        from solve import SolverOpts, ground_state_sp, nehari_minimize
        opts = SolverOpts()
        limit = nehari_minimize(model_params, model_pot, small_grid, opts, limit=True)
        sp = ground_state_sp(model_params, small_grid, opts)
        assert limit.value == pytest.approx(sp.value, rel=1e-8)
        assert limit.solver == "nehari_limit"

    def test_limit_scales_with_mu(self, small_grid):
        """The limit problem with K -> mu has quotient mu^{-2/p} S_p."""
        from problem import model_potentials, validate_params
        from solve import SolverOpts, ground_state_sp, nehari_minimize
        params = validate_params(3, 1.0, 1.0, 0.5, 4.0)
        opts = SolverOpts()
        limit = nehari_minimize(params, model_potentials(params), small_grid, opts, limit=True)
        sp = ground_state_sp(params, small_grid, opts)
        assert limit.value == pytest.approx(params.mu ** (-2.0 / params.p) * sp.value, rel=1e-6)

    def test_initial_field_used(self, model_params, model_pot, small_grid):
        from grids import RadialField
        from solve import SolverOpts, nehari_minimize
        start = RadialField(small_grid, np.exp(-small_grid.r))
        report = nehari_minimize(model_params, model_pot, small_grid, SolverOpts(), initial=start)
        assert report.converged
        assert report.summary()["solver"] == "nehari"


class TestMountainPass:
    """Tests for mountain_pass_path."""

    @pytest.mark.slow
    def test_matches_nehari_level(self, model_params, model_pot, small_grid):
        from solve import SolverOpts, mountain_pass_path, nehari_minimize
        opts = SolverOpts()
        nehari = nehari_minimize(model_params, model_pot, small_grid, opts)
        path = mountain_pass_path(model_params, model_pot, small_grid, opts)
        assert path.converged
        assert 0 < path.path_max_index < opts.path_nodes
        assert path.level == pytest.approx(nehari.level, rel=1e-2)

    @pytest.mark.slow
    def test_converges_linearly(self, model_params, model_pot, small_grid):
        """The dual norm at the highest node falls below path_tol at a geometric rate."""
        from solve import SolverOpts, mountain_pass_path
        opts = SolverOpts()
        path = mountain_pass_path(model_params, model_pot, small_grid, opts)
        history = np.array(path.gradient_history)
        assert path.final_gradient_norm < opts.path_tol
        assert history[-1] < 1e-4 * history[0]
        slope = np.polyfit(np.arange(history.size), np.log(history), 1)[0]
        assert slope < 0.0
        assert path.path_max_index == opts.path_nodes // 2

    @pytest.mark.parametrize("overrides,reason", [
        (dict(max_iters=3), "max_iters"),
        (dict(min_step=2.0), "line_search"),
    ])
    def test_early_stop_raises(self, model_params, model_pot, small_grid, overrides, reason):
        from errors import NoConvergence
        from solve import SolverOpts, mountain_pass_path
        with pytest.raises(NoConvergence, match=reason) as exc:
            mountain_pass_path(model_params, model_pot, small_grid, SolverOpts(**overrides))
        partial = exc.value.partial
        assert not partial.converged
        assert partial.final_gradient_norm >= SolverOpts().path_tol
        assert 0 < partial.path_max_index < SolverOpts().path_nodes

    def test_positive_energy_endpoint(self, model_params, model_pot, small_grid):
        from errors import BadEndpoint
        from grids import RadialField
        from solve import SolverOpts, mountain_pass_path
        small = RadialField(small_grid, 1e-3 * np.exp(-small_grid.r ** 2))
        with pytest.raises(BadEndpoint):
            mountain_pass_path(model_params, model_pot, small_grid, SolverOpts(), endpoint=small)


class TestThreshold:
    """Tests for threshold_constants, annulus trials and threshold_check."""

    def test_constants_model(self, model_params):
        """b=1, p=4, mu=1: S = sqrt(1/2) S_p, rhs = S, threshold = S^2/4."""
        from solve import threshold_constants
        S, rhs, ps = threshold_constants(model_params, 8.0)
        assert S == pytest.approx(8.0 * 0.5 ** 0.5)
        assert rhs == pytest.approx(S)
        assert ps == pytest.approx(S * S / 4.0)

    def test_constants_mu_scaling(self):
        from problem import validate_params
        from solve import threshold_constants
        params = validate_params(3, 1.0, 1.0, 0.5, 4.0)
        S, rhs, ps = threshold_constants(params, 8.0)
        assert rhs == pytest.approx(S / 2.0)
        assert ps == pytest.approx(0.25 * S * S / 4.0)

    def test_annulus_bump_shape(self, default_grid):
        from solve import annulus_bump
        u = annulus_bump(default_grid, 20.0)
        r = default_grid.r
        assert np.all(u.vals[(r >= 12.5) & (r <= 17.5)] == 1.0)
        assert np.all(u.vals[(r <= 10.0) | (r >= 20.0)] == 0.0)

    def test_annulus_beyond_grid(self, small_grid):
        from errors import GridError
        from solve import annulus_bump
        with pytest.raises(GridError):
            annulus_bump(small_grid, 40.0)

    def test_coherent_property(self):
        from solve import ThresholdReport
        base = dict(lhs=1.0, S_p=1.0, S=1.0, rhs=2.0, ps_threshold=1.0, mp_level=0.5,
                    regime="vanishing", lhs_source="nehari")
        assert ThresholdReport(condition_18_holds=True, level_below_threshold=True, **base).coherent
        assert not ThresholdReport(condition_18_holds=True, level_below_threshold=False, **base).coherent
        assert ThresholdReport(condition_18_holds=False, level_below_threshold=False, **base).coherent

    @pytest.mark.slow
    def test_report_coherent(self, model_params, model_pot, default_grid, sp_report):
        from solve import SolverOpts, threshold_check
        report = threshold_check(model_params, model_pot, default_grid, SolverOpts(), sp_report=sp_report)
        assert report.coherent
        assert report.S_p == sp_report.value
        assert report.lhs <= min(t.quotient for t in report.annulus)
        assert not report.degraded
        assert "upper bound" in report.note

    @pytest.mark.slow
    def test_dirichlet_quotient_decreases(self, model_params, model_pot, default_grid, sp_report):
        from solve import ANNULUS_RADII, SolverOpts, threshold_check
        report = threshold_check(model_params, model_pot, default_grid, SolverOpts(), sp_report=sp_report)
        eps_d = [t.dirichlet_quotient for t in report.annulus]
        assert len(eps_d) == len(ANNULUS_RADII)
        assert all(b < a for a, b in zip(eps_d, eps_d[1:]))

    def test_radii_beyond_grid_skipped(self, model_params, model_pot, small_grid):
        from solve import SolverOpts, threshold_check
        report = threshold_check(model_params, model_pot, small_grid, SolverOpts())
        assert [t.r for t in report.annulus] == [10.0, 20.0]
