import numpy as np
import pytest
from loguru import logger

from glstep.exceptions import DomainError
from glstep.functionals.profile import ProfileFunctional
from glstep.services import fiber, gl1d
from glstep.services.numerics import Grid1D, ScalarMinimum, gradient_check


@pytest.fixture(scope="module")
def optimum(disc):
    return gl1d.optimal_xi(-1.0, 1.2, disc)


class TestProfileFunctional:
    def make(self, half_line: bool) -> ProfileFunctional:
        grid = Grid1D(0.0 if half_line else -5.0, 5.0, 101 if half_line else 201)
        return ProfileFunctional(1.2, grid, (grid.nodes + 0.7) ** 2, half_line=half_line)

    @pytest.mark.parametrize("half_line", [False, True])
    def test_gradient(self, half_line):
        functional = self.make(half_line)
        f = functional.restrict(np.exp(-functional.grid.nodes**2))
        direction = np.cos(np.arange(f.size))
        assert gradient_check(functional.energy_and_gradient, f, direction) < 1e-6

    def test_zero_profile_has_zero_energy(self):
        functional = self.make(False)
        energy, grad = functional.energy_and_gradient(np.zeros(199))
        assert energy == 0.0
        assert not np.any(grad)

    def test_half_line_keeps_the_boundary_node(self):
        functional = self.make(True)
        assert functional.weights.size == functional.grid.n - 1
        assert functional.weights[0] == pytest.approx(0.5 * functional.grid.spacing)


class TestFixedMomentum:
    def test_minimizer_energy_is_consistent(self, disc):
        profile = gl1d.minimize_profile(-1.0, 1.2, -0.77, disc)
        assert profile.energy < 0
        assert not profile.is_trivial
        assert np.all(profile.values >= 0)
        assert gl1d.energy_1d(-1.0, 1.2, -0.77, profile) == pytest.approx(profile.energy, rel=1e-10)

    def test_independent_starts_agree(self, disc):
        scaled = gl1d.minimize_profile(-1.0, 1.2, -0.77, disc)
        constant = gl1d.minimize_profile(-1.0, 1.2, -0.77, disc, init=np.full(scaled.grid.n, 0.1))
        assert constant.energy == pytest.approx(scaled.energy, abs=1e-8)

    def test_stable_linear_problem_gives_zero(self, disc):
        profile = gl1d.minimize_profile(-1.0, 1.2, 3.0, disc)
        assert profile.is_trivial
        assert profile.energy == 0.0

    def test_bulk_regime_refused(self, disc):
        with pytest.raises(DomainError):
            gl1d.minimize_profile(-0.5, 1.5, -0.5, disc)

    def test_positive_a_refused(self, disc):
        with pytest.raises(DomainError):
            gl1d.minimize_profile(0.5, 3.0, 0.0, disc)


class TestOptimalMomentum:
    def test_energy_is_negative_inside_the_window(self, optimum, disc):
        xi0, energy, profile = optimum
        assert energy < 0
        xi1, xi2 = fiber.xi_bracket(-1.0, 1.2, disc.for_profiles())
        assert xi1 < xi0 < xi2

    def test_moment_identity(self, optimum):
        xi0, _, profile = optimum
        residual = gl1d.moment_identity_residual(-1.0, 1.2, xi0, profile)
        assert abs(residual) < 1e-4 * gl1d.profile_mass(profile)

    def test_moment_identity_detects_a_shifted_momentum(self, optimum, disc):
        xi0, _, _ = optimum
        shifted = gl1d.minimize_profile(-1.0, 1.2, xi0 + 0.2, disc)
        residual = gl1d.moment_identity_residual(-1.0, 1.2, xi0 + 0.2, shifted)
        assert abs(residual) > 1e-3 * gl1d.profile_mass(shifted)

    def test_symmetric_step_profile_is_even(self, optimum):
        _, _, profile = optimum
        assert profile.grid.left == pytest.approx(-profile.grid.right)
        np.testing.assert_allclose(profile.values, profile.values[::-1], atol=1e-6)

    def test_no_neighbouring_momentum_is_lower(self, optimum, disc):
        xi0, energy, _ = optimum
        for xi in xi0 + np.linspace(-0.1, 0.1, 21):
            assert gl1d.minimize_profile(-1.0, 1.2, xi, disc).energy >= energy - 1e-10

    def test_scaled_eigenfunction_trial_is_non_positive(self, optimum, disc):
        profile_disc = disc.for_profiles()
        curve = fiber.beta(-1.0, profile_disc)
        state = fiber.ground_state(-1.0, curve.zeta, profile_disc)
        nu = np.sum(state.grid.trapezoid_weights() * state.values**4)
        t = np.sqrt((1.0 - 1.2 * curve.beta) / nu)
        trial = gl1d.GLProfile1D(state.grid, t * state.values, 0.0, 1.2, curve.zeta, -1.0)
        energy = gl1d.energy_1d(-1.0, 1.2, curve.zeta, trial)
        assert energy <= 0.0
        assert energy == pytest.approx(-((1.0 - 1.2 * curve.beta) ** 2) / (2.0 * nu), rel=1e-3)
        assert optimum[1] <= energy + 1e-10

    def test_threshold_scan(self, disc):
        inv_beta = 1.0 / fiber.beta(-1.0, disc.for_profiles()).beta
        rows = gl1d.threshold_scan(-1.0, [inv_beta - 0.1, inv_beta + 1e-3, inv_beta + 0.1], disc)
        assert rows[0][1] > 1e-3
        assert rows[1][1] < 1e-6
        assert rows[2][1] < 1e-6

    def test_mass_vanishes_from_the_threshold_on(self, disc):
        inv_beta = 1.0 / fiber.beta(-1.0, disc.for_profiles()).beta
        below, at = gl1d.threshold_scan(-1.0, [inv_beta - 1e-3, inv_beta], disc)
        assert below[1] > 1e-6
        assert at[1] < 1e-6


class TestSurfaceEnergy:
    def test_negative_below_inverse_theta0(self, disc):
        sample = gl1d.surface_energy(1.2, disc)
        assert sample.value < 0
        lo, hi = sample.window
        assert lo < sample.xi0 < hi

    def test_zero_beyond_inverse_theta0(self, disc):
        assert gl1d.surface_energy(2.0, disc).value == 0.0

    def test_non_decreasing(self, disc):
        values = [gl1d.surface_energy(b, disc).value for b in (1.1, 1.3, 1.5)]
        assert values[0] <= values[1] <= values[2] <= 0.0

    def test_window_edge_minimum_is_reported(self, disc, monkeypatch):
        def on_left_edge(f, bracket, tol=None):
            return ScalarMinimum(bracket[0], -0.01, "lo", 1)

        monkeypatch.setattr(gl1d, "minimize_scalar", on_left_edge)
        messages = []
        sink = logger.add(messages.append, level="WARNING", format="{message}")
        try:
            sample = gl1d.surface_energy(1.2, disc)
        finally:
            logger.remove(sink)
        assert sample.xi0 == sample.window[0]
        assert len(messages) == 1
        assert "lo end of the search window" in messages[0]

    def test_below_one_refused(self, disc):
        with pytest.raises(DomainError):
            gl1d.surface_energy(0.9, disc)

    def test_half_line_profile(self, disc):
        profile = gl1d.surface_profile(1.2, -0.77, disc)
        assert profile.half_line
        assert profile.values[0] > 0


def test_whole_line_energy_is_twice_the_half_line_energy(disc):
    report = gl1d.symmetry_report(1.2, disc)
    assert report.ratio == pytest.approx(2.0, abs=1e-3)
    assert report.xi_whole == pytest.approx(report.xi_half, abs=1e-2)
    assert report.notes
