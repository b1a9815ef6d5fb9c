from typing import Optional

import numpy as np
import pytest

from glstep.config import Discretization
from glstep.exceptions import DomainError, InputError
from glstep.functionals.strip import StripDisc, StripFunctional
from glstep.services import barrier, fiber, strip2d
from glstep.services.numerics import fitted_order, gradient_check

H = 0.25


@pytest.fixture(scope="module")
def small_state():
    disc = StripDisc.build(-1.0, 1.2, 8.0, 4.0, H, H)
    return strip2d.minimize_strip(disc, tol=1e-9)


def random_field(disc: StripDisc, seed: int = 3) -> np.ndarray:
    rng = np.random.default_rng(seed)
    shape = (disc.nx, disc.ny)
    return 0.5 * (rng.normal(size=shape) + 1j * rng.normal(size=shape))


class TestStripDisc:
    def test_snapping(self):
        disc = StripDisc.build(-0.5, 2.5, 4.1, 4.1, 0.3, 0.25)
        assert disc.R / disc.hx == pytest.approx(round(disc.R / disc.hx))
        assert disc.m == pytest.approx(4.25)
        assert disc.x2[disc.ny // 2] == 0.0

    def test_sizes(self):
        disc = StripDisc.build(-1.0, 1.2, 4.0, 4.0, H, H)
        assert (disc.nx, disc.ny) == (15, 31)
        assert disc.sigma[0] == -1.0 and disc.sigma[-1] == 1.0

    def test_short_strip_refused(self):
        with pytest.raises(InputError):
            StripDisc.build(-1.0, 1.2, 4.0, 3.0, H, H)


class TestStripFunctional:
    def setup_method(self):
        self.disc = StripDisc.build(-0.5, 2.5, 3.0, 4.0, H, H)
        self.functional = StripFunctional(self.disc)

    def test_gradient(self):
        psi = random_field(self.disc)
        direction = random_field(self.disc, seed=11)
        assert gradient_check(self.functional.energy_and_gradient, psi, direction) < 1e-6

    def test_global_phase_invariance(self):
        psi = random_field(self.disc)
        assert self.functional.energy(np.exp(0.7j) * psi) == pytest.approx(self.functional.energy(psi), rel=1e-12)

    def test_zero_field(self):
        assert self.functional.energy(np.zeros((self.disc.nx, self.disc.ny), dtype=complex)) == 0.0

    def test_projection_clamps_modulus(self):
        psi = 3.0 * random_field(self.disc)
        assert np.max(np.abs(self.functional.project(psi))) <= 1.0 + 1e-12

    def test_preconditioner_inverts_the_model_operator(self):
        # on a pure sine mode the preconditioner is a division by its symbol
        x = np.arange(1, self.disc.nx + 1)
        y = np.arange(1, self.disc.ny + 1)
        mode = np.outer(np.sin(np.pi * x / (self.disc.nx + 1)), np.sin(np.pi * y / (self.disc.ny + 1)))
        out = self.functional.precondition(mode + 0j)
        ratio = out.real / mode
        np.testing.assert_allclose(ratio, ratio[0, 0], rtol=1e-8)


class TestMinimizeStrip:
    def test_negative_energy_below_threshold(self, small_state):
        assert small_state.energy < 0
        assert 0 < small_state.sup_norm <= 1.0

    def test_energy_matches_field(self, small_state):
        assert strip2d.strip_energy(small_state) == pytest.approx(small_state.energy, rel=1e-12)

    def test_virial_and_euler_lagrange(self, small_state):
        assert strip2d.virial_residual(small_state) < 1e-6
        assert strip2d.euler_lagrange_residual(small_state) < 1e-4

    def test_decay_constants(self, small_state):
        decay = strip2d.decay_diagnostics(small_state)
        assert decay.plain_mass > 0
        assert decay.mass_constant == pytest.approx(decay.plain_mass / (1.2 * 8.0))
        assert decay.weighted_l2 >= 0 and decay.weighted_l4 >= 0

    def test_nan_field_refused(self, small_state):
        broken = strip2d.StripState(small_state.disc, small_state.psi.copy(), 0.0, 0.0)
        broken.psi[0, 0] = np.nan
        with pytest.raises(InputError):
            strip2d.strip_energy(broken)

    def test_wrong_initial_shape(self):
        disc = StripDisc.build(-1.0, 1.2, 4.0, 4.0, H, H)
        with pytest.raises(InputError):
            strip2d.minimize_strip(disc, init=np.zeros((3, 3)))

    def test_above_threshold_field_dies_out(self):
        disc = StripDisc.build(0.5, 3.5, 4.0, 4.0, H, H)
        state = strip2d.minimize_strip(disc)
        assert state.energy == pytest.approx(0.0, abs=1e-8)


def test_extend_rows_pads_symmetrically():
    old = StripDisc.build(-1.0, 1.2, 4.0, 4.0, H, H)
    new = StripDisc.build(-1.0, 1.2, 4.0, 6.0, H, H)
    psi = np.ones((old.nx, old.ny), dtype=complex)
    out = strip2d.extend_rows(psi, old, new)
    assert out.shape == (new.nx, new.ny)
    assert out[:, new.ny // 2].sum() == old.nx
    assert not np.any(out[:, :8])


def test_bulk_regime_refused():
    with pytest.raises(DomainError):
        strip2d.strip_ground_state(-0.5, 1.5, 4.0, H, H)


@pytest.fixture(scope="module")
def curve():
    return fiber.beta(-1.0, Discretization.from_settings().with_spacing(H))


def solve(R: float, m: float, h: float = H, init_from: Optional[strip2d.StripState] = None, **kwargs):
    disc = StripDisc.build(-1.0, 1.2, R, m, h, h)
    init = None if init_from is None else strip2d.extend_rows(init_from.psi, init_from.disc, disc)
    return strip2d.minimize_strip(disc, init=init, **kwargs)


@pytest.mark.slow
class TestTruncation:
    @pytest.fixture(scope="class")
    def states(self, curve):
        shallow = solve(8.0, 4.0, curve=curve, tol=1e-9)
        middle = solve(8.0, 6.0, init_from=shallow, curve=curve, tol=1e-9)
        deep = solve(8.0, 12.0, init_from=middle, curve=curve, tol=1e-9)
        return shallow, middle, deep

    def test_energy_does_not_increase_with_m(self, states):
        shallow, middle, deep = states
        assert middle.energy <= shallow.energy + 1e-9
        assert deep.energy <= middle.energy + 1e-9

    def test_doubling_m_changes_little(self, states):
        _, middle, deep = states
        assert abs(middle.energy - deep.energy) < 1e-6

    def test_analytic_sandwich(self, states, curve):
        _, state, _ = states
        trial = StripFunctional(state.disc).energy(strip2d.initial_field(state.disc, curve))
        assert state.energy <= trial
        lower, upper = barrier.analytic_bounds(-1.0, 1.2, curve, strip2d.decay_diagnostics(state).mass_constant)
        assert lower * state.disc.R <= state.energy < 0
        assert upper < 0

    def test_wider_strip_is_lower(self, states, curve):
        _, narrow, _ = states
        wider = solve(10.0, 6.0, curve=curve, tol=1e-9)
        assert wider.energy <= narrow.energy + 1e-8


@pytest.mark.slow
class TestStripGroundState:
    WIDTHS = (8.0, 12.0, 16.0)
    SCHEDULE = [4.0, 6.0, 9.0]

    @pytest.fixture(scope="class")
    def results(self, curve):
        return {R: strip2d.strip_ground_state(-1.0, 1.2, R, H, H, self.SCHEDULE, curve=curve) for R in self.WIDTHS}

    def test_monotone_in_width(self, results):
        energies = [results[R][0] for R in self.WIDTHS]
        assert energies[0] < 0
        assert energies[1] <= energies[0] + 1e-8
        assert energies[2] <= energies[1] + 1e-8

    def test_doubling_the_width(self, results):
        assert results[16.0][0] <= 2.0 * results[8.0][0] + 1e-6

    def test_decay_constants_stay_bounded(self, results):
        reports = [strip2d.decay_diagnostics(results[R][1]) for R in self.WIDTHS]
        for values in ([r.mass_constant for r in reports], [r.l4_constant for r in reports]):
            assert min(values) > 0
            assert max(values) < 3.0 * min(values)


@pytest.mark.slow
def test_energy_converges_at_second_order(curve):
    spacings = [0.25, 0.125, 0.0625]
    energies = [solve(8.0, 5.0, h, curve=curve).energy for h in spacings]
    assert 1.7 <= fitted_order(spacings, energies) <= 2.2
