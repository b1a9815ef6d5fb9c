"""
Effective one-dimensional Ginzburg-Landau energies

Whole-line profiles under the two-branch potential V_a(xi, t), half-line
profiles under (t + xi)^2, their optimal momentum xi0, the moment identity
at xi0, and the surface energy E_surf(b).
"""
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import optimize

from glstep.config import Discretization, settings
from glstep.exceptions import DomainError, InputError
from glstep.functionals.profile import ProfileFunctional
from glstep.services import fiber, halfline
from glstep.services.numerics import DescentReport, Grid1D, minimize_scalar

# Left cap of the surface xi-window; at b = 1 the band never climbs back to 1/b
SURFACE_XI_CAP = 8.0


@dataclass
class GLProfile1D:
    grid: Grid1D
    values: np.ndarray
    energy: float
    b: float
    xi: float
    a: Optional[float] = None  # None for the half-line problem
    report: Optional[DescentReport] = None

    @property
    def half_line(self) -> bool:
        return self.a is None

    @property
    def is_trivial(self) -> bool:
        return not np.any(self.values > 0)


@dataclass
class SurfaceEnergySample:
    b: float
    value: float
    xi0: Optional[float] = None
    window: Optional[Tuple[float, float]] = None


@dataclass
class SymmetryReport:
    b: float
    whole_line: float
    half_line: float
    ratio: float
    xi_whole: float
    xi_half: float
    notes: List[str] = field(default_factory=list)


def _functional(a: Optional[float], b: float, xi: float, disc: Discretization) -> ProfileFunctional:
    if a is None:
        grid = halfline.RobinParams.build(0.0, -xi, disc).grid
        return ProfileFunctional(b, grid, (grid.nodes + xi) ** 2, half_line=True)
    grid = fiber.FiberOperator.build(a, xi, disc).grid
    return ProfileFunctional(b, grid, fiber.potential(a, xi, grid.nodes))


def _linear_state(a: Optional[float], xi: float, disc: Discretization) -> Tuple[float, np.ndarray]:
    """Eigenvalue and normalized positive eigenfunction of the quadratic part, on the profile grid."""
    if a is None:
        result = halfline.ground_eigenfunction(halfline.RobinParams.build(0.0, -xi, disc), disc)
        return result.value, result.vector
    state = fiber.ground_state(a, xi, disc)
    return state.value, state.values


def energy_1d(a: Optional[float], b: float, xi: float, f: GLProfile1D) -> float:
    """Quadrature of b|f'|^2 + b V |f|^2 - |f|^2 + 1/2 |f|^4 on the profile's grid."""
    values = np.asarray(f.values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise InputError("Profile contains NaN or Inf values")
    h = f.grid.spacing
    t = f.grid.nodes
    potential = (t + xi) ** 2 if a is None else fiber.potential(a, xi, t)
    w = f.grid.trapezoid_weights()
    kinetic = b * np.sum(np.diff(values) ** 2) / h
    return float(kinetic + np.sum(w * ((b * potential - 1.0) * values**2 + 0.5 * values**4)))


def _minimize(
    a: Optional[float], b: float, xi: float, disc: Discretization, init: Optional[np.ndarray]
) -> GLProfile1D:
    functional = _functional(a, b, xi, disc)
    grid = functional.grid
    mu, eigenfunction = _linear_state(a, xi, disc)
    if b * mu >= 1.0 and init is None:
        # quadratic part is non-negative: f = 0 is the minimizer
        return GLProfile1D(grid, np.zeros(grid.n), 0.0, b, xi, a)

    if init is None:
        w = grid.trapezoid_weights()
        scale = np.sqrt(max(0.0, 1.0 - b * mu) / np.sum(w * eigenfunction**4))
        start = functional.restrict(scale * eigenfunction)
    else:
        start = functional.restrict(init) if np.size(init) == grid.n else np.asarray(init, dtype=float)

    report, f = functional.minimize(start, disc.descent_tol, disc.descent_max_iter)
    values = functional.expand(f)
    logger.debug(
        f"{functional.name} b={b:g} xi={xi:.6f}: E={report.energy:.12g} in {report.iterations} iterations"
    )
    return GLProfile1D(grid, values, report.energy, b, xi, a, report)


def minimize_profile(
    a: float, b: float, xi: float, disc: Optional[Discretization] = None, init: Optional[np.ndarray] = None
) -> GLProfile1D:
    """
    Non-negative minimizer of the whole-line functional at fixed xi.

    Starts from the scaled eigenfunction t f_{a,xi} with
    t^2 = max(0, 1 - b mu_a(xi)) / integral f^4 unless `init` is given.
    Whenever b mu_a(xi) >= 1 (in particular for b >= 1/beta_a) the zero
    profile is returned.
    """
    fiber.validate_a(a, allow_positive=False)
    if b < 1.0 / abs(a):
        raise DomainError(f"b = {b:g} is below 1/|a| = {1.0 / abs(a):g}")
    disc = (disc or Discretization.from_settings()).for_profiles()
    return _minimize(a, b, xi, disc, init)


def surface_profile(
    b: float, xi: float, disc: Optional[Discretization] = None, init: Optional[np.ndarray] = None
) -> GLProfile1D:
    """Non-negative minimizer of the half-line functional at fixed xi."""
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    disc = (disc or Discretization.from_settings()).for_profiles()
    return _minimize(None, b, xi, disc, init)


def profile_mass(f: GLProfile1D) -> float:
    return float(np.sum(f.grid.trapezoid_weights() * f.values**2))


def moment_identity_residual(a: Optional[float], b: float, xi0: float, f: GLProfile1D) -> float:
    """Quadrature of (sigma t + xi0)|f|^2; zero at the optimal xi."""
    t = f.grid.nodes
    weight = t + xi0 if a is None else xi0 + np.where(t < 0, a * t, t)
    return float(np.sum(f.grid.trapezoid_weights() * weight * f.values**2))


def optimal_xi(
    a: float, b: float, disc: Optional[Discretization] = None
) -> Tuple[float, float, GLProfile1D]:
    """
    xi0 minimizing xi -> E1D_{a,b}(xi) over (xi1, xi2), where the linear
    problem is unstable, and the profile at xi0.
    """
    disc = disc or Discretization.from_settings()
    profile_disc = disc.for_profiles()
    curve = fiber.beta(a, profile_disc)
    xi1, xi2 = fiber.xi_bracket(a, b, profile_disc, curve=curve)

    def energy_at(xi: float) -> float:
        return _minimize(a, b, xi, profile_disc, None).energy

    found = minimize_scalar(energy_at, (xi1, xi2), tol=disc.scalar_tol)
    profile = _minimize(a, b, found.xstar, profile_disc, None)
    logger.info(f"E1D(a={a:g}, b={b:g}) = {profile.energy:.10f} at xi0 = {found.xstar:.8f}")
    return found.xstar, profile.energy, profile


def surface_window(b: float, disc: Discretization) -> Tuple[float, float]:
    """xi-interval where b mu^N(-xi) < 1, with its left end capped at -8."""
    def excess(x: float) -> float:
        return b * halfline.mu_neumann(x, disc) - 1.0

    x_min = halfline.theta(0.0, disc).xi_star
    lo = float(optimize.bisect(excess, -1.0, x_min, xtol=settings.root_tol, maxiter=200))
    if excess(SURFACE_XI_CAP) > 0:
        hi = float(optimize.bisect(excess, x_min, SURFACE_XI_CAP, xtol=settings.root_tol, maxiter=200))
    else:
        hi = SURFACE_XI_CAP
    return -hi, -lo


def surface_energy(b: float, disc: Optional[Discretization] = None) -> SurfaceEnergySample:
    """
    E_surf(b) = inf over xi of the half-line ground energy for 1 <= b < 1/Theta0,
    extended by zero for b >= 1/Theta0.
    """
    if not np.isfinite(b) or b < 1.0:
        raise DomainError(f"Surface energy needs b >= 1, got {b}")
    disc = (disc or Discretization.from_settings()).for_profiles()
    theta0 = halfline.theta(0.0, disc).theta
    if b >= 1.0 / theta0:
        return SurfaceEnergySample(b, 0.0)

    window = surface_window(b, disc)

    def energy_at(xi: float) -> float:
        return _minimize(None, b, xi, disc, None).energy

    found = minimize_scalar(energy_at, window, tol=disc.scalar_tol)
    if found.boundary:
        logger.warning(
            f"E_surf({b:g}): xi minimum on the {found.boundary} end of the search window "
            f"[{window[0]:.6g}, {window[1]:.6g}]"
        )
    logger.info(f"E_surf({b:g}) = {found.fstar:.10f} at xi = {found.xstar:.8f}")
    return SurfaceEnergySample(b, min(found.fstar, 0.0), found.xstar, window)


def threshold_scan(a: float, bs: Iterable[float], disc: Optional[Discretization] = None) -> List[Tuple[float, float]]:
    """(b, minimizer mass at zeta_a) across a b-grid; the mass vanishes from 1/beta_a on."""
    disc = disc or Discretization.from_settings()
    profile_disc = disc.for_profiles()
    curve = fiber.beta(a, profile_disc)
    rows = []
    for b in bs:
        profile = _minimize(a, b, curve.zeta, profile_disc, None)
        rows.append((float(b), profile_mass(profile)))
    return rows


def symmetry_report(b: float, disc: Optional[Discretization] = None) -> SymmetryReport:
    """
    Whole-line a = -1 energy against the half-line energy at the same b.

    For a = -1 the potential is even, the minimizer is the even extension of
    the half-line minimizer and the whole-line energy is twice the half-line
    one; the ratio is reported rather than normalized.
    """
    xi_whole, whole, _ = optimal_xi(-1.0, b, disc)
    surface = surface_energy(b, disc)
    ratio = whole / surface.value if surface.value != 0 else float("nan")
    notes = []
    if np.isfinite(ratio) and abs(ratio - 1.0) > 1e-3:
        notes.append(f"whole-line E1D is {ratio:.6f} times the half-line E1D_b (even extension doubles the integral)")
        logger.warning(notes[-1])
    return SymmetryReport(b, whole, surface.value, ratio, xi_whole, surface.xi0, notes)
