"""
Strip Service
Minimizes the reduced Ginzburg-Landau energy on truncated strips S_{R,m}
and extracts the strip ground state energy g_a(b, R)
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from glstep.config import Discretization, settings
from glstep.exceptions import ConvergenceError, DomainError, InputError
from glstep.functionals.strip import StripDisc, StripFunctional
from glstep.services import fiber
from glstep.services.numerics import DescentReport

SMALL_AMPLITUDE = 0.1
DECAY_START = 4.0


@dataclass
class StripState:
    disc: StripDisc
    psi: np.ndarray
    energy: float
    sup_norm: float
    report: Optional[DescentReport] = None


@dataclass
class DecayReport:
    weighted_l2: float
    weighted_l4: float
    plain_mass: float
    mass_constant: float  # plain_mass / (b R)
    l2_constant: float  # weighted_l2 / (b R)
    l4_constant: float  # weighted_l4 / (b^2 R)


def strip_energy(state: StripState) -> float:
    """Discrete energy of the state's field."""
    if not np.all(np.isfinite(state.psi)):
        raise InputError("Strip field contains NaN or Inf values")
    return StripFunctional(state.disc).energy(state.psi)


def fiber_profile(disc: StripDisc, curve: Optional[fiber.DispersionCurve] = None) -> Tuple[float, np.ndarray]:
    """
    Momentum and barrier-localized fiber eigenfunction sampled on the strip rows.

    For a < 0 this is f_{a, zeta_a}; for a > 0 the band has no minimizer and
    the eigenfunction at xi = 0 is used.
    """
    spectral = Discretization.from_settings().with_spacing(disc.hy)
    zeta = 0.0
    if disc.a < 0:
        curve = curve or fiber.beta(disc.a, spectral)
        zeta = curve.zeta
    state = fiber.ground_state(disc.a, zeta, spectral)
    return zeta, np.interp(disc.x2, state.grid.nodes, state.values)


def initial_field(disc: StripDisc, curve: Optional[fiber.DispersionCurve] = None) -> np.ndarray:
    """t cos(pi x1 / R) exp(i zeta x1) phi(x2), clamped to modulus 1."""
    if disc.a < 0 and curve is None:
        curve = fiber.beta(disc.a, Discretization.from_settings().with_spacing(disc.hy))
    zeta, profile = fiber_profile(disc, curve)
    amplitude = SMALL_AMPLITUDE
    if disc.a < 0:
        if disc.b * curve.beta < 1.0:
            amplitude = float(np.sqrt((1.0 - disc.b * curve.beta) / curve.nu))
    x1 = disc.x1
    envelope = np.cos(np.pi * x1 / disc.R) * np.exp(1j * zeta * x1)
    psi = amplitude * envelope[:, None] * profile[None, :]
    modulus = np.abs(psi)
    return np.where(modulus > 1.0, psi / np.maximum(modulus, 1.0), psi)


def minimize_strip(
    disc: StripDisc,
    init: Optional[np.ndarray] = None,
    curve: Optional[fiber.DispersionCurve] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> StripState:
    """Projected descent on the strip from the barrier-localized trial field (or `init`)."""
    functional = StripFunctional(disc)
    start = initial_field(disc, curve) if init is None else np.asarray(init, dtype=complex)
    if start.shape != (disc.nx, disc.ny):
        raise InputError(f"Initial field has shape {start.shape}, expected {(disc.nx, disc.ny)}")
    tol = settings.descent_tol if tol is None else tol
    report, psi = functional.minimize(start, tol, max_iter)
    if not report.converged:
        raise ConvergenceError(
            f"Strip descent (a={disc.a:g}, b={disc.b:g}, R={disc.R:g}, m={disc.m:g}) did not converge: "
            f"grad norm {report.grad_norm:.3e}",
            best=StripState(disc, psi, report.energy, float(np.max(np.abs(psi), initial=0.0)), report),
            report=report,
        )
    logger.debug(
        f"Strip a={disc.a:g} b={disc.b:g} R={disc.R:g} m={disc.m:g}: E={report.energy:.12g} "
        f"({report.iterations} iterations)"
    )
    return StripState(disc, psi, report.energy, float(np.max(np.abs(psi), initial=0.0)), report)


def extend_rows(psi: np.ndarray, old: StripDisc, new: StripDisc) -> np.ndarray:
    """Extension by zero of a field from a shorter strip to a taller one with the same spacings."""
    pad = (new.ny - old.ny) // 2
    return np.pad(psi, ((0, 0), (pad, pad)))


def strip_ground_state(
    a: float,
    b: float,
    R: float,
    hx: Optional[float] = None,
    hy: Optional[float] = None,
    m_schedule: Optional[Sequence[float]] = None,
    gap_tol: Optional[float] = None,
    curve: Optional[fiber.DispersionCurve] = None,
    tol: Optional[float] = None,
) -> Tuple[float, StripState]:
    """
    g_a(b, R) from an increasing m-schedule; each solve starts from the
    previous minimizer extended by zero, so the energies are non-increasing
    in m. Stops once successive values differ by at most gap_tol * |g|.
    """
    fiber.validate_a(a)
    if b < 1.0 / abs(a):
        raise DomainError(f"b = {b:g} is below 1/|a| = {1.0 / abs(a):g}")
    hx = hx or settings.strip_spacing
    hy = hy or settings.strip_spacing
    schedule = list(m_schedule or settings.m_schedule)
    gap_tol = settings.m_gap_tol if gap_tol is None else gap_tol
    if a < 0 and curve is None:
        curve = fiber.beta(a, Discretization.from_settings().with_spacing(hy))

    previous: Optional[StripState] = None
    gap = float("inf")
    for m in schedule:
        disc = StripDisc.build(a, b, R, m, hx, hy)
        init = None if previous is None else extend_rows(previous.psi, previous.disc, disc)
        state = minimize_strip(disc, init=init, curve=curve, tol=tol)
        if previous is not None:
            gap = abs(previous.energy - state.energy)
            if gap <= gap_tol * max(abs(state.energy), np.finfo(float).tiny):
                logger.debug(f"g(a={a:g}, b={b:g}, R={R:g}) stable at m={disc.m:g}: {state.energy:.12g}")
                return state.energy, state
            logger.debug(f"m={disc.m:g}: gap {gap:.3e}")
        previous = state
    raise ConvergenceError(
        f"m-schedule {schedule} exhausted for a={a:g}, b={b:g}, R={R:g}; last gap {gap:.3e}",
        best=previous,
    )


def _node_gradient_density(functional: StripFunctional, psi: np.ndarray) -> np.ndarray:
    """|covariant gradient|^2 at nodes, averaging the two adjacent bonds per direction."""
    dx, dy = functional.differences(psi)
    hx, hy = functional.disc.hx, functional.disc.hy
    bx = np.abs(dx) ** 2 / hx**2
    by = np.abs(dy) ** 2 / hy**2
    return 0.5 * (bx[:-1] + bx[1:]) + 0.5 * (by[:, :-1] + by[:, 1:])


def decay_diagnostics(state: StripState) -> DecayReport:
    """Weighted far-field integrals over |x2| >= 4 and the plain energy mass."""
    disc = state.disc
    functional = StripFunctional(disc)
    psi = state.psi
    density = np.abs(psi) ** 2
    grad2 = _node_gradient_density(functional, psi)
    cell = functional.cell

    x2 = np.abs(disc.x2)
    far = x2 >= DECAY_START
    log2 = np.log(np.where(far, x2, 2.0)) ** 2
    w_l2 = np.where(far, x2 / log2, 0.0)
    w_l4 = np.where(far, x2**3 / log2, 0.0)

    weighted_l2 = float(cell * np.sum(w_l2[None, :] * (grad2 + density)))
    weighted_l4 = float(cell * np.sum(w_l4[None, :] * density**2))
    plain_mass = float(cell * np.sum(disc.b * grad2 + density))
    scale = disc.b * disc.R
    return DecayReport(
        weighted_l2,
        weighted_l4,
        plain_mass,
        plain_mass / scale,
        weighted_l2 / scale,
        weighted_l4 / (disc.b * scale),
    )


def euler_lagrange_residual(state: StripState) -> float:
    """Largest nodal residual of -b(grad - i sigma A0)^2 psi - (1 - |psi|^2) psi."""
    functional = StripFunctional(state.disc)
    _, gradient = functional.energy_and_gradient(state.psi)
    return float(np.max(np.abs(gradient), initial=0.0) / (2.0 * functional.cell))


def virial_residual(state: StripState) -> float:
    """|g + 1/2 integral |psi|^4| relative to |g|."""
    quartic = StripFunctional(state.disc).quartic_mass(state.psi)
    return abs(state.energy + 0.5 * quartic) / max(abs(state.energy), np.finfo(float).tiny)
