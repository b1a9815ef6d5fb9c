"""
Barrier Service
Energy per unit length of the magnetic barrier, e_a(b) = lim g_a(b, R)/R,
from an R-schedule of strip ground states
"""
from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from glstep.config import Discretization, settings
from glstep.exceptions import DomainError, InputError, OutOfScopeError, ResolutionError
from glstep.services import fiber, gl1d, strip2d
from glstep.utils.sweep import run_grid

TAIL_POINTS = 3
MONOTONE_SLACK = 1e-6
VANISHING_LEVEL = 1e-10


@dataclass
class SchedulePoint:
    R: float
    g: float
    g_over_R: float
    m: float
    iterations: int
    mass_constant: float


@dataclass
class BarrierEnergyEstimate:
    a: float
    b: float
    schedule: List[SchedulePoint] = field(default_factory=list)
    e_lower: float = 0.0
    e_upper: float = 0.0
    e_best: float = 0.0
    tail_constant: Optional[float] = None  # c in g/R = e + c R^(-1/3)
    tail_constant_scaled: Optional[float] = None  # c / b^2
    inverse_fit: Optional[Tuple[float, float]] = None  # (e, c) in g/R = e + c/R
    analytic: Optional[Tuple[float, float]] = None  # (lower, upper) density bounds
    trivial: bool = False


@dataclass
class ConjectureGap:
    a: float
    b: float
    e2d: float
    e1d: float
    gap: float
    half_line: Optional[float] = None  # E1D_b, reported for a = -1
    notes: List[str] = field(default_factory=list)


def _strip_point(
    a: float, b: float, hx: float, hy: float, m_schedule: Sequence[float], curve, tol: Optional[float], R: float
):
    g, state = strip2d.strip_ground_state(a, b, R, hx, hy, m_schedule, curve=curve, tol=tol)
    decay = strip2d.decay_diagnostics(state)
    return SchedulePoint(R, g, g / R, state.disc.m, state.report.iterations if state.report else 0, decay.mass_constant)


def fit_tail(Rs: Sequence[float], values: Sequence[float], exponent: float) -> Tuple[float, float]:
    """Least-squares (e, c) in values = e + c R^(-exponent)."""
    Rs = np.asarray(Rs, dtype=float)
    design = np.column_stack([np.ones_like(Rs), Rs ** (-exponent)])
    (e, c), *_ = np.linalg.lstsq(design, np.asarray(values, dtype=float), rcond=None)
    return float(e), float(c)


def analytic_bounds(
    a: float, b: float, curve: fiber.DispersionCurve, mass_constant: Optional[float] = None
) -> Tuple[float, float]:
    """
    Bounds on e_a(b) from the fiber data.

    upper = -(1 - b beta)^2 / (2 nu), the large-R density of the trial state
    t cos-cutoff exp(i zeta x1) f_a with t^2 = (1 - b beta)/nu;
    lower = b (b beta - 1) C with C the mass constant plain_mass/(bR) of a
    computed minimizer (-inf when no constant is supplied).
    """
    if b * curve.beta >= 1.0:
        return 0.0, 0.0
    if curve.nu is None:
        raise DomainError(f"Fiber data for a={a:g} carry no nu; analytic bounds need a in [-1, 0)")
    upper = -((1.0 - b * curve.beta) ** 2) / (2.0 * curve.nu)
    lower = -np.inf if mass_constant is None else b * (b * curve.beta - 1.0) * mass_constant
    return float(lower), float(upper)


def barrier_energy(
    a: float,
    b: float,
    schedule: Optional[Sequence[float]] = None,
    hx: Optional[float] = None,
    hy: Optional[float] = None,
    m_schedule: Optional[Sequence[float]] = None,
    threads: Optional[int] = None,
    curve: Optional[fiber.DispersionCurve] = None,
    shortcut: bool = True,
    tol: Optional[float] = None,
) -> BarrierEnergyEstimate:
    """
    e_a(b) bracketed from the R-schedule.

    e_upper is the smallest g/R, e_lower the largest g/R - |c| R^(-1/3)
    with c fitted on the last three schedule points, and e_best the fitted
    limit clamped into [e_lower, e_upper]. For a > 0, or b >= 1/beta_a when
    `shortcut` is on, the energy is zero and no strip is solved.
    """
    fiber.validate_a(a)
    if a > 0:
        return BarrierEnergyEstimate(a, b, trivial=True)
    if b < 1.0 / abs(a):
        raise OutOfScopeError(f"b = {b:g} < 1/|a| = {1.0 / abs(a):g} is the bulk regime, treated elsewhere")

    hx = hx or settings.strip_spacing
    hy = hy or settings.strip_spacing
    curve = curve or fiber.beta(a, Discretization.from_settings().with_spacing(hy))
    if shortcut and b * curve.beta >= 1.0:
        return BarrierEnergyEstimate(a, b, trivial=True, analytic=(0.0, 0.0))

    Rs = sorted(float(R) for R in (schedule or settings.r_schedule))
    if len(Rs) < 2 or Rs[0] <= 0:
        raise InputError(f"R-schedule needs at least two positive widths, got {Rs}")
    m_schedule = list(m_schedule or settings.m_schedule)

    worker = partial(_strip_point, a, b, hx, hy, m_schedule, curve, tol)
    points: List[SchedulePoint] = run_grid(worker, Rs, threads)
    ratios = np.array([p.g_over_R for p in points])

    scale = max(float(np.max(np.abs(ratios))), 1e-12)
    rises = np.diff(ratios)
    if np.any(rises > MONOTONE_SLACK * scale + 1e-12):
        k = int(np.argmax(rises))
        raise ResolutionError(
            f"g/R increases from R={Rs[k]:g} to R={Rs[k + 1]:g} by {rises[k]:.3e}; refine hx/hy"
        )

    tail = slice(-TAIL_POINTS, None)
    e_fit, c = fit_tail(Rs[tail], ratios[tail], 1.0 / 3.0)
    inverse_fit = fit_tail(Rs[tail], ratios[tail], 1.0)
    R_arr = np.asarray(Rs)

    e_upper = min(float(np.min(ratios)), 0.0)
    e_lower = min(float(np.max(ratios - abs(c) * R_arr ** (-1.0 / 3.0))), e_upper)
    e_best = float(np.clip(e_fit, e_lower, e_upper))
    analytic = analytic_bounds(a, b, curve, points[-1].mass_constant)

    logger.info(
        f"e(a={a:g}, b={b:g}) in [{e_lower:.8f}, {e_upper:.8f}], best {e_best:.8f} (c/b^2 = {c / b**2:.4g})"
    )
    return BarrierEnergyEstimate(
        a, b, points, e_lower, e_upper, e_best, c, c / b**2, inverse_fit, analytic
    )


def conjecture_gap(
    a: float,
    b: float,
    disc: Optional[Discretization] = None,
    schedule: Optional[Sequence[float]] = None,
    hx: Optional[float] = None,
    hy: Optional[float] = None,
    m_schedule: Optional[Sequence[float]] = None,
    threads: Optional[int] = None,
    estimate: Optional[BarrierEnergyEstimate] = None,
) -> ConjectureGap:
    """
    Barrier energy against the effective 1D energy E1D_{a,b}.

    Evidence only: the relative gap |e2d - e1d| / |e1d| is reported, never
    asserted. For a = -1 the half-line E1D_b is reported as well. Pass
    `estimate` to compare an already computed schedule.
    """
    fiber.validate_a(a, allow_positive=False)
    if estimate is None:
        hy = hy or settings.strip_spacing
        curve = fiber.beta(a, Discretization.from_settings().with_spacing(hy))
        if b * curve.beta >= 1.0:
            return ConjectureGap(a, b, 0.0, 0.0, 0.0)
        estimate = barrier_energy(a, b, schedule, hx, hy, m_schedule, threads, curve)
    if estimate.trivial:
        return ConjectureGap(a, b, 0.0, 0.0, 0.0)

    try:
        _, e1d, _ = gl1d.optimal_xi(a, b, disc)
    except DomainError as exc:
        # b lies between the profile-grid and strip-grid values of 1/beta_a
        logger.warning(f"E1D unavailable at a={a:g}, b={b:g}: {exc}")
        e1d = 0.0
    gap = abs(estimate.e_best - e1d) / abs(e1d) if e1d != 0 else float("inf")
    result = ConjectureGap(a, b, estimate.e_best, e1d, gap)
    if a == -1.0:
        half = gl1d.surface_energy(b, disc).value
        result.half_line = half
        if half != 0:
            result.notes.append(
                f"e(-1, {b:g}) / E1D_b = {estimate.e_best / half:.6f}; whole-line E1D / E1D_b = {e1d / half:.6f}"
            )
    logger.info(f"Conjecture gap a={a:g} b={b:g}: e2d={estimate.e_best:.8f} e1d={e1d:.8f} gap={gap:.3%}")
    return result


def vanishing_threshold(
    a: float,
    lo: Optional[float] = None,
    hi: Optional[float] = None,
    tol: float = 5e-3,
    schedule: Optional[Sequence[float]] = None,
    hx: Optional[float] = None,
    hy: Optional[float] = None,
    m_schedule: Optional[Sequence[float]] = None,
    threads: Optional[int] = None,
) -> Tuple[float, float]:
    """
    Bisection on b for the point where the strip estimate of e_a(b) vanishes,
    with the analytic 1/beta_a shortcut switched off.

    Returns (threshold, 1/beta_a). Finite strips vanish slightly before the
    infinite one, so the threshold approaches 1/beta_a from below as the
    schedule grows.
    """
    fiber.validate_a(a, allow_positive=False)
    hy = hy or settings.strip_spacing
    curve = fiber.beta(a, Discretization.from_settings().with_spacing(hy))
    inv_beta = 1.0 / curve.beta
    lo = 1.0 / abs(a) + tol if lo is None else lo
    hi = inv_beta + 0.1 if hi is None else hi

    def vanishes(b: float) -> bool:
        estimate = barrier_energy(a, b, schedule, hx, hy, m_schedule, threads, curve, shortcut=False)
        return estimate.e_upper > -VANISHING_LEVEL

    if vanishes(lo):
        return lo, inv_beta
    if not vanishes(hi):
        raise DomainError(f"Barrier energy is still negative at b={hi:g}; raise the upper end")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if vanishes(mid):
            hi = mid
        else:
            lo = mid
    threshold = 0.5 * (lo + hi)
    logger.info(f"Vanishing threshold a={a:g}: b={threshold:.5f} (1/beta = {inv_beta:.5f})")
    return threshold, inv_beta
