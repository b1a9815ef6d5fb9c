"""
Phase Service
Spectral thresholds, regime classification and the leading-order energy
of a sample under a magnetic step, per unit of kappa
"""
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

import numpy as np
from loguru import logger

from glstep.config import Discretization
from glstep.exceptions import DomainError, InputError, OutOfScopeError
from glstep.services import barrier, fiber, gl1d, halfline

ZERO_TOL = 1e-12


@dataclass
class Thresholds:
    a: float
    inv_abs_a: float
    inv_beta: float
    inv_theta: float
    inv_a_theta: float

    def ordered(self) -> List[tuple]:
        """The four critical fields sorted by value, as computed rather than assumed."""
        named = [
            ("1/|a|", self.inv_abs_a),
            ("1/beta", self.inv_beta),
            ("1/theta0", self.inv_theta),
            ("1/(|a|theta0)", self.inv_a_theta),
        ]
        return sorted(named, key=lambda item: item[1])

    def family(self) -> str:
        return step_family(self.a, self.inv_theta)


@dataclass
class DomainGeometry:
    len_gamma: float = 1.0
    len_bnd1: float = 1.0
    len_bnd2: float = 1.0

    def __post_init__(self):
        lengths = [self.len_gamma, self.len_bnd1, self.len_bnd2]
        if not all(np.isfinite(lengths)) or min(lengths) < 0:
            raise InputError(f"Curve lengths must be finite and non-negative, got {lengths}")


@dataclass
class RegionEnergies:
    barrier: float  # e_a(b)
    surface: float  # E_surf(b)
    surface_scaled: float  # E_surf(b|a|)
    source: str = "given"


@dataclass
class L4Coefficients:
    gamma: float
    bnd1: float
    bnd2: float
    total: float


@dataclass
class PhaseVerdict:
    a: float
    b: float
    barrier_super: Optional[bool]
    bnd1_super: Optional[bool]
    bnd2_super: Optional[bool]
    regime_label: str
    EL: Optional[float] = None
    l4_coefficient: Optional[float] = None
    mode: str = "sign"
    family: str = ""
    leading_order_only: bool = True

    def flags(self) -> tuple:
        return (self.barrier_super, self.bnd1_super, self.bnd2_super)


def thresholds(
    a: float, curve: Optional[fiber.DispersionCurve] = None, theta0: Optional[float] = None,
    disc: Optional[Discretization] = None,
) -> Thresholds:
    fiber.validate_a(a)
    beta = a if a > 0 else (curve or fiber.beta(a, disc)).beta
    theta0 = halfline.theta0(disc) if theta0 is None else theta0
    return Thresholds(a, 1.0 / abs(a), 1.0 / beta, 1.0 / theta0, 1.0 / (abs(a) * theta0))


def step_family(a: float, inv_theta: Optional[float] = None) -> str:
    """
    Which ordering of the critical fields applies to the step ratio a.

    For 0 < a <= Theta0 every admissible b > 1/a is already above 1/Theta0,
    so only ∂Ω2 can stay superconducting ("aligned-weak"). For a > Theta0 the
    window 1/a < b < 1/Theta0 keeps both boundary parts superconducting
    ("aligned-strong"). Negative ratios are "symmetric" (a = -1) or "opposite".
    """
    fiber.validate_a(a)
    if a == -1.0:
        return "symmetric"
    if a < 0:
        return "opposite"
    if inv_theta is None:
        raise InputError("Positive step ratios need 1/Theta0 to pick the family")
    return "aligned-weak" if a * inv_theta <= 1.0 else "aligned-strong"


def regime_label(barrier_super: bool, bnd1_super: bool, bnd2_super: bool) -> str:
    parts = ["barrier"] if barrier_super else []
    if bnd1_super and bnd2_super:
        parts.append("full-surface")
    elif bnd2_super:
        parts.append("surface-Ω₂" if barrier_super else "surface-Ω₂-only")
    elif bnd1_super:
        parts.append("surface-Ω₁")
    return "+".join(parts) or "normal"


def leading_energy(a: float, b: float, geom: DomainGeometry, energies: RegionEnergies) -> float:
    """E^L_a(b) = b^(-1/2) (|Γ| e_a(b) + |∂Ω1| E_surf(b) + |∂Ω2| |a|^(-1/2) E_surf(b|a|))."""
    coefficients = l4_distribution(a, b, geom, energies)
    return -0.5 * coefficients.total


def l4_distribution(a: float, b: float, geom: DomainGeometry, energies: RegionEnergies) -> L4Coefficients:
    """Line densities of the limiting |psi|^4 measure on Γ, ∂Ω1 and ∂Ω2."""
    fiber.validate_a(a)
    if not b > 0:
        raise InputError(f"b must be positive, got {b}")
    scale = -2.0 / np.sqrt(b)
    gamma = scale * energies.barrier
    bnd1 = scale * energies.surface
    bnd2 = scale * energies.surface_scaled / np.sqrt(abs(a))
    total = gamma * geom.len_gamma + bnd1 * geom.len_bnd1 + bnd2 * geom.len_bnd2
    return L4Coefficients(gamma + 0.0, bnd1 + 0.0, bnd2 + 0.0, total + 0.0)


def region_energies(
    a: float,
    b: float,
    disc: Optional[Discretization] = None,
    source: str = "gl1d",
    limits: Optional[Thresholds] = None,
    **strip_options,
) -> RegionEnergies:
    """
    The three per-unit-length energies entering E^L_a(b).

    The barrier energy comes from the 1D effective energy (`gl1d`, the
    conjectured value) or from the strip schedule (`strip`).
    """
    limits = limits or thresholds(a, disc=disc)
    if a > 0 or b >= limits.inv_beta:
        e_barrier = 0.0
    elif source == "gl1d":
        try:
            e_barrier = gl1d.optimal_xi(a, b, disc)[1]
        except DomainError:
            # b sits between the profile-grid and spectral-grid values of 1/beta
            e_barrier = 0.0
    elif source == "strip":
        e_barrier = barrier.barrier_energy(a, b, **strip_options).e_best
    else:
        raise InputError(f"Unknown energy source {source!r}; use 'gl1d' or 'strip'")
    surface = gl1d.surface_energy(b, disc).value
    surface_scaled = surface if abs(a) == 1.0 else gl1d.surface_energy(b * abs(a), disc).value
    return RegionEnergies(e_barrier, surface, surface_scaled, source)


def classify(
    a: float,
    b: float,
    energies: Optional[RegionEnergies] = None,
    limits: Optional[Thresholds] = None,
    geom: Optional[DomainGeometry] = None,
    zero_tol: float = ZERO_TOL,
    disc: Optional[Discretization] = None,
) -> PhaseVerdict:
    """
    Superconductivity flags per region and the regime label.

    Without `energies` the flags follow from the thresholds alone (sign-only
    mode): the barrier carries superconductivity iff a < 0 and b < 1/beta_a,
    ∂Ω1 iff b < 1/Theta0 and ∂Ω2 iff b|a| < 1/Theta0. With energies a region
    is superconducting iff its energy is below -zero_tol.
    """
    fiber.validate_a(a)
    if b <= 1.0 / abs(a):
        raise OutOfScopeError(
            f"b = {b:g} <= 1/|a| = {1.0 / abs(a):g}: bulk regime, treated previously and not covered here"
        )
    geom = geom or DomainGeometry()
    if energies is None:
        limits = limits or thresholds(a, disc=disc)
        flags = (a < 0 and b < limits.inv_beta, b < limits.inv_theta, b < limits.inv_a_theta)
        label = regime_label(*flags)
        EL = l4 = None
        if not any(flags):
            EL, l4 = 0.0, 0.0
        return PhaseVerdict(a, b, *flags, label, EL, l4, mode="sign", family=limits.family())

    flags = (energies.barrier < -zero_tol, energies.surface < -zero_tol, energies.surface_scaled < -zero_tol)
    EL = leading_energy(a, b, geom, energies)
    if limits is not None:
        family = limits.family()
    else:
        family = step_family(a, 1.0 / halfline.theta0(disc) if a > 0 else None)
    return PhaseVerdict(
        a, b, *flags, regime_label(*flags), EL, -2.0 * EL, mode=f"energy:{energies.source}", family=family
    )


def phase_map(
    a_values: Iterable[float],
    b_values: Iterable[float],
    with_energies: bool = False,
    source: str = "gl1d",
    geom: Optional[DomainGeometry] = None,
    disc: Optional[Discretization] = None,
) -> List[PhaseVerdict]:
    """
    Verdicts over an (a, b) grid, a-major. Cells in the bulk regime
    b <= 1/|a| are kept as rows labelled "bulk" with no flags.
    """
    a_values, b_values = list(a_values), list(b_values)
    theta0 = halfline.theta0(disc)
    rows = []
    for a in a_values:
        limits = thresholds(a, theta0=theta0, disc=disc)
        for b in b_values:
            if b <= limits.inv_abs_a:
                rows.append(
                    PhaseVerdict(a, b, None, None, None, "bulk", mode="out-of-scope", family=limits.family())
                )
                continue
            energies = region_energies(a, b, disc, source, limits) if with_energies else None
            rows.append(classify(a, b, energies, limits, geom, disc=disc))
        logger.info(f"Phase row a={a:g}: {len(b_values)} cells")
    return rows


def verdict_rows(verdicts: List[PhaseVerdict]) -> List[Dict[str, object]]:
    """Flat rows for tabular output; booleans become 0/1."""
    def flag(value: Optional[bool]):
        return None if value is None else int(value)

    return [
        {
            "a": v.a,
            "b": v.b,
            "barrier": flag(v.barrier_super),
            "bnd1": flag(v.bnd1_super),
            "bnd2": flag(v.bnd2_super),
            "regime": v.regime_label,
            "EL": v.EL,
        }
        for v in verdicts
    ]
