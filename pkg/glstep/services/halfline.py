"""
Half-line Sturm-Liouville family

H[gamma, xi] = -d^2/dt^2 + (t - xi)^2 on t > 0 with the Robin condition
u'(0) = gamma * u(0), its Neumann (gamma = 0) and Dirichlet realizations,
the band functions and the de Gennes curve Theta(gamma).
"""
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np
from loguru import logger

from glstep.config import Discretization
from glstep.exceptions import BoundaryMinimumError, InputError, TruncationError
from glstep.services.numerics import (
    EigenResult,
    Grid1D,
    minimize_scalar,
    second_eigenpair,
    smallest_eigenpair,
)

# Far-field Dirichlet cut: the potential must clear the eigenvalue by the
# margin, and the cut sits at least this far beyond the well.
MIN_WELL_DISTANCE = 8.0
TAIL_MASS_LIMIT = 1e-8


def far_field_reach(mu_estimate: float, disc: Discretization) -> float:
    """Distance from a well bottom at which the potential clears mu_estimate + margin."""
    return max(MIN_WELL_DISTANCE, float(np.sqrt(mu_estimate + disc.truncation_margin)))


def snap_up(length: float, spacing: float) -> float:
    """Smallest multiple of `spacing` that is >= `length`."""
    return spacing * float(np.ceil(length / spacing - 1e-9))


@dataclass(frozen=True)
class RobinParams:
    gamma: float
    xi: float
    truncation: float
    n: int

    def __post_init__(self):
        if not all(np.isfinite([self.gamma, self.xi, self.truncation])):
            raise InputError("Robin parameters must be finite")
        if self.truncation <= 0 or self.n < 3:
            raise InputError(f"Invalid half-line grid: T={self.truncation}, n={self.n}")

    @classmethod
    def build(cls, gamma: float, xi: float, disc: Optional[Discretization] = None) -> "RobinParams":
        """Parameters with the truncation chosen from the potential-level rule."""
        disc = disc or Discretization.from_settings()
        mu_estimate = 1.0 + max(0.0, -xi) ** 2
        length = max(disc.min_truncation, xi + far_field_reach(mu_estimate, disc))
        length = snap_up(length, disc.spacing)
        return cls(gamma, xi, length, int(round(length / disc.spacing)) + 1)

    @property
    def grid(self) -> Grid1D:
        return Grid1D(0.0, self.truncation, self.n)

    def check_truncation(self):
        if self.truncation < max(12.0, self.xi + MIN_WELL_DISTANCE):
            raise TruncationError(
                f"Truncation T={self.truncation:g} is too short for xi={self.xi:g}; "
                f"use T >= max(12, xi + {MIN_WELL_DISTANCE:g})"
            )


@dataclass
class DeGennesPoint:
    gamma: float
    theta: float
    xi_star: float
    phi0: float
    evaluations: int = 0

    @property
    def identity_residual(self) -> float:
        """xi_star^2 - theta - gamma^2, zero at the exact minimum."""
        return self.xi_star**2 - self.theta - self.gamma**2


def _robin_matrix(p: RobinParams, dirichlet: bool = False) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symmetrized tridiagonal matrix, quadrature weights of the unknowns."""
    grid = p.grid
    h = grid.spacing
    t = grid.nodes[:-1]  # u vanishes at the far end
    potential = (t - p.xi) ** 2
    if dirichlet:
        diag = 2.0 / h**2 + potential[1:]
        offdiag = np.full(diag.size - 1, -1.0 / h**2)
        weights = np.full(diag.size, h)
        return diag, offdiag, weights

    diag = 2.0 / h**2 + potential
    diag[0] += 2.0 * p.gamma / h
    offdiag = np.full(diag.size - 1, -1.0 / h**2)
    offdiag[0] = -np.sqrt(2.0) / h**2
    weights = np.full(diag.size, h)
    weights[0] = 0.5 * h
    return diag, offdiag, weights


def _pad(result: EigenResult, dirichlet: bool) -> EigenResult:
    u = result.vector
    u = np.concatenate([[0.0], u, [0.0]]) if dirichlet else np.append(u, 0.0)
    return EigenResult(result.value, u, result.residual, result.iterations)


def _check_tail(p: RobinParams, u: np.ndarray):
    h = p.grid.spacing
    tail = float(h * np.sum(u[-4:] ** 2))
    if tail > TAIL_MASS_LIMIT:
        raise TruncationError(
            f"Ground state mass {tail:.2e} within 3h of T={p.truncation:g}; increase the truncation"
        )


def _solve(p: RobinParams, dirichlet: bool, tol: Optional[float]) -> EigenResult:
    p.check_truncation()
    diag, offdiag, weights = _robin_matrix(p, dirichlet)
    result = _pad(smallest_eigenpair(diag, offdiag, tol=tol, weights=weights), dirichlet)
    _check_tail(p, result.vector)
    return result


def ground_eigenfunction(p: RobinParams, disc: Optional[Discretization] = None) -> EigenResult:
    """Positive ground state of H[gamma, xi] sampled on p.grid, normalized by the trapezoid rule."""
    tol = disc.eigen_tol if disc else None
    return _solve(p, False, tol)


def mu_robin(p: RobinParams, disc: Optional[Discretization] = None) -> float:
    return ground_eigenfunction(p, disc).value


def mu_second(p: RobinParams, disc: Optional[Discretization] = None) -> float:
    """Second eigenvalue of H[gamma, xi]."""
    tol = disc.eigen_tol if disc else None
    p.check_truncation()
    diag, offdiag, weights = _robin_matrix(p)
    ground = smallest_eigenpair(diag, offdiag, tol=tol, weights=weights)
    return second_eigenpair(diag, offdiag, ground, tol=tol, weights=weights).value


def mu_neumann(xi: float, disc: Optional[Discretization] = None) -> float:
    return mu_robin(RobinParams.build(0.0, xi, disc), disc)


def mu_dirichlet(xi: float, disc: Optional[Discretization] = None) -> float:
    p = RobinParams.build(0.0, xi, disc)
    return _solve(p, True, disc.eigen_tol if disc else None).value


def boundary_ratio(p: RobinParams, u: np.ndarray) -> float:
    """u'(0)/u(0) from a one-sided second-order difference."""
    h = p.grid.spacing
    return (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h * u[0])


def theta(gamma: float, disc: Optional[Discretization] = None, widenings: int = 2) -> DeGennesPoint:
    """
    Minimum of xi -> mu(gamma, xi) and its location.

    The minimizer satisfies xi*^2 = Theta(gamma) + gamma^2 with
    -gamma^2 <= Theta(gamma) < 1, so the search starts on
    [-0.5, sqrt(1 + gamma^2) + 1] and doubles the bracket when the minimum
    lands on an end point.
    """
    if not np.isfinite(gamma):
        raise InputError("gamma must be finite")
    disc = disc or Discretization.from_settings()

    def band(xi: float) -> float:
        return mu_robin(RobinParams.build(gamma, xi, disc), disc)

    lo, hi = -0.5, float(np.sqrt(1.0 + gamma**2)) + 1.0
    for attempt in range(widenings + 1):
        found = minimize_scalar(band, (lo, hi), tol=disc.scalar_tol)
        if not found.boundary_minimum:
            break
        width = hi - lo
        logger.warning(f"Theta({gamma:g}): minimum on bracket end {found.boundary}, widening to width {2 * width:g}")
        lo, hi = lo - width / 2.0, hi + width / 2.0
    else:
        raise BoundaryMinimumError(
            f"Theta({gamma:g}): minimum stayed on the bracket end after {widenings} widenings",
            best=found,
        )

    state = ground_eigenfunction(RobinParams.build(gamma, found.xstar, disc), disc)
    point = DeGennesPoint(gamma, found.fstar, found.xstar, float(state.vector[0]), found.evaluations)
    logger.debug(f"Theta({gamma:g}) = {point.theta:.10f} at xi = {point.xi_star:.8f}")
    return point


def theta0(disc: Optional[Discretization] = None) -> float:
    """The de Gennes constant Theta(0)."""
    return theta(0.0, disc).theta


def fit_tail_constant(gammas: Iterable[float], disc: Optional[Discretization] = None) -> float:
    """
    Empirical constant C0 in 1 - C0 * gamma * exp(-gamma^2) <= Theta(gamma),
    taken as the largest ratio (1 - Theta(gamma)) * exp(gamma^2) / gamma over
    the sampled positive gammas.
    """
    ratios = []
    for gamma in gammas:
        if gamma <= 0:
            raise InputError(f"Tail constant needs gamma > 0, got {gamma}")
        point = theta(gamma, disc)
        ratios.append((1.0 - point.theta) * np.exp(gamma**2) / gamma)
    if not ratios:
        raise InputError("Tail constant needs at least one gamma")
    return float(max(ratios))
