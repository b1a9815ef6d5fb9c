"""
Fiber operator of the magnetic step

h_a[xi] = -d^2/dt^2 + V_a(xi, t) on the whole line with
V_a(xi, t) = (xi + a t)^2 for t < 0 and (xi + t)^2 for t > 0.
Band function mu_a(xi), barrier constant beta_a and its minimizer zeta_a,
de Gennes parameter, Feynman-Hellmann derivative and analytic bounds.
"""
from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import optimize

from glstep.config import Discretization, settings
from glstep.exceptions import BoundaryMinimumError, ConditioningError, DomainError, InputError, TruncationError
from glstep.services import halfline
from glstep.services.numerics import Grid1D, minimize_scalar, smallest_eigenpair

NEAR_TIE = 1e-6
MIN_BOUNDARY_VALUE = 1e-12


def validate_a(a: float, allow_positive: bool = True):
    if not np.isfinite(a) or a == 0 or a >= 1 or a < -1:
        raise DomainError(f"Field ratio a must lie in [-1, 1) without 0, got {a}")
    if not allow_positive and a > 0:
        raise DomainError(f"This operation needs a in [-1, 0), got {a}")


@dataclass(frozen=True)
class FiberOperator:
    a: float
    xi: float
    truncation_neg: float
    truncation_pos: float
    n: int

    def __post_init__(self):
        validate_a(self.a)
        if not np.isfinite(self.xi):
            raise InputError("xi must be finite")
        if self.truncation_neg <= 0 or self.truncation_pos <= 0 or self.n < 3:
            raise InputError("Fiber truncations must be positive and n >= 3")

    @classmethod
    def build(cls, a: float, xi: float, disc: Optional[Discretization] = None) -> "FiberOperator":
        """
        Truncations from the potential-level rule on each side; both are
        multiples of the spacing so t = 0 is a node. The positive side uses
        the same rule as the half-line family, so for a = -1 the even half
        reproduces the Neumann problem at -xi exactly.
        """
        disc = disc or Discretization.from_settings()
        validate_a(a)
        h = disc.spacing
        reach = halfline.far_field_reach(1.0 + max(0.0, xi) ** 2, disc)
        pos = halfline.snap_up(max(disc.min_truncation, -xi + reach), h)
        neg = halfline.snap_up(max(disc.min_truncation, xi / a + reach / abs(a)), h)
        n = int(round((neg + pos) / h)) + 1
        return cls(a, xi, neg, pos, n)

    @property
    def grid(self) -> Grid1D:
        return Grid1D(-self.truncation_neg, self.truncation_pos, self.n)

    @property
    def zero_index(self) -> int:
        return int(round(self.truncation_neg / self.grid.spacing))

    def potential(self, t: np.ndarray) -> np.ndarray:
        return potential(self.a, self.xi, t)

    def moment_weight(self, t: np.ndarray) -> np.ndarray:
        """dV/dxi / 2, that is xi + sigma(t) t."""
        return self.xi + np.where(t < 0, self.a * t, t)


def potential(a: float, xi: float, t: np.ndarray) -> np.ndarray:
    return np.where(t < 0, (xi + a * t) ** 2, (xi + t) ** 2)


@dataclass
class FiberState:
    operator: FiberOperator
    value: float
    values: np.ndarray
    residual: float

    @property
    def grid(self) -> Grid1D:
        return self.operator.grid

    @property
    def f0(self) -> float:
        return float(self.values[self.operator.zero_index])


@dataclass
class DeGennesParamSample:
    xi: float
    gamma_a: float
    left: float
    right: float


@dataclass
class DispersionCurve:
    a: float
    xi_samples: np.ndarray
    mu_samples: np.ndarray
    beta: float
    zeta: Optional[float] = None
    f0: Optional[float] = None
    nu: Optional[float] = None
    near_ties: int = 0
    extra: dict = field(default_factory=dict)


@dataclass
class TrialBound:
    a: float
    gamma: float
    m: float
    theta: float
    phi0: float
    value: float  # sqrt|a| Theta / (1/sqrt|a| + phi0^2 / 2m)
    simple: float  # |a| Theta(gamma)


def ground_state(a: float, xi: float, disc: Optional[Discretization] = None) -> FiberState:
    """Positive normalized ground state f_{a,xi} on the truncated line, zero at both ends."""
    disc = disc or Discretization.from_settings()
    op = FiberOperator.build(a, xi, disc)
    grid = op.grid
    h = grid.spacing
    t = grid.nodes[1:-1]
    diag = 2.0 / h**2 + op.potential(t)
    offdiag = np.full(diag.size - 1, -1.0 / h**2)
    result = smallest_eigenpair(diag, offdiag, tol=disc.eigen_tol, weights=np.full(diag.size, h))
    values = np.concatenate([[0.0], result.vector, [0.0]])
    tail = h * max(np.sum(values[:4] ** 2), np.sum(values[-4:] ** 2))
    if tail > halfline.TAIL_MASS_LIMIT:
        raise TruncationError(f"Fiber ground state (a={a:g}, xi={xi:g}) reaches the truncation ends")
    return FiberState(op, result.value, values, result.residual)


def mu_fiber(a: float, xi: float, disc: Optional[Discretization] = None) -> float:
    return ground_state(a, xi, disc).value


def dispersion(a: float, xis: Iterable[float], disc: Optional[Discretization] = None) -> DispersionCurve:
    """Samples of the band function without locating its minimum."""
    xs = np.asarray(list(xis), dtype=float)
    mus = np.array([mu_fiber(a, x, disc) for x in xs])
    i = int(np.argmin(mus)) if mus.size else 0
    beta_est = float(mus[i]) if mus.size else float("nan")
    return DispersionCurve(a, xs, mus, beta_est, float(xs[i]) if xs.size else None)


def beta(a: float, disc: Optional[Discretization] = None) -> DispersionCurve:
    """
    beta_a = inf over xi of mu_a(xi).

    For a in (0, 1) the band decreases to a and the infimum is not attained,
    so beta = a is returned without sampling. For a in [-1, 0) the band is
    scanned on the configured window and the best sample is refined by
    bounded Brent minimization between its neighbours.
    """
    validate_a(a)
    disc = disc or Discretization.from_settings()
    if a > 0:
        return DispersionCurve(a, np.array([]), np.array([]), float(a))

    xs = np.arange(settings.xi_scan_lo, settings.xi_scan_hi + 0.5 * settings.xi_scan_step, settings.xi_scan_step)
    curve = dispersion(a, xs, disc)
    mus = curve.mu_samples
    interior = [i for i in range(1, xs.size - 1) if mus[i] <= mus[i - 1] and mus[i] <= mus[i + 1]]
    if not interior:
        raise BoundaryMinimumError(
            f"beta({a:g}): band minimum on the scan window end [{xs[0]:g}, {xs[-1]:g}]", best=curve
        )
    best = min(interior, key=lambda i: (mus[i], xs[i]))
    ties = [i for i in interior if i != best and mus[i] - mus[best] <= NEAR_TIE]
    if ties:
        logger.warning(
            f"beta({a:g}): {len(ties) + 1} coarse minima within {NEAR_TIE:g}; possible non-uniqueness of zeta, "
            f"reporting the smallest"
        )
        best = min([best] + ties, key=lambda i: xs[i])

    found = minimize_scalar(lambda x: mu_fiber(a, x, disc), (xs[best - 1], xs[best + 1]), tol=disc.scalar_tol)
    state = ground_state(a, found.xstar, disc)
    h = state.grid.spacing
    curve.beta = found.fstar
    curve.zeta = found.xstar
    curve.f0 = state.f0
    curve.nu = float(h * np.sum(state.values**4))
    curve.near_ties = len(ties)
    logger.info(f"beta({a:g}) = {curve.beta:.10f} at zeta = {curve.zeta:.8f}")
    return curve


def degennes_param(a: float, xi: float, disc: Optional[Discretization] = None) -> DeGennesParamSample:
    """gamma_a(xi) = f'(0)/f(0) from one-sided second-order differences on each side of t = 0."""
    state = ground_state(a, xi, disc)
    return _degennes_from_state(state)


def _degennes_from_state(state: FiberState) -> DeGennesParamSample:
    f = state.values
    k = state.operator.zero_index
    h = state.grid.spacing
    if f[k] < MIN_BOUNDARY_VALUE:
        raise ConditioningError(f"f(0) = {f[k]:.3e} is too small for the de Gennes parameter")
    right = (-3.0 * f[k] + 4.0 * f[k + 1] - f[k + 2]) / (2.0 * h * f[k])
    left = (3.0 * f[k] - 4.0 * f[k - 1] + f[k - 2]) / (2.0 * h * f[k])
    return DeGennesParamSample(state.operator.xi, 0.5 * (left + right), left, right)


def mu_fiber_derivative(a: float, xi: float, disc: Optional[Discretization] = None) -> float:
    """Closed form (1 - 1/a) (gamma_a^2 + mu_a - xi^2) f(0)^2 of d mu_a / d xi."""
    validate_a(a, allow_positive=False)
    state = ground_state(a, xi, disc)
    sample = _degennes_from_state(state)
    return (1.0 - 1.0 / a) * (sample.gamma_a**2 + state.value - xi**2) * state.f0**2


def mu_fiber_moment_derivative(a: float, xi: float, disc: Optional[Discretization] = None) -> float:
    """d mu_a / d xi as 2 * integral of (xi + sigma t) f^2."""
    state = ground_state(a, xi, disc)
    t = state.grid.nodes
    h = state.grid.spacing
    return float(2.0 * h * np.sum(state.operator.moment_weight(t) * state.values**2))


def sandwich_bounds(a: float, xi: float, disc: Optional[Discretization] = None) -> Tuple[float, float]:
    """Neumann lower and Dirichlet upper envelopes of mu_a(xi) from the two half-line problems."""
    validate_a(a)
    s = np.sqrt(abs(a))
    x = xi / s if a > 0 else -xi / s
    lower = min(halfline.mu_neumann(-xi, disc), abs(a) * halfline.mu_neumann(x, disc))
    upper = min(halfline.mu_dirichlet(-xi, disc), abs(a) * halfline.mu_dirichlet(x, disc))
    return lower, upper


def trial_upper_bound(a: float, disc: Optional[Discretization] = None) -> TrialBound:
    """
    Upper bound on beta_a for a in (-1, 0) from gluing the Robin ground state
    with gamma = sqrt(1 / (2|a|(1-|a|))) to an exponential tail of rate
    m = sqrt|a| gamma.
    """
    if not np.isfinite(a) or not -1.0 < a < 0.0:
        raise DomainError(f"Trial bound needs a in (-1, 0), got {a}")
    abs_a = abs(a)
    gamma = float(np.sqrt(1.0 / (2.0 * abs_a * (1.0 - abs_a))))
    m = np.sqrt(abs_a) * gamma
    point = halfline.theta(gamma, disc)
    value = np.sqrt(abs_a) * point.theta / (1.0 / np.sqrt(abs_a) + point.phi0**2 / (2.0 * m))
    return TrialBound(a, gamma, float(m), point.theta, point.phi0, float(value), abs_a * point.theta)


def xi_bracket(
    a: float, b: float, disc: Optional[Discretization] = None, curve: Optional[DispersionCurve] = None
) -> Tuple[float, float]:
    """The two roots xi1 < zeta_a < xi2 of mu_a(xi) = 1/b."""
    validate_a(a, allow_positive=False)
    disc = disc or Discretization.from_settings()
    curve = curve or beta(a, disc)
    if b <= 1.0 / abs(a):
        raise DomainError(f"b = {b:g} must exceed 1/|a| = {1.0 / abs(a):g}")
    if b >= 1.0 / curve.beta:
        raise DomainError(f"b = {b:g} must be below 1/beta_a = {1.0 / curve.beta:g}")
    level = 1.0 / b

    def shifted(x: float) -> float:
        return mu_fiber(a, x, disc) - level

    zeta = curve.zeta
    # mu_a tends to |a| > 1/b on the left and grows without bound on the right
    lo, step = zeta - 1.0, 1.0
    while shifted(lo) < 0:
        step *= 2.0
        lo = zeta - step
        if step > 64:
            raise DomainError(f"No left root of mu_a = 1/b for a={a:g}, b={b:g}")
    hi, step = zeta + 1.0, 1.0
    while shifted(hi) < 0:
        step *= 2.0
        hi = zeta + step
    xi1 = optimize.bisect(shifted, lo, zeta, xtol=settings.root_tol, maxiter=200)
    xi2 = optimize.bisect(shifted, zeta, hi, xtol=settings.root_tol, maxiter=200)
    return float(xi1), float(xi2)


def ordering_report(a: float, theta0: float, disc: Optional[Discretization] = None) -> dict:
    """Empirical order of beta_a against Theta0 (not settled analytically for a in (-1, -Theta0))."""
    curve = beta(a, disc)
    order = "beta<theta0" if curve.beta < theta0 else "beta>theta0" if curve.beta > theta0 else "equal"
    return {"a": a, "beta": curve.beta, "theta0": theta0, "ordering": order, "difference": curve.beta - theta0}
