"""
Numerics - shared discretization and solver kernels

Uniform grids, the smallest eigenpair of a symmetric tridiagonal matrix,
bracketed scalar minimization and projected nonlinear conjugate-gradient
descent for discretized energy functionals.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import linalg, optimize

from glstep.config import settings
from glstep.exceptions import ConvergenceError, InputError

EnergyAndGradient = Callable[[np.ndarray], Tuple[float, np.ndarray]]


@dataclass(frozen=True)
class Grid1D:
    left: float
    right: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.left) and np.isfinite(self.right)):
            raise InputError("Grid end points must be finite")
        if self.left >= self.right:
            raise InputError(f"Grid needs left < right, got [{self.left}, {self.right}]")
        if self.n < 3:
            raise InputError(f"Grid needs at least 3 nodes, got {self.n}")

    @classmethod
    def with_spacing(cls, left: float, right: float, spacing: float) -> "Grid1D":
        """Grid starting at `left` whose right end is moved up to the next multiple of `spacing`."""
        n = int(np.ceil((right - left) / spacing - 1e-9)) + 1
        return cls(left, left + (n - 1) * spacing, n)

    @property
    def spacing(self) -> float:
        return (self.right - self.left) / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.left + self.spacing * np.arange(self.n)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w

    def index_of(self, t: float) -> int:
        """Index of the node sitting at `t`; raises if `t` is not a node."""
        i = int(round((t - self.left) / self.spacing))
        if not 0 <= i < self.n or abs(self.left + i * self.spacing - t) > 1e-9 * max(1.0, abs(t)):
            raise InputError(f"{t} is not a node of the grid")
        return i


@dataclass
class EigenResult:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int = 0


@dataclass
class ScalarMinimum:
    xstar: float
    fstar: float
    boundary: Optional[str] = None  # "lo" or "hi" when the minimum sits on the bracket
    evaluations: int = 0

    @property
    def boundary_minimum(self) -> bool:
        return self.boundary is not None


@dataclass
class DescentReport:
    energy: float
    iterations: int
    grad_norm: float
    converged: bool
    energies: List[float] = field(default_factory=list)


def _check_finite(name: str, values: np.ndarray):
    if not np.all(np.isfinite(values)):
        raise InputError(f"{name} contains NaN or Inf entries")


def _tridiagonal_matvec(diag: np.ndarray, offdiag: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = diag * x
    y[:-1] += offdiag * x[1:]
    y[1:] += offdiag * x[:-1]
    return y


def _validate_tridiagonal(diag, offdiag) -> Tuple[np.ndarray, np.ndarray]:
    d = np.asarray(diag, dtype=float)
    e = np.asarray(offdiag, dtype=float)
    if d.ndim != 1 or d.size < 3:
        raise InputError(f"Tridiagonal matrix needs n >= 3, got {d.size}")
    if e.shape != (d.size - 1,):
        raise InputError(f"Off-diagonal must have {d.size - 1} entries, got {e.size}")
    _check_finite("diag", d)
    _check_finite("offdiag", e)
    return d, e


def infinity_norm(diag, offdiag) -> float:
    """max(1, ||A||_inf) for the symmetric tridiagonal matrix A; the scale of the eigen residual test."""
    rows = np.abs(np.asarray(diag, dtype=float))
    e = np.abs(np.asarray(offdiag, dtype=float))
    rows[:-1] += e
    rows[1:] += e
    return max(1.0, float(rows.max()))


def _inverse_iteration(
    d: np.ndarray,
    e: np.ndarray,
    shift: float,
    tol: float,
    max_iter: int,
    deflate: Optional[np.ndarray] = None,
) -> EigenResult:
    """
    Shifted inverse iteration from the all-ones vector. Stops once the
    residual ||A x - value x|| of the unit iterate is at most tol * max(1, ||A||_inf),
    so `tol` is relative to the matrix scale (1/h^2 for a second difference).
    """
    n = d.size
    anorm = infinity_norm(d, e)
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[1, :] = d - shift
    ab[2, :-1] = e
    x = np.ones(n)
    if deflate is not None:
        x -= deflate * np.dot(deflate, x)
        x[::2] += 1.0  # the all-ones vector may be nearly parallel to the ground state
        x -= deflate * np.dot(deflate, x)
    x /= np.linalg.norm(x)

    best: Optional[EigenResult] = None
    for it in range(1, max_iter + 1):
        if deflate is None:
            y = linalg.solveh_banded(ab[:2], x, lower=False, check_finite=False)
        else:
            y = linalg.solve_banded((1, 1), ab, x, check_finite=False)
            y -= deflate * np.dot(deflate, y)
        x = y / np.linalg.norm(y)
        ax = _tridiagonal_matvec(d, e, x)
        value = float(np.dot(x, ax))
        residual = float(np.linalg.norm(ax - value * x))
        if best is None or residual < best.residual:
            best = EigenResult(value, x.copy(), residual, it)
        if residual <= tol * anorm:
            break
    else:
        raise ConvergenceError(
            f"Inverse iteration did not reach residual {tol * anorm:g} in {max_iter} steps "
            f"(best {best.residual:.3e})",
            best=best,
        )
    return best


def _finish(result: EigenResult, weights: Optional[np.ndarray]) -> EigenResult:
    v = result.vector
    if v.sum() < 0:
        v = -v
    if weights is not None:
        v = v / np.sqrt(weights)
    return EigenResult(result.value, v, result.residual, result.iterations)


def smallest_eigenpair(
    diag: Sequence[float],
    offdiag: Sequence[float],
    tol: Optional[float] = None,
    weights: Optional[np.ndarray] = None,
    max_iter: int = 50,
) -> EigenResult:
    """
    Ground eigenpair of a symmetric tridiagonal matrix.

    The eigenvalue is located by bisection and polished by shifted inverse
    iteration (banded Cholesky) from the all-ones vector. The returned vector
    has unit 2-norm and positive mean. When `weights` are given the matrix is
    understood as W^{1/2} A W^{-1/2}-symmetrized and the vector is mapped back
    to grid samples normalized so that sum(weights * u**2) == 1.

    Convergence is declared when ||A v - value v|| <= tol * max(1, ||A||_inf).
    """
    tol = settings.eigen_tol if tol is None else tol
    if not tol > 0:
        raise InputError("Eigen tolerance must be positive")
    d, e = _validate_tridiagonal(diag, offdiag)
    lam = float(
        linalg.eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))[0]
    )
    shift = lam - 1e-8 * max(1.0, abs(lam))
    result = _inverse_iteration(d, e, shift, tol, max_iter)
    logger.debug(f"Ground eigenpair n={d.size} value={result.value:.12g} residual={result.residual:.2e}")
    return _finish(result, weights)


def second_eigenpair(
    diag: Sequence[float],
    offdiag: Sequence[float],
    ground: EigenResult,
    tol: Optional[float] = None,
    weights: Optional[np.ndarray] = None,
    max_iter: int = 50,
) -> EigenResult:
    """
    Second eigenpair by inverse iteration deflated against the ground vector.

    Uses the same relative stopping rule as `smallest_eigenpair`:
    ||A v - value v|| <= tol * max(1, ||A||_inf) on the unit vector.
    """
    tol = settings.eigen_tol if tol is None else tol
    d, e = _validate_tridiagonal(diag, offdiag)
    g = ground.vector if weights is None else ground.vector * np.sqrt(weights)
    g = g / np.linalg.norm(g)
    lam2 = float(
        linalg.eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(1, 1))[0]
    )
    shift = lam2 - 1e-8 * max(1.0, abs(lam2))
    result = _inverse_iteration(d, e, shift, tol, max_iter, deflate=g)
    return _finish(result, weights)


def minimize_scalar(
    f: Callable[[float], float],
    bracket: Tuple[float, float],
    tol: Optional[float] = None,
) -> ScalarMinimum:
    """
    Bounded golden-section/parabolic (Brent) minimization of `f` on `bracket`.

    A minimizer found within a few tolerances of an end point is checked
    against the end point value; if the end point is at least as low the
    result is flagged as a boundary minimum so the caller can widen the
    bracket.
    """
    tol = settings.scalar_tol if tol is None else tol
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise InputError(f"Bracket end points must be finite, got ({lo}, {hi})")
    if lo >= hi:
        raise InputError(f"Bracket needs lo < hi, got ({lo}, {hi})")

    res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": tol})
    xstar, fstar = float(res.x), float(res.fun)
    if not np.isfinite(fstar):
        raise InputError(f"Objective is not finite at {xstar}")
    evaluations = int(res.nfev)

    boundary = None
    slack = 10.0 * tol + 1e-9 * (hi - lo)
    for side, end in (("lo", lo), ("hi", hi)):
        if abs(xstar - end) <= slack:
            f_end = float(f(end))
            evaluations += 1
            if f_end <= fstar:
                xstar, fstar, boundary = end, f_end, side
            elif abs(xstar - end) <= tol:
                boundary = side
    if boundary:
        logger.debug(f"Scalar minimum on bracket end {boundary}: x={xstar:.6g}")
    return ScalarMinimum(xstar, fstar, boundary, evaluations)


def _inner(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.real(np.vdot(x, y)))


def minimize_energy(
    energy_and_gradient: EnergyAndGradient,
    init: np.ndarray,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    *,
    weights: Optional[np.ndarray] = None,
    project: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    precondition: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> Tuple[DescentReport, np.ndarray]:
    """
    Projected, preconditioned Polak-Ribiere+ descent with backtracking.

    `energy_and_gradient` returns the discrete energy and its gradient with
    respect to the real (or real and imaginary) nodal values. The gradient is
    measured in the quadrature metric: grad_norm = sqrt(sum(|g|^2 / weights)).
    `project` is applied after every trial step; a step that the projection
    altered restarts the conjugate direction. Every accepted step satisfies an
    Armijo decrease condition, so the recorded energies never increase beyond
    round-off.

    Line-search failure raises ConvergenceError carrying the last state and
    report; hitting `max_iter` returns a report with converged=False.
    """
    tol = settings.descent_tol if tol is None else tol
    max_iter = settings.descent_max_iter if max_iter is None else max_iter
    w = 1.0 if weights is None else weights

    def grad_norm(g: np.ndarray) -> float:
        return float(np.sqrt(np.sum(np.abs(g) ** 2 / w)))

    def direction_of(g: np.ndarray) -> np.ndarray:
        return precondition(g) if precondition is not None else g / w

    x = np.array(init, copy=True)
    if project is not None:
        x = project(x)
    energy, g = energy_and_gradient(x)
    if not np.isfinite(energy) or not np.all(np.isfinite(g)):
        raise InputError("Energy or gradient is NaN at the initial state")

    energies = [float(energy)]
    pg = direction_of(g)
    d = -pg
    gnorm = grad_norm(g)
    alpha = 1.0
    c1 = 1e-4
    k = 0
    while gnorm > tol and k < max_iter:
        slope = _inner(g, d)
        if slope >= 0.0:
            d = -pg
            slope = _inner(g, d)
        slack = 8.0 * np.finfo(float).eps * max(1.0, abs(energy))

        trial = alpha
        accepted = None
        for _ in range(settings.line_search_max):
            x_new = x + trial * d
            if project is not None:
                x_new = project(x_new)
            e_new, g_new = energy_and_gradient(x_new)
            predicted = _inner(g, x_new - x)
            if np.isfinite(e_new) and e_new <= energy + c1 * min(predicted, 0.0) + slack:
                accepted = (trial, x_new, e_new, g_new)
                break
            # quadratic model along the step, safeguarded into [0.1, 0.5] of the trial
            curvature = e_new - energy - trial * slope if np.isfinite(e_new) else np.inf
            quad = -slope * trial**2 / (2.0 * curvature) if curvature > 0 else 0.5 * trial
            trial = float(np.clip(quad, 0.1 * trial, 0.5 * trial))
        if accepted is None:
            report = DescentReport(energy, k, gnorm, False, energies)
            raise ConvergenceError(
                f"Line search failed after {k} iterations (grad norm {gnorm:.3e})", best=x, report=report
            )

        trial, x_new, e_new, g_new = accepted
        clipped = project is not None and not np.allclose(x_new, x + trial * d, rtol=0.0, atol=1e-15)
        pg_new = direction_of(g_new)
        beta = max(0.0, _inner(g_new - g, pg_new) / max(_inner(g, pg), 1e-300))
        d = -pg_new if clipped else -pg_new + beta * d

        x, energy, g, pg = x_new, float(e_new), g_new, pg_new
        gnorm = grad_norm(g)
        energies.append(energy)
        alpha = min(2.0 * trial, 1e6)
        k += 1
        if k % 200 == 0:
            logger.debug(f"Descent iteration {k}: energy={energy:.12g} grad={gnorm:.3e}")

    converged = gnorm <= tol
    if not converged:
        logger.warning(f"Descent stopped at max_iter={max_iter} with grad norm {gnorm:.3e}")
    return DescentReport(energy, k, gnorm, converged, energies), x


def gradient_check(
    energy_and_gradient: EnergyAndGradient,
    state: np.ndarray,
    direction: np.ndarray,
    eps: float = 1e-6,
) -> float:
    """Relative error between the analytic directional derivative and a central difference."""
    _, g = energy_and_gradient(state)
    analytic = _inner(g, direction)
    e_plus, _ = energy_and_gradient(state + eps * direction)
    e_minus, _ = energy_and_gradient(state - eps * direction)
    numeric = (e_plus - e_minus) / (2.0 * eps)
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-12)


def fitted_order(spacings: Sequence[float], values: Sequence[float], reference: Optional[float] = None) -> float:
    """
    Observed convergence order of `values` computed on grids `spacings`.

    With a reference value the order is the least-squares slope of
    log|value - reference| against log h; without one, three successive
    refinements by a common ratio are combined Richardson-style.
    """
    h = np.asarray(spacings, dtype=float)
    v = np.asarray(values, dtype=float)
    if reference is not None:
        slope, _ = np.polyfit(np.log(h), np.log(np.abs(v - reference)), 1)
        return float(slope)
    if h.size != 3:
        raise InputError("Richardson order without a reference needs exactly three grids")
    ratio = h[0] / h[1]
    return float(np.log(abs((v[0] - v[1]) / (v[1] - v[2]))) / np.log(ratio))
