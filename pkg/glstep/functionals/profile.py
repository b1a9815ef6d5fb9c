"""
One-dimensional Ginzburg-Landau profile functional

    E(f) = integral of b|f'|^2 + (b V - 1)|f|^2 + 1/2 |f|^4

on a truncated line (Dirichlet at both ends) or half-line (natural Neumann
condition at t = 0, Dirichlet at the far end).
"""
from typing import Tuple

import numpy as np
from scipy import linalg

from glstep.functionals.base import EnergyFunctional
from glstep.services.numerics import Grid1D


class ProfileFunctional(EnergyFunctional):
    def __init__(self, b: float, grid: Grid1D, potential: np.ndarray, half_line: bool = False):
        super().__init__(b)
        self.grid = grid
        self.half_line = half_line
        h = grid.spacing
        self.h = h
        # unknowns: all nodes but the Dirichlet ones
        self.free = slice(0, grid.n - 1) if half_line else slice(1, grid.n - 1)
        self.potential = np.asarray(potential, dtype=float)[self.free]
        w = np.full(self.potential.size, h)
        if half_line:
            w[0] = 0.5 * h
        self._weights = w

        # P = 2 (b K + b W V + W), the Hessian at f = 0 made positive
        stiffness = np.full(w.size, 2.0 / h)
        if half_line:
            stiffness[0] = 1.0 / h
        bands = np.zeros((2, w.size))
        bands[0, 1:] = -2.0 * b / h
        bands[1] = 2.0 * (b * stiffness + w * (b * self.potential + 1.0))
        self._factor = linalg.cholesky_banded(bands, lower=False)

    @property
    def name(self) -> str:
        return "profile-half-line" if self.half_line else "profile-line"

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def expand(self, f: np.ndarray) -> np.ndarray:
        """Values on every grid node, zeros at the Dirichlet ends."""
        full = np.zeros(self.grid.n)
        full[self.free] = f
        return full

    def restrict(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=float)[self.free].copy()

    def energy_and_gradient(self, f: np.ndarray) -> Tuple[float, np.ndarray]:
        full = self.expand(f)
        jumps = np.diff(full)
        w = self._weights
        kinetic = self.b * np.sum(jumps**2) / self.h
        local = np.sum(w * ((self.b * self.potential - 1.0) * f**2 + 0.5 * f**4))

        grad_full = np.zeros_like(full)
        coef = 2.0 * self.b / self.h
        grad_full[:-1] -= coef * jumps
        grad_full[1:] += coef * jumps
        grad = grad_full[self.free] + 2.0 * w * ((self.b * self.potential - 1.0) * f + f**3)
        return float(kinetic + local), grad

    def project(self, f: np.ndarray) -> np.ndarray:
        return np.maximum(f, 0.0)

    def precondition(self, gradient: np.ndarray) -> np.ndarray:
        return linalg.cho_solve_banded((self._factor, False), gradient)

    def mass(self, f: np.ndarray) -> float:
        return float(np.sum(self._weights * f**2))
