"""
Base Energy Functional
Abstract base class for the discretized Ginzburg-Landau functionals
"""

from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np

from glstep.services.numerics import DescentReport, minimize_energy


class EnergyFunctional(ABC):
    """A discrete energy on a fixed grid, minimized by projected descent"""

    def __init__(self, b: float):
        self.b = b

    @property
    @abstractmethod
    def name(self) -> str:
        """Short label used in logs"""
        pass

    @property
    @abstractmethod
    def weights(self) -> np.ndarray:
        """
        Quadrature weight of every unknown
        Gradient norms are measured as sqrt(sum(|g|^2 / weights))
        """
        pass

    @abstractmethod
    def energy_and_gradient(self, state: np.ndarray) -> Tuple[float, np.ndarray]:
        """
        Evaluate the discrete energy and its gradient

        Args:
            state: values at the unknowns

        Returns:
            (energy, gradient) with the gradient taken with respect to the
            real (or real and imaginary) parts of the unknowns
        """
        pass

    def energy(self, state: np.ndarray) -> float:
        return self.energy_and_gradient(state)[0]

    def project(self, state: np.ndarray) -> np.ndarray:
        """Map a trial state back onto the admissible set"""
        return state

    def precondition(self, gradient: np.ndarray) -> np.ndarray:
        return gradient / self.weights

    def minimize(
        self, init: np.ndarray, tol: Optional[float] = None, max_iter: Optional[int] = None
    ) -> Tuple[DescentReport, np.ndarray]:
        return minimize_energy(
            self.energy_and_gradient,
            init,
            tol,
            max_iter,
            weights=self.weights,
            project=self.project,
            precondition=self.precondition,
        )
