"""
Reduced Ginzburg-Landau functional on a truncated strip

    G(psi) = integral of b|(grad - i sigma A0) psi|^2 - |psi|^2 + 1/2 |psi|^4

with A0 = (-x2, 0) and sigma = 1 above the barrier, a below it. Horizontal
bonds carry the link phase U = exp(i sigma(x2) x2 hx), vertical bonds none,
so the discrete energy is exactly invariant under a global phase.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import fft

from glstep.exceptions import InputError
from glstep.functionals.base import EnergyFunctional
from glstep.services.fiber import validate_a


@dataclass(frozen=True)
class StripDisc:
    a: float
    b: float
    R: float
    m: float
    hx: float
    hy: float

    def __post_init__(self):
        validate_a(self.a)
        if not (self.b > 0 and self.R > 0 and self.hx > 0 and self.hy > 0):
            raise InputError("Strip needs b, R, hx, hy > 0")
        if self.m < 4:
            raise InputError(f"Strip truncation m must be >= 4, got {self.m}")
        if self.R / self.hx < 2 or self.m / self.hy < 1:
            raise InputError("Strip spacings are too coarse for the strip size")

    @classmethod
    def build(cls, a: float, b: float, R: float, m: float, hx: float, hy: float) -> "StripDisc":
        """Snap hx to divide R and m to a multiple of hy, so x2 = 0 is a row of nodes."""
        if not (R > 0 and hx > 0 and hy > 0):
            raise InputError("Strip needs R, hx, hy > 0")
        hx = R / max(2, int(round(R / hx)))
        m = hy * int(np.ceil(m / hy - 1e-9))
        return cls(a, b, R, m, hx, hy)

    @property
    def nx(self) -> int:
        """Interior node count along x1."""
        return int(round(self.R / self.hx)) - 1

    @property
    def ny(self) -> int:
        """Interior node count along x2."""
        return 2 * int(round(self.m / self.hy)) - 1

    @property
    def x1(self) -> np.ndarray:
        return -0.5 * self.R + self.hx * np.arange(1, self.nx + 1)

    @property
    def x2(self) -> np.ndarray:
        x2 = -self.m + self.hy * np.arange(1, self.ny + 1)
        x2[self.ny // 2] = 0.0
        return x2

    @property
    def sigma(self) -> np.ndarray:
        x2 = self.x2
        return np.where(x2 > 0, 1.0, np.where(x2 < 0, self.a, 0.0))


class StripFunctional(EnergyFunctional):
    def __init__(self, disc: StripDisc):
        super().__init__(disc.b)
        self.disc = disc
        hx, hy = disc.hx, disc.hy
        self.cell = hx * hy
        self.links = np.exp(1j * disc.sigma * disc.x2 * hx)
        self.cx = disc.b * hy / hx
        self.cy = disc.b * hx / hy
        self._weights = np.full((disc.nx, disc.ny), self.cell)

        # spectrum of b(-Delta_h) + 1 in the sine basis, times the 2 hx hy of the gradient
        kx = 2.0 - 2.0 * np.cos(np.pi * np.arange(1, disc.nx + 1) / (disc.nx + 1))
        ky = 2.0 - 2.0 * np.cos(np.pi * np.arange(1, disc.ny + 1) / (disc.ny + 1))
        laplace = kx[:, None] / hx**2 + ky[None, :] / hy**2
        self._spectrum = 2.0 * self.cell * (disc.b * laplace + 1.0)

    @property
    def name(self) -> str:
        return "strip"

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def differences(self, psi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Covariant bond differences: horizontal (nx+1, ny), vertical (nx, ny+1)."""
        padded = np.pad(psi, 1)
        dx = self.links[None, :] * padded[1:, 1:-1] - padded[:-1, 1:-1]
        dy = padded[1:-1, 1:] - padded[1:-1, :-1]
        return dx, dy

    def energy_and_gradient(self, psi: np.ndarray) -> Tuple[float, np.ndarray]:
        dx, dy = self.differences(psi)
        density = np.abs(psi) ** 2
        energy = (
            self.cx * np.sum(np.abs(dx) ** 2)
            + self.cy * np.sum(np.abs(dy) ** 2)
            + self.cell * np.sum(-density + 0.5 * density**2)
        )

        grad = np.zeros((psi.shape[0] + 2, psi.shape[1] + 2), dtype=complex)
        grad[1:, 1:-1] += 2.0 * self.cx * np.conj(self.links)[None, :] * dx
        grad[:-1, 1:-1] -= 2.0 * self.cx * dx
        grad[1:-1, 1:] += 2.0 * self.cy * dy
        grad[1:-1, :-1] -= 2.0 * self.cy * dy
        gradient = grad[1:-1, 1:-1] + 2.0 * self.cell * (density - 1.0) * psi
        return float(energy), gradient

    def project(self, psi: np.ndarray) -> np.ndarray:
        modulus = np.abs(psi)
        return np.where(modulus > 1.0, psi / np.maximum(modulus, 1.0), psi)

    def precondition(self, gradient: np.ndarray) -> np.ndarray:
        def solve(part: np.ndarray) -> np.ndarray:
            return fft.idstn(fft.dstn(part, type=1) / self._spectrum, type=1)

        return solve(gradient.real) + 1j * solve(gradient.imag)

    def quartic_mass(self, psi: np.ndarray) -> float:
        return float(self.cell * np.sum(np.abs(psi) ** 4))
