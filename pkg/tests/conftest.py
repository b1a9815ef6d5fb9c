"""
Shared fixtures: coarse discretizations and cached spectral constants
"""
import pytest

from glstep.config import Discretization
from glstep.services import fiber, halfline

# Coarse but converged enough for the assertions in this suite
COARSE_SPACING = 0.01
COARSE_PROFILE_SPACING = 0.02


@pytest.fixture(scope="session")
def disc() -> Discretization:
    return Discretization.from_settings(spacing=COARSE_SPACING, profile_spacing=COARSE_PROFILE_SPACING)


@pytest.fixture(scope="session")
def default_disc() -> Discretization:
    """The library defaults, for assertions at the documented tolerances."""
    return Discretization.from_settings()


@pytest.fixture(scope="session")
def theta0(disc) -> float:
    return halfline.theta0(disc)


@pytest.fixture(scope="session")
def curves(disc):
    """beta_a curves, computed once per a."""
    cache = {}

    def get(a: float) -> fiber.DispersionCurve:
        if a not in cache:
            cache[a] = fiber.beta(a, disc)
        return cache[a]

    return get
