"""
Discrete energy functionals
"""
from .base import EnergyFunctional
from .profile import ProfileFunctional
from .strip import StripDisc, StripFunctional

__all__ = ["EnergyFunctional", "ProfileFunctional", "StripDisc", "StripFunctional"]
