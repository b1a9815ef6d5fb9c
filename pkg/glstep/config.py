"""
glstep Configuration Settings
"""
from dataclasses import dataclass, replace
from typing import List, Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Solver tolerances
    eigen_tol: float = 1e-10
    scalar_tol: float = 1e-8
    descent_tol: float = 1e-7
    descent_max_iter: int = 5000
    line_search_max: int = 40
    root_tol: float = 1e-12

    # 1D grids (half-line, fiber, effective 1D energies)
    spacing: float = 0.005
    profile_spacing: float = 0.01
    min_truncation: float = 12.0
    truncation_margin: float = 25.0

    # Coarse scan window for the band minimum
    xi_scan_lo: float = -6.0
    xi_scan_hi: float = 1.0
    xi_scan_step: float = 0.05

    # Strip problem
    strip_spacing: float = 0.05
    m_schedule: List[float] = [4.0, 6.0, 9.0, 13.0, 19.0]
    m_gap_tol: float = 1e-6
    r_schedule: List[float] = [4.0, 6.0, 9.0, 13.5, 20.0]

    # Sweeps
    threads: int = 1

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None

    @field_validator("eigen_tol", "scalar_tol", "descent_tol", "root_tol", "spacing", "profile_spacing", "strip_spacing")
    @classmethod
    def positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("must be positive")
        return v

    @field_validator("m_schedule")
    @classmethod
    def m_schedule_valid(cls, v: List[float]) -> List[float]:
        if not v or min(v) < 4 or sorted(v) != list(v):
            raise ValueError("m schedule must be increasing with every m >= 4")
        return v

    class Config:
        env_prefix = "GLSTEP_"
        env_file = ".env"
        case_sensitive = False
        extra = "ignore"  # Ignore unknown environment variables


@dataclass(frozen=True)
class Discretization:
    """Grid and tolerance choices shared by the 1D spectral and profile problems."""

    spacing: float
    profile_spacing: float
    min_truncation: float
    truncation_margin: float
    eigen_tol: float
    scalar_tol: float
    descent_tol: float
    descent_max_iter: int

    @classmethod
    def from_settings(cls, source: Optional[Settings] = None, **overrides) -> "Discretization":
        source = source or settings
        disc = cls(
            spacing=source.spacing,
            profile_spacing=source.profile_spacing,
            min_truncation=source.min_truncation,
            truncation_margin=source.truncation_margin,
            eigen_tol=source.eigen_tol,
            scalar_tol=source.scalar_tol,
            descent_tol=source.descent_tol,
            descent_max_iter=source.descent_max_iter,
        )
        return replace(disc, **overrides) if overrides else disc

    def with_spacing(self, spacing: float) -> "Discretization":
        return replace(self, spacing=spacing)

    def for_profiles(self) -> "Discretization":
        """The same choices on the coarser grid used by the 1D Ginzburg-Landau profiles."""
        return replace(self, spacing=self.profile_spacing)


# Global settings instance
settings = Settings()
