from enum import Enum
from typing import Annotated, Any, Dict, List, Optional

import numpy as np
from pydantic import AfterValidator, BaseModel, BeforeValidator, Field, field_validator, model_validator

from glstep import __version__


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class EnergySource(str, Enum):
    GL1D = "gl1d"
    STRIP = "strip"


def parse_grid(value: Any) -> List[float]:
    """'lo:hi:step' (inclusive of hi), 'x,y,z', a number or a list."""
    if value is None:
        return []
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    text = str(value).strip()
    if not text:
        return []
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be lo:hi:step, got {text!r}")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise ValueError(f"grid needs step > 0 and hi >= lo, got {text!r}")
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return [round(lo + i * step, 12) for i in range(count)]
    return [float(p) for p in text.split(",") if p.strip()]


def check_a(a: float) -> float:
    if not np.isfinite(a) or a == 0 or a >= 1 or a < -1:
        raise ValueError(f"a must lie in [-1, 1) without 0, got {a}")
    return a


Grid = Annotated[List[float], BeforeValidator(parse_grid)]
FieldRatio = Annotated[float, AfterValidator(check_a)]


class RunConfig(BaseModel):
    """Options shared by every subcommand"""
    tol: Optional[float] = Field(None, gt=0, description="Solver tolerance override")
    out: Optional[str] = Field(None, description="Output path (stem for sidecar files)")
    format: OutputFormat = Field(default=OutputFormat.CSV, description="Primary table format")
    threads: int = Field(default=1, ge=1, description="Worker processes for sweeps")
    stdout: bool = Field(default=False, description="Write the primary table to stdout")
    timing: bool = Field(default=False, description="Record wall time in provenance")
    spacing: Optional[float] = Field(None, gt=0, description="1D grid spacing override")

    class Config:
        extra = "forbid"


class DegennesConfig(RunConfig):
    grid: Grid = Field(..., min_length=1, description="gamma values")


class FiberConfig(RunConfig):
    a: FieldRatio = Field(..., description="Field ratio below the barrier")
    grid: Grid = Field(default_factory=lambda: parse_grid("-6:1:0.05"), description="xi samples")


class Gl1dConfig(RunConfig):
    a: FieldRatio
    b: float = Field(..., gt=0)

    @model_validator(mode="after")
    def negative_a(self):
        if self.a > 0:
            raise ValueError("the effective 1D energy needs a in [-1, 0)")
        if self.b <= 1.0 / abs(self.a):
            raise ValueError(f"b = {self.b} is in the bulk regime b <= 1/|a| = {1.0 / abs(self.a)}")
        return self


class SurfaceConfig(RunConfig):
    grid: Grid = Field(..., min_length=1, description="b values, each >= 1")

    @field_validator("grid")
    @classmethod
    def at_least_one(cls, v: List[float]) -> List[float]:
        if min(v) < 1:
            raise ValueError("surface energy needs every b >= 1")
        return v


class StripConfig(RunConfig):
    a: FieldRatio
    b: float = Field(..., gt=0)
    R: float = Field(default=8.0, gt=0)
    m: float = Field(default=6.0, ge=4, description="x2 truncation")
    hx: Optional[float] = Field(None, gt=0)
    hy: Optional[float] = Field(None, gt=0)
    dump: Optional[str] = Field(None, description="Binary dump path for the field")

    @model_validator(mode="after")
    def not_bulk(self):
        if self.b < 1.0 / abs(self.a):
            raise ValueError(f"b = {self.b} < 1/|a| = {1.0 / abs(self.a)} is the bulk regime, not covered")
        return self


class BarrierConfig(RunConfig):
    a: FieldRatio
    b: float = Field(..., gt=0)
    schedule: Optional[List[float]] = Field(None, description="Strip widths R")
    hx: Optional[float] = Field(None, gt=0)
    hy: Optional[float] = Field(None, gt=0)

    @field_validator("schedule", mode="before")
    @classmethod
    def schedule_list(cls, v: Any) -> Optional[List[float]]:
        return parse_grid(v) or None

    @model_validator(mode="after")
    def outside_bulk(self):
        if self.b <= 1.0 / abs(self.a):
            raise ValueError(f"b = {self.b} <= 1/|a| = {1.0 / abs(self.a)} is the bulk regime, not covered")
        return self


class PhaseConfig(RunConfig):
    a: Grid = Field(..., min_length=1, description="Field ratios")
    grid: Grid = Field(..., min_length=1, description="b values")
    energies: bool = Field(default=False, description="Energy mode instead of sign-only")
    source: EnergySource = Field(default=EnergySource.GL1D)
    geometry: Grid = Field(default_factory=lambda: [1.0, 1.0, 1.0], description="|Γ|, |∂Ω1|, |∂Ω2|")

    @field_validator("a")
    @classmethod
    def valid_ratios(cls, v: List[float]) -> List[float]:
        return [check_a(a) for a in v]

    @field_validator("geometry")
    @classmethod
    def three_lengths(cls, v: List[float]) -> List[float]:
        if len(v) != 3 or min(v) < 0:
            raise ValueError("geometry needs three non-negative lengths")
        return v


class ResultRecord(BaseModel):
    command: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    outputs: Dict[str, Any] = Field(default_factory=dict)
    provenance: Dict[str, Any] = Field(default_factory=dict)
    version: str = Field(default=__version__)


COMMAND_CONFIGS = {
    "degennes": DegennesConfig,
    "fiber": FiberConfig,
    "gl1d": Gl1dConfig,
    "surface": SurfaceConfig,
    "strip": StripConfig,
    "barrier": BarrierConfig,
    "phase": PhaseConfig,
}
