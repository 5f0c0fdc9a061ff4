"""Pydantic schemas for reports, sweep specifications and sidecar metadata."""
from datetime import datetime
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

AxisName = Literal[
    "Delta1",
    "Delta2",
    "Delta_m1",
    "Delta_m2",
    "hop_Gamma",
    "Delta_sym",
    "Delta_antisym",
]

MODE_IDS = ("c1", "c2", "m1", "m2", "b1", "b2")


class ValidationCheck(BaseModel):
    """Single parameter check."""
    check_name: str = Field(..., description="Name of the check")
    passed: bool = Field(..., description="Whether check passed")
    details: str | None = Field(None, description="Violation message")


class ValidationReport(BaseModel):
    """Result of validating a parameter set; empty ``violations`` means usable."""
    violations: list[str] = Field(default_factory=list)
    checks: list[ValidationCheck] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list, description="Informational, never violations")
    drive_power_w: float | None = None
    drive_power_ratio: float | None = Field(None, description="Drive power over the printed 9.8 mW")

    @property
    def ok(self) -> bool:
        return not self.violations


class StepRecord(BaseModel):
    """Status of one pipeline step for a parameter point."""
    step_name: str
    status: Literal["completed", "skipped", "failed"]
    elapsed_s: float = 0.0
    error: str | None = None


class MeanFieldSummary(BaseModel):
    """Scalars of the steady state worth printing."""
    m_abs: list[float] = Field(..., description="|<m_k>|")
    c_abs: list[float] = Field(..., description="|<c_k>|")
    q_avg: list[float]
    delta_m_eff: list[float] = Field(..., description="rad/s")
    G_abs: list[float] = Field(..., description="|G_eff,k| in rad/s")
    iterations: int
    residual: float


class EntanglementReport(BaseModel):
    """Logarithmic negativities for one parameter point."""
    values: dict[str, float] = Field(default_factory=dict, description="pair id -> E_N")
    stability_margin: float | None = Field(None, description="max Re λ(M), rad/s")
    flags: list[str] = Field(default_factory=list)
    mean_field: MeanFieldSummary | None = None
    residual_norm: float | None = None
    min_symplectic_offset: float | None = None
    steps: list[StepRecord] = Field(default_factory=list)

    @property
    def stable(self) -> bool:
        return self.stability_margin is not None and self.stability_margin < 0

    @property
    def flag(self) -> str:
        """Single CSV flag: ``ok`` or the first recorded marker."""
        return self.flags[0] if self.flags else "ok"


class SweepAxis(BaseModel):
    """One swept parameter, values in multiples of ``unit``."""
    model_config = ConfigDict(frozen=True)

    name: AxisName
    start: float
    stop: float
    count: int = Field(..., ge=2)
    unit: Literal["omega_b", "kappa_c"] = "omega_b"

    @model_validator(mode="after")
    def _distinct_ends(self) -> "SweepAxis":
        if self.start == self.stop:
            raise ValueError(f"axis {self.name}: start must differ from stop")
        return self


class PrescanSpec(BaseModel):
    """Coarse Δ1/Δ2 scan whose argmax fixes the cavity detunings."""
    model_config = ConfigDict(frozen=True)

    start: float = -2.0
    stop: float = 2.0
    count: int = Field(41, ge=2)
    pair: str


class SweepSpec(BaseModel):
    """1-D or 2-D sweep over named parameters."""
    model_config = ConfigDict(frozen=True)

    name: str = "custom"
    axes: tuple[SweepAxis, ...]
    constraints: dict[str, float] = Field(
        default_factory=dict, description="Fixed overrides in multiples of omega_b"
    )
    pairs: tuple[str, ...]
    prescan: PrescanSpec | None = None

    @field_validator("axes")
    @classmethod
    def _axis_count(cls, axes: tuple[SweepAxis, ...]) -> tuple[SweepAxis, ...]:
        if not 1 <= len(axes) <= 2:
            raise ValueError("a sweep needs 1 or 2 axes")
        if len(axes) == 2 and axes[0].name == axes[1].name:
            raise ValueError("sweep axes must be distinct")
        return axes

    @field_validator("pairs")
    @classmethod
    def _pair_ids(cls, pairs: tuple[str, ...]) -> tuple[str, ...]:
        for pair in pairs:
            a, _, b = pair.partition("-")
            if a not in MODE_IDS or b not in MODE_IDS or a == b:
                raise ValueError(f"invalid pair id {pair!r}")
        return pairs

    def with_points(self, count: int) -> "SweepSpec":
        """Copy with every axis resampled to ``count`` points."""
        axes = tuple(axis.model_copy(update={"count": count}) for axis in self.axes)
        return self.model_copy(update={"axes": axes})


class SweepMetadata(BaseModel):
    """Sidecar content written next to every sweep CSV."""
    spec: SweepSpec
    params: dict = Field(..., description="Fully resolved base parameters")
    overrides: list[str] = Field(default_factory=list)
    resolved_constraints: dict[str, float] = Field(default_factory=dict)
    params_hash: str
    code_version: str
    points: int
    unstable_points: int = 0
    failed_points: int = 0
    elapsed_s: float = 0.0
    workers: int = 1
    created_at: datetime
