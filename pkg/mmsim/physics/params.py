"""Physical parameters, unit conversion and derived drive quantities."""
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import constants as sc

from mmsim.errors import ParameterError
from mmsim.schemas import ValidationCheck, ValidationReport

Pair = tuple[float, float]
HoppingConvention = Literal["hamiltonian", "as_printed"]

# Printed drive power for the Table 1 field.
REFERENCE_DRIVE_POWER_W = 9.8e-3


def hz_to_rad(value: float) -> float:
    """Convert an ordinary frequency in Hz to an angular frequency in rad/s."""
    return 2.0 * math.pi * value


def rad_to_hz(value: float) -> float:
    """Convert an angular frequency in rad/s to Hz."""
    return value / (2.0 * math.pi)


class PhysicalConstants(BaseModel):
    """CODATA constants used by the model (SI units)."""

    model_config = ConfigDict(frozen=True)

    hbar: float = Field(default=sc.hbar, gt=0, description="J·s")
    k_B: float = Field(default=sc.k, gt=0, description="J/K")
    c_light: float = Field(default=sc.c, gt=0, description="m/s")
    mu0: float = Field(default=sc.mu_0, gt=0, description="vacuum permeability")
    gamma0: float = Field(
        default=2.0 * math.pi * 28e9, gt=0, description="gyromagnetic ratio, rad/(s·T)"
    )


class SystemParams(BaseModel):
    """All physical inputs of the two-cavity system, angular units (rad/s).

    Index 0 is subsystem 1, index 1 is subsystem 2. Construction never
    rejects values; use :func:`validate` for physical admissibility.
    """

    model_config = ConfigDict(frozen=True)

    omega_c: Pair
    omega_m: Pair
    omega_b: Pair
    omega_drive: Pair
    kappa_c: Pair
    kappa_m: Pair
    gamma_b: Pair
    g_cm: Pair
    g_mb: Pair
    hop_Gamma: float = 0.0
    B0: float = 0.0
    sphere_diameter: float = 250e-6
    rho_spin: float = 4.22e27
    temperature: float = 0.0
    Omega_override: Pair | None = Field(
        default=None, description="Rabi frequency per subsystem, bypasses the B0 formula"
    )
    G_target: float | None = Field(
        default=None, description="target max |G_eff| in rad/s, bypasses any Ω"
    )
    hopping_convention: HoppingConvention = "hamiltonian"

    @property
    def delta_c(self) -> np.ndarray:
        """Cavity detunings Δ_k = ω_c,k − ω_drive,k."""
        return np.asarray(self.omega_c) - np.asarray(self.omega_drive)

    @property
    def delta_m0(self) -> np.ndarray:
        """Bare magnon detunings Δ_m0,k = ω_m,k − ω_drive,k."""
        return np.asarray(self.omega_m) - np.asarray(self.omega_drive)

    @property
    def omega_ref(self) -> float:
        """Unit for detunings and couplings in sweeps: ω_b of subsystem 1."""
        return self.omega_b[0]

    def with_detunings(
        self,
        delta_c: Pair | None = None,
        delta_m: Pair | None = None,
    ) -> "SystemParams":
        """Return a copy with detunings (rad/s) moved relative to the drives."""
        update: dict = {}
        drive = self.omega_drive
        if delta_c is not None:
            update["omega_c"] = (drive[0] + delta_c[0], drive[1] + delta_c[1])
        if delta_m is not None:
            update["omega_m"] = (drive[0] + delta_m[0], drive[1] + delta_m[1])
        return self.model_copy(update=update)

    def with_override(self, name: str, value: float, unit: str = "omega_b") -> "SystemParams":
        """Apply a named sweep override.

        ``value`` is dimensionless in multiples of ``unit`` (``omega_b`` or
        ``kappa_c``), except ``temperature`` which is in K.
        """
        if name == "temperature":
            return self.model_copy(update={"temperature": value})
        if unit == "omega_b":
            scale = self.omega_ref
        elif unit == "kappa_c":
            scale = self.kappa_c[0]
        else:
            raise ParameterError(f"unknown unit {unit!r}")
        x = value * scale
        dc = tuple(self.delta_c)
        dm = tuple(self.delta_m0)
        if name == "Delta1":
            return self.with_detunings(delta_c=(x, dc[1]))
        if name == "Delta2":
            return self.with_detunings(delta_c=(dc[0], x))
        if name == "Delta_sym":
            return self.with_detunings(delta_c=(x, x))
        if name == "Delta_antisym":
            return self.with_detunings(delta_c=(x, -x))
        if name == "Delta_m1":
            return self.with_detunings(delta_m=(x, dm[1]))
        if name == "Delta_m2":
            return self.with_detunings(delta_m=(dm[0], x))
        if name == "Delta_m_sym":
            return self.with_detunings(delta_m=(x, x))
        if name == "hop_Gamma":
            return self.model_copy(update={"hop_Gamma": x})
        if name == "G_target":
            return self.model_copy(update={"G_target": x})
        raise ParameterError(f"unknown override {name!r}")


OVERRIDE_NAMES = (
    "Delta1",
    "Delta2",
    "Delta_sym",
    "Delta_antisym",
    "Delta_m1",
    "Delta_m2",
    "Delta_m_sym",
    "hop_Gamma",
    "G_target",
    "temperature",
)


class DerivedDrive(BaseModel):
    """Drive quantities computed from the sphere geometry and field."""

    model_config = ConfigDict(frozen=True)

    N_spin: float
    Omega_rabi: Pair
    drive_power: float = Field(..., description="W")


def sphere_volume(diameter: float) -> float:
    """Volume of a sphere of the given diameter."""
    return 4.0 / 3.0 * math.pi * (diameter / 2.0) ** 3


def derive_drive(params: SystemParams, consts: PhysicalConstants | None = None) -> DerivedDrive:
    """Spin number, Rabi frequency Ω = (√5/4)·γ0·√N·B0 and drive power."""
    consts = consts or PhysicalConstants()
    n_spin = params.rho_spin * sphere_volume(params.sphere_diameter)
    omega = math.sqrt(5.0) / 4.0 * consts.gamma0 * math.sqrt(n_spin) * params.B0
    radius = params.sphere_diameter / 2.0
    power = params.B0**2 * math.pi * radius**2 * consts.c_light / (2.0 * consts.mu0)
    return DerivedDrive(N_spin=n_spin, Omega_rabi=(omega, omega), drive_power=power)


def thermal_occupation(omega: float, T: float, consts: PhysicalConstants | None = None) -> float:
    """Bose-Einstein occupation [exp(ħω/k_BT) − 1]⁻¹; exactly 0 at T = 0."""
    if T < 0:
        raise ParameterError(f"temperature must be nonnegative, got {T!r}")
    if T == 0:
        return 0.0
    if omega <= 0:
        raise ParameterError(f"thermal occupation diverges for omega={omega!r} <= 0")
    consts = consts or PhysicalConstants()
    x = consts.hbar * omega / (consts.k_B * T)
    return float(1.0 / np.expm1(x))


def _check(name: str, passed: bool, details: str) -> ValidationCheck:
    return ValidationCheck(check_name=name, passed=passed, details=None if passed else details)


def validate(params: SystemParams, consts: PhysicalConstants | None = None) -> ValidationReport:
    """Check every parameter invariant and report all violations at once."""
    checks: list[ValidationCheck] = []

    for field in ("omega_c", "omega_m", "omega_drive"):
        values = getattr(params, field)
        checks.append(
            _check(f"{field} nonnegative", min(values) >= 0, f"{field} must be nonnegative: {values}")
        )
    checks.append(
        _check(
            "omega_b positive",
            min(params.omega_b) > 0,
            "phonon frequency must be positive",
        )
    )
    for field in ("kappa_c", "kappa_m", "gamma_b", "g_cm", "g_mb"):
        values = getattr(params, field)
        checks.append(
            _check(f"{field} nonnegative", min(values) >= 0, f"{field} must be nonnegative: {values}")
        )
    checks.append(
        _check("hop_Gamma nonnegative", params.hop_Gamma >= 0, "hopping rate must be nonnegative")
    )
    checks.append(
        _check("temperature nonnegative", params.temperature >= 0, "temperature nonnegative")
    )
    checks.append(_check("B0 nonnegative", params.B0 >= 0, "drive field must be nonnegative"))
    checks.append(
        _check(
            "spin number positive",
            params.sphere_diameter > 0 and params.rho_spin > 0,
            "sphere diameter and spin density must be positive",
        )
    )
    if params.Omega_override is not None:
        checks.append(
            _check(
                "Omega override nonnegative",
                min(params.Omega_override) >= 0,
                "Rabi frequency override must be nonnegative",
            )
        )
    if params.G_target is not None:
        checks.append(
            _check(
                "coupling target admissible",
                params.G_target >= 0 and min(params.g_mb) > 0,
                "coupling target needs G_target >= 0 and g_mb > 0",
            )
        )

    notes: list[str] = []
    drive_power = None
    if params.sphere_diameter > 0 and params.rho_spin > 0:
        drive = derive_drive(params, consts)
        drive_power = drive.drive_power
        ratio = drive_power / REFERENCE_DRIVE_POWER_W
        notes.append(
            f"drive power {drive_power * 1e3:.4g} mW, ratio to printed 9.8 mW = {ratio:.4g}"
        )

    violations = [c.details for c in checks if not c.passed and c.details]
    return ValidationReport(
        violations=violations,
        checks=checks,
        notes=notes,
        drive_power_w=drive_power,
        drive_power_ratio=None if drive_power is None else drive_power / REFERENCE_DRIVE_POWER_W,
    )
