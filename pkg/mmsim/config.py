"""Runtime settings and physics configuration files."""
import logging
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from mmsim.errors import ConfigError
from mmsim.physics.params import (
    OVERRIDE_NAMES,
    HoppingConvention,
    SystemParams,
    hz_to_rad,
    validate,
)

DATA_DIR = Path(__file__).parent / "data"
TABLE1_PATH = DATA_DIR / "table1.toml"


class Settings(BaseSettings):
    """Runtime settings loaded from environment variables (prefix ``MMSIM_``)."""

    model_config = SettingsConfigDict(
        env_prefix="MMSIM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    log_level: str = "INFO"
    workers: int = Field(default=1, ge=1)

    # Mean field
    meanfield_tol: float = Field(default=1e-12, gt=0)
    meanfield_max_iter: int = Field(default=500, ge=1)

    # Covariance and negativity
    lyapunov_residual_tol: float = 1e-10
    physicality_tol: float = 1e-9
    condition_limit: float = 1e14
    symplectic_rtol: float = 1e-9

    # Sweeps
    grid_points_2d: int = Field(default=201, ge=2)
    grid_points_1d: int = Field(default=801, ge=2)
    prescan_points: int = Field(default=41, ge=2)


settings = Settings()


def configure_logging(level: str | int | None = None) -> None:
    """Configure the root logger once for command-line use."""
    logging.basicConfig(
        level=level or settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


class CavityConfig(BaseModel):
    """One subsystem (cavity, magnon, phonon); frequencies in Hz."""

    model_config = ConfigDict(extra="forbid")

    frequency_hz: float | None = 10e9
    detuning_hz: float | None = None
    magnon_frequency_hz: float | None = None
    magnon_detuning_hz: float | None = 10e6
    drive_frequency_hz: float = 10e9 - 10e6
    phonon_frequency_hz: float = 10e6
    kappa_hz: float = 1e6
    magnon_kappa_hz: float = 1e6
    gamma_b_hz: float = 100.0
    g_cm_hz: float = 3.2e6
    g_mb_hz: float = 0.3

    def cavity_hz(self) -> float:
        if self.detuning_hz is not None:
            return self.drive_frequency_hz + self.detuning_hz
        if self.frequency_hz is None:
            raise ConfigError("cavity needs frequency_hz or detuning_hz")
        return self.frequency_hz

    def magnon_hz(self) -> float:
        if self.magnon_frequency_hz is not None:
            return self.magnon_frequency_hz
        if self.magnon_detuning_hz is None:
            raise ConfigError("cavity needs magnon_frequency_hz or magnon_detuning_hz")
        return self.drive_frequency_hz + self.magnon_detuning_hz


class DriveConfig(BaseModel):
    """Magnon drive and sphere geometry."""

    model_config = ConfigDict(extra="forbid")

    b0_tesla: float = 3.9e-5
    sphere_diameter_m: float = 250e-6
    spin_density_m3: float = 4.22e27
    rabi_hz: float | list[float] | None = None
    coupling_target_hz: float | None = None


class BathConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    temperature_k: float = 0.01


class ConfigFile(BaseModel):
    """Parsed TOML configuration."""

    model_config = ConfigDict(extra="forbid")

    cavity1: CavityConfig = Field(default_factory=CavityConfig)
    cavity2: CavityConfig = Field(default_factory=CavityConfig)
    drive: DriveConfig = Field(default_factory=DriveConfig)
    bath: BathConfig = Field(default_factory=BathConfig)
    hop_gamma_hz: float = 0.0
    hopping_convention: HoppingConvention = "hamiltonian"

    def to_params(self) -> SystemParams:
        """Convert to angular units (the only Hz → rad/s boundary)."""
        cavities = (self.cavity1, self.cavity2)

        def pair(getter) -> tuple[float, float]:
            return tuple(hz_to_rad(getter(c)) for c in cavities)

        rabi = self.drive.rabi_hz
        if rabi is None:
            omega_override = None
        elif isinstance(rabi, list):
            if len(rabi) != 2:
                raise ConfigError("drive.rabi_hz must be a number or a list of two numbers")
            omega_override = (hz_to_rad(rabi[0]), hz_to_rad(rabi[1]))
        else:
            omega_override = (hz_to_rad(rabi), hz_to_rad(rabi))

        target = self.drive.coupling_target_hz
        return SystemParams(
            omega_c=pair(CavityConfig.cavity_hz),
            omega_m=pair(CavityConfig.magnon_hz),
            omega_b=pair(lambda c: c.phonon_frequency_hz),
            omega_drive=pair(lambda c: c.drive_frequency_hz),
            kappa_c=pair(lambda c: c.kappa_hz),
            kappa_m=pair(lambda c: c.magnon_kappa_hz),
            gamma_b=pair(lambda c: c.gamma_b_hz),
            g_cm=pair(lambda c: c.g_cm_hz),
            g_mb=pair(lambda c: c.g_mb_hz),
            hop_Gamma=hz_to_rad(self.hop_gamma_hz),
            B0=self.drive.b0_tesla,
            sphere_diameter=self.drive.sphere_diameter_m,
            rho_spin=self.drive.spin_density_m3,
            temperature=self.bath.temperature_k,
            Omega_override=omega_override,
            G_target=None if target is None else hz_to_rad(target),
            hopping_convention=self.hopping_convention,
        )


def read_toml(path: str | Path | None) -> dict[str, Any]:
    """Raw TOML document; the bundled Table 1 file when ``path`` is None."""
    path = Path(path) if path is not None else TABLE1_PATH
    try:
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        # message carries "(at line L, column C)"
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_value(text: str) -> Any:
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def split_override(item: str) -> tuple[str, str]:
    key, sep, value = item.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"override must look like key=value, got {item!r}")
    return key.strip(), value.strip()


def apply_document_overrides(doc: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """Set dotted-path keys (``cavity1.kappa_hz=2e6``) in a raw TOML document."""
    for item in overrides:
        key, value = split_override(item)
        if key in OVERRIDE_NAMES:
            continue
        node = doc
        *parents, leaf = key.split(".")
        for part in parents:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} does not address a table")
        node[leaf] = _parse_value(value)
    return doc


def apply_alias_overrides(params: SystemParams, overrides: list[str]) -> SystemParams:
    """Apply sweep-style aliases (values in multiples of ω_b, temperature in K)."""
    for item in overrides:
        key, value = split_override(item)
        if key not in OVERRIDE_NAMES:
            continue
        try:
            params = params.with_override(key, float(value))
        except ValueError as exc:
            raise ConfigError(f"override {key!r} needs a number, got {value!r}") from exc
    return params


def load_params(path: str | Path | None = None, overrides: list[str] | None = None) -> SystemParams:
    """Read, override, convert and validate a configuration."""
    overrides = list(overrides or [])
    doc = apply_document_overrides(read_toml(path), overrides)
    try:
        params = ConfigFile.model_validate(doc).to_params()
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    params = apply_alias_overrides(params, overrides)
    report = validate(params)
    if not report.ok:
        raise ConfigError("invalid parameters: " + "; ".join(report.violations))
    return params
