"""Configuration loading tests."""
import sys
from pathlib import Path

import pytest

from mmsim import MIN_PYTHON
from mmsim.config import (
    ConfigFile,
    Settings,
    apply_document_overrides,
    load_params,
    read_toml,
    split_override,
)
from mmsim.errors import ConfigError
from mmsim.physics.params import hz_to_rad


def test_settings_from_environment(monkeypatch):
    """Test MMSIM_ environment variables override defaults."""
    monkeypatch.setenv("MMSIM_WORKERS", "4")
    monkeypatch.setenv("MMSIM_GRID_POINTS_2D", "21")
    s = Settings()
    assert s.workers == 4
    assert s.grid_points_2d == 21
    assert s.meanfield_tol == 1e-12


def test_defaults_match_bundled_file():
    """Test an empty document gives the same parameters as the bundled file."""
    assert ConfigFile.model_validate({}).to_params() == load_params()


def test_detuning_keys(tmp_path):
    """Test cavity frequencies may be given relative to the drive."""
    path = tmp_path / "c.toml"
    path.write_text(
        "[cavity1]\n"
        "frequency_hz = 1e9\n"
        "detuning_hz = -5e6\n"
        "drive_frequency_hz = 1e9\n"
        "magnon_detuning_hz = 9e6\n"
    )
    p = load_params(path)
    assert p.delta_c[0] == pytest.approx(hz_to_rad(-5e6), rel=1e-6)
    assert p.delta_m0[0] == pytest.approx(hz_to_rad(9e6), rel=1e-6)


def test_rabi_override(tmp_path):
    """Test a scalar Rabi frequency applies to both subsystems."""
    path = tmp_path / "c.toml"
    path.write_text("[drive]\nrabi_hz = 1e13\n")
    p = load_params(path)
    assert p.Omega_override == (hz_to_rad(1e13), hz_to_rad(1e13))


def test_dotted_and_alias_overrides():
    """Test both override forms and their units."""
    p = load_params(overrides=["cavity1.kappa_hz=2e6", "hop_Gamma=0.5", "hopping_convention=\"as_printed\""])
    assert p.kappa_c == (hz_to_rad(2e6), hz_to_rad(1e6))
    assert p.hop_Gamma == pytest.approx(0.5 * hz_to_rad(10e6))
    assert p.hopping_convention == "as_printed"


def test_apply_document_overrides_creates_tables():
    """Test dotted paths create missing tables."""
    doc = apply_document_overrides({}, ["bath.temperature_k=0.02"])
    assert doc == {"bath": {"temperature_k": 0.02}}


def test_malformed_toml_reports_position(tmp_path):
    """Test TOML syntax errors carry line and column."""
    path = tmp_path / "bad.toml"
    path.write_text("[cavity1]\nkappa_hz = = 1\n")
    with pytest.raises(ConfigError, match="line 2") as info:
        read_toml(path)
    assert info.value.exit_code == 2


def test_missing_file():
    """Test a missing config file is a configuration error."""
    with pytest.raises(ConfigError, match="not found"):
        load_params("/nonexistent/params.toml")


def test_unknown_key(tmp_path):
    """Test unknown keys are rejected."""
    path = tmp_path / "c.toml"
    path.write_text("[cavity1]\nkappa = 1e6\n")
    with pytest.raises(ConfigError, match="invalid configuration"):
        load_params(path)


def test_invalid_values():
    """Test physically invalid values are rejected with every violation listed."""
    with pytest.raises(ConfigError) as info:
        load_params(overrides=["cavity2.phonon_frequency_hz=0", "bath.temperature_k=-1"])
    message = str(info.value)
    assert "phonon frequency must be positive" in message
    assert "temperature nonnegative" in message


def test_bad_override_syntax():
    """Test overrides need key=value and numeric alias values."""
    with pytest.raises(ConfigError):
        split_override("Delta1")
    with pytest.raises(ConfigError):
        load_params(overrides=["Delta1=abc"])


def test_python_floor_is_declared():
    """Test the interpreter floor matches the setup script and the TOML fallback."""
    root = Path(__file__).resolve().parents[1]
    assert sys.version_info[:2] >= MIN_PYTHON
    floor = ", ".join(map(str, MIN_PYTHON))
    assert f"sys.version_info >= ({floor})" in (root / "setup.sh").read_text()
    assert 'tomli>=2.0.0; python_version < "3.11"' in (root / "requirements.txt").read_text()


def test_error_context_lines():
    """Test context lines attach to errors on every supported interpreter."""
    exc = ConfigError("bad value")
    exc.add_context("first")
    exc.add_context("second")
    assert exc.__notes__ == ["first", "second"]
