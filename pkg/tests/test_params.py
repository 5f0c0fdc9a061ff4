"""Parameter model, unit conversion and validation tests."""
import math

import numpy as np
import pytest

from mmsim.config import load_params
from mmsim.errors import ParameterError
from mmsim.physics.params import (
    PhysicalConstants,
    derive_drive,
    hz_to_rad,
    rad_to_hz,
    thermal_occupation,
    validate,
)

TABLE1 = load_params()
OMEGA_B = hz_to_rad(10e6)


def test_unit_conversion():
    """Test Hz to rad/s conversion both ways."""
    assert hz_to_rad(1.0) == pytest.approx(2 * math.pi)
    assert rad_to_hz(hz_to_rad(10e6)) == pytest.approx(10e6)


def test_table1_detunings():
    """Test the bundled configuration puts every detuning at one phonon frequency."""
    assert TABLE1.omega_ref == pytest.approx(OMEGA_B)
    np.testing.assert_allclose(TABLE1.delta_c, [OMEGA_B, OMEGA_B], rtol=1e-9)
    np.testing.assert_allclose(TABLE1.delta_m0, [OMEGA_B, OMEGA_B], rtol=1e-9)
    assert TABLE1.hop_Gamma == 0.0
    assert TABLE1.hopping_convention == "hamiltonian"


def test_overrides_in_omega_b_units():
    """Test named overrides scale by omega_b."""
    p = TABLE1.with_override("Delta1", -0.5)
    np.testing.assert_allclose(p.delta_c, [-0.5 * OMEGA_B, OMEGA_B], rtol=1e-9)

    p = TABLE1.with_override("Delta_antisym", 0.7)
    np.testing.assert_allclose(p.delta_c, [0.7 * OMEGA_B, -0.7 * OMEGA_B], rtol=1e-9)

    p = TABLE1.with_override("Delta_m2", 0.9)
    np.testing.assert_allclose(p.delta_m0, [OMEGA_B, 0.9 * OMEGA_B], rtol=1e-9)

    p = TABLE1.with_override("G_target", 0.48)
    assert p.G_target == pytest.approx(0.48 * OMEGA_B)


def test_override_in_kappa_units():
    """Test hop_Gamma override measured in cavity linewidths."""
    p = TABLE1.with_override("hop_Gamma", 7.0, unit="kappa_c")
    assert p.hop_Gamma == pytest.approx(7.0 * hz_to_rad(1e6))


def test_override_unknown_name():
    """Test unknown override names are rejected."""
    with pytest.raises(ParameterError):
        TABLE1.with_override("Delta3", 1.0)


def test_overrides_do_not_mutate():
    """Test parameter sets are immutable values."""
    TABLE1.with_override("hop_Gamma", 1.0)
    assert TABLE1.hop_Gamma == 0.0


def test_thermal_occupation():
    """Test Bose-Einstein occupation values."""
    consts = PhysicalConstants()
    assert thermal_occupation(OMEGA_B, 0.0) == 0.0
    assert thermal_occupation(-1.0, 0.0) == 0.0

    T = consts.hbar * OMEGA_B / consts.k_B
    assert thermal_occupation(OMEGA_B, T) == pytest.approx(1.0 / (math.e - 1.0))

    # Table 1 phonon at 10 mK
    assert thermal_occupation(OMEGA_B, 0.01) == pytest.approx(20.34, abs=0.05)


def test_thermal_occupation_domain():
    """Test negative temperature and nonpositive frequency are errors."""
    with pytest.raises(ParameterError):
        thermal_occupation(OMEGA_B, -1.0)
    with pytest.raises(ParameterError):
        thermal_occupation(0.0, 0.01)


def test_derived_drive():
    """Test spin number, Rabi frequency and drive power of the Table 1 sphere."""
    drive = derive_drive(TABLE1)
    volume = 4.0 / 3.0 * math.pi * (125e-6) ** 3
    assert drive.N_spin == pytest.approx(4.22e27 * volume)
    assert 6e14 < drive.Omega_rabi[0] < 8e14
    assert drive.Omega_rabi[0] == drive.Omega_rabi[1]
    assert drive.drive_power == pytest.approx(8.9e-3, rel=0.02)


def test_validate_table1():
    """Test the bundled parameters are valid and report the drive power ratio."""
    report = validate(TABLE1)
    assert report.ok
    assert report.drive_power_ratio == pytest.approx(0.91, abs=0.02)
    assert any("9.8 mW" in note for note in report.notes)


def test_validate_reports_every_violation():
    """Test all violations are collected in one pass."""
    bad = TABLE1.model_copy(update={"omega_b": (0.0, OMEGA_B), "temperature": -1.0})
    report = validate(bad)
    assert not report.ok
    assert "phonon frequency must be positive" in report.violations
    assert "temperature nonnegative" in report.violations
    assert len(report.violations) == 2


def test_validate_coupling_target_needs_magnomechanics():
    """Test a coupling target without magnomechanical coupling is invalid."""
    bad = TABLE1.model_copy(update={"g_mb": (0.0, 0.0), "G_target": OMEGA_B})
    assert not validate(bad).ok
