"""Logarithmic negativity tests."""
import math

import numpy as np
import pytest

from mmsim.errors import ParameterError, SymplecticInconsistencyError, UnphysicalStateError
from mmsim.physics.entanglement import (
    ALL_PAIRS,
    CROSS_CAVITY_PAIRS,
    ModePair,
    log_negativity,
    min_symplectic_eigenvalue,
    negativities,
    partial_transpose,
    reduce_covariance,
    symplectic_eigenvalues,
)


def tmsv(r):
    """Two-mode squeezed vacuum covariance, vacuum variance 1/2."""
    z = np.diag([1.0, -1.0])
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    return 0.5 * np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])


def rotation(theta):
    return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])


@pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 2.0])
def test_two_mode_squeezed_vacuum(r):
    """Test E_N = 2r for a two-mode squeezed vacuum."""
    assert log_negativity(tmsv(r)) == pytest.approx(2 * r, abs=1e-9)


def test_transpose_side_is_irrelevant():
    """Test transposing either mode gives the same negativity."""
    V = tmsv(0.7)
    assert log_negativity(V, side="a") == pytest.approx(log_negativity(V, side="b"), abs=1e-12)


def test_local_rotations_preserve_negativity():
    """Test local phase rotations leave E_N unchanged."""
    R = np.zeros((4, 4))
    R[:2, :2] = rotation(0.3)
    R[2:, 2:] = rotation(-1.1)
    V = tmsv(0.8)
    assert log_negativity(R @ V @ R.T) == pytest.approx(1.6, abs=1e-9)


@pytest.mark.parametrize("n1,n2", [(0.0, 0.0), (0.5, 3.0), (20.0, 0.1)])
def test_product_states_are_separable(n1, n2):
    """Test vacuum and thermal product states have zero negativity."""
    V = np.diag([n1 + 0.5, n1 + 0.5, n2 + 0.5, n2 + 0.5])
    assert log_negativity(V) == pytest.approx(0.0, abs=1e-12)


def test_symplectic_eigenvalues():
    """Test thermal states have their occupations as symplectic spectrum."""
    V = np.diag([0.5, 0.5, 2.5, 2.5, 1.5, 1.5])
    np.testing.assert_allclose(symplectic_eigenvalues(V), [0.5, 1.5, 2.5])


def test_transposed_eigenvalue_of_tmsv():
    """Test the smallest transposed symplectic eigenvalue is exp(-2r)/2."""
    r = 0.4
    assert min_symplectic_eigenvalue(tmsv(r)) == pytest.approx(math.exp(-2 * r) / 2, rel=1e-12)


def test_partial_transpose_flips_one_momentum():
    """Test the transposition sign pattern."""
    V = np.arange(16.0).reshape(4, 4)
    Vt = partial_transpose(V, "a")
    assert Vt[0, 1] == -V[0, 1]
    assert Vt[1, 1] == V[1, 1]
    assert Vt[2, 3] == V[2, 3]
    Vt = partial_transpose(V, "b")
    assert Vt[2, 3] == -V[2, 3]


def test_unphysical_input_raises():
    """Test a covariance with negative determinant is rejected."""
    V = np.diag([0.5, 0.5, 0.5, 0.5])
    V[0, 0] = -0.5
    with pytest.raises(UnphysicalStateError):
        log_negativity(V)


def test_pair_ids():
    """Test pair parsing is order-insensitive and validated."""
    assert ModePair.parse("b1-c1").id == "c1-b1"
    assert str(ModePair.of("m2", "c2")) == "c2-m2"
    with pytest.raises(ParameterError):
        ModePair.parse("c1-c1")
    with pytest.raises(ParameterError):
        ModePair.parse("c1-x9")
    with pytest.raises(ParameterError):
        ModePair.parse("c1c2")


def test_all_pairs_order():
    """Test the fifteen pairs come in report order."""
    assert [p.id for p in ALL_PAIRS] == [
        "c1-c2", "c1-m1", "c1-m2", "c1-b1", "c1-b2",
        "c2-m1", "c2-m2", "c2-b1", "c2-b2",
        "m1-m2", "m1-b1", "m1-b2",
        "m2-b1", "m2-b2",
        "b1-b2",
    ]
    assert len(CROSS_CAVITY_PAIRS) == 9


def test_reduce_covariance_picks_mode_blocks():
    """Test the quadrature indices of a reduced pair."""
    V = np.arange(144.0).reshape(12, 12)
    V4 = reduce_covariance(V, "m1-b2")
    idx = [4, 5, 10, 11]
    np.testing.assert_array_equal(V4, V[np.ix_(idx, idx)])


def test_negativities_embedded_pair():
    """Test a squeezed pair embedded in vacuum is found and nothing else is."""
    V = 0.5 * np.eye(12)
    idx = [2, 3, 8, 9]  # c2 and b1
    V[np.ix_(idx, idx)] = tmsv(0.3)
    values = negativities(V)
    assert values["c2-b1"] == pytest.approx(0.6, abs=1e-9)
    assert all(v < 1e-12 for pair, v in values.items() if pair != "c2-b1")


def test_degenerate_product_state_is_consistent():
    """Test two identical local states, where η⁻ = η⁺, pass the cross-check."""
    A = np.array([[0.7, 0.2], [0.2, 0.5]])
    V = np.block([[A, np.zeros((2, 2))], [np.zeros((2, 2)), A]])
    for angle in np.linspace(0.0, math.pi, 7):
        R = rotation(angle)
        V_rot = V.copy()
        V_rot[2:, 2:] = R @ A @ R.T * (1.0 + 1e-12 * angle)
        eta = min_symplectic_eigenvalue(V_rot)
        assert eta == pytest.approx(math.sqrt(np.linalg.det(A)), rel=1e-8)
        assert log_negativity(V_rot) == 0.0


def test_cross_check_stays_tight_off_degeneracy(monkeypatch):
    """Test a 1e-7 disagreement is still caught when η⁻ and η⁺ are well apart."""
    import mmsim.physics.entanglement as ent

    exact = ent._closed_form_eta_minus

    def skewed(Vt):
        eta, err = exact(Vt)
        return eta * (1.0 + 1e-7), err

    monkeypatch.setattr(ent, "_closed_form_eta_minus", skewed)
    with pytest.raises(SymplecticInconsistencyError):
        min_symplectic_eigenvalue(tmsv(0.5))
