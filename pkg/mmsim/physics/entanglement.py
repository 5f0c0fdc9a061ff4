"""Logarithmic negativity of any two modes of the 12-quadrature covariance."""
import itertools
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from mmsim.errors import ParameterError, SymplecticInconsistencyError, UnphysicalStateError
from mmsim.physics.dynamics import MODE_OFFSET, MODE_ORDER, ModeOrder, symplectic_form
from mmsim.schemas import MODE_IDS

SYMPLECTIC_RTOL = 1e-9
DISCRIMINANT_TOL = 1e-12
# Rounding allowance for a 4x4 determinant and the invariants built from it.
_ROUNDING = 64.0 * np.finfo(float).eps


class ModePair(BaseModel):
    """Unordered pair of modes, stored in canonical (c1, c2, m1, m2, b1, b2) order."""

    model_config = ConfigDict(frozen=True)

    a: str
    b: str

    @classmethod
    def of(cls, a: str, b: str) -> "ModePair":
        for mode in (a, b):
            if mode not in MODE_IDS:
                raise ParameterError(f"unknown mode id {mode!r}")
        if a == b:
            raise ParameterError(f"pair needs two distinct modes, got {a!r} twice")
        first, second = sorted((a, b), key=MODE_IDS.index)
        return cls(a=first, b=second)

    @classmethod
    def parse(cls, text: str) -> "ModePair":
        a, sep, b = text.strip().partition("-")
        if not sep:
            raise ParameterError(f"pair id must look like 'c1-c2', got {text!r}")
        return cls.of(a, b)

    @property
    def id(self) -> str:
        return f"{self.a}-{self.b}"

    def __str__(self) -> str:
        return self.id


ALL_PAIRS: tuple[ModePair, ...] = tuple(
    ModePair(a=a, b=b) for a, b in itertools.combinations(MODE_IDS, 2)
)

# Pairs whose modes sit in different cavities.
CROSS_CAVITY_PAIRS: tuple[ModePair, ...] = tuple(
    p for p in ALL_PAIRS if p.a[1] != p.b[1]
)


def reduce_covariance(V: np.ndarray, pair: ModePair | str, order: ModeOrder = MODE_ORDER) -> np.ndarray:
    """4×4 block (x_a, y_a, x_b, y_b) of the full covariance."""
    if isinstance(pair, str):
        pair = ModePair.parse(pair)
    if tuple(order) == MODE_ORDER:
        idx = [MODE_OFFSET[pair.a], MODE_OFFSET[pair.a] + 1, MODE_OFFSET[pair.b], MODE_OFFSET[pair.b] + 1]
    else:
        labels = {label: i for i, label in enumerate(order)}
        idx = [labels[MODE_ORDER[MODE_OFFSET[mode] + s]] for mode in (pair.a, pair.b) for s in (0, 1)]
    V = np.asarray(V)
    return V[np.ix_(idx, idx)]


def partial_transpose(V4: np.ndarray, side: Literal["a", "b"] = "a") -> np.ndarray:
    """Flip the sign of one mode's second quadrature: P·V4·P."""
    p = np.diag([1.0, -1.0, 1.0, 1.0]) if side == "a" else np.diag([1.0, 1.0, 1.0, -1.0])
    return p @ V4 @ p


def symplectic_eigenvalues(V: np.ndarray) -> np.ndarray:
    """Sorted symplectic spectrum: moduli of the eigenvalues of iΩV, one per mode."""
    n_modes = V.shape[0] // 2
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n_modes) @ V)))
    return moduli[::2]


def _closed_form_eta_minus(Vt: np.ndarray) -> tuple[float, float]:
    """η⁻ of the already transposed matrix from its 2×2 block invariants.

    Σ̃ = det A + det B + 2 det C̃ on the transposed blocks, which equals
    det A + det B − 2 det C on the original ones. Also returns the
    absolute error bound on η⁻² that rounding of the invariants allows.
    """
    det_a = np.linalg.det(Vt[:2, :2])
    det_b = np.linalg.det(Vt[2:, 2:])
    det_c = np.linalg.det(Vt[:2, 2:])
    det_v = np.linalg.det(Vt)
    sigma = det_a + det_b + 2.0 * det_c
    disc = sigma**2 - 4.0 * det_v
    scale = max(sigma**2, 1.0)
    if disc < -DISCRIMINANT_TOL * scale or det_v < 0:
        raise UnphysicalStateError(
            f"negative symplectic discriminant {disc:.3e} (det {det_v:.3e}): input is not a physical covariance"
        )
    root = math.sqrt(max(disc, 0.0))
    # (Σ − √disc)/2 written as 2·det/(Σ + √disc) to avoid cancellation
    denom = sigma + root
    eta_sq = 2.0 * det_v / denom if denom > 0 else 0.0

    # Near η⁻ = η⁺ the square root turns an O(eps) error in disc into O(√eps).
    sigma_abs = abs(det_a) + abs(det_b) + 2.0 * abs(det_c)
    disc_err = _ROUNDING * (sigma_abs**2 + 4.0 * abs(det_v))
    root_err = math.sqrt(disc_err) if disc <= disc_err else min(math.sqrt(disc_err), disc_err / root)
    eta_sq_err = 0.5 * (_ROUNDING * sigma_abs + root_err)
    return math.sqrt(max(eta_sq, 0.0)), eta_sq_err


def min_symplectic_eigenvalue(V4: np.ndarray, side: Literal["a", "b"] = "a", rtol: float = SYMPLECTIC_RTOL) -> float:
    """η⁻ of the partially transposed two-mode covariance, cross-checked two ways.

    Squares are compared: the allowance is ``rtol`` relative to η⁺ plus the
    rounding bound of the closed form, which only matters when η⁻ ≈ η⁺.
    """
    Vt = partial_transpose(np.asarray(V4, dtype=float), side)
    spectrum = symplectic_eigenvalues(Vt)
    eta_spectral = float(spectrum[0])
    eta_closed, eta_sq_err = _closed_form_eta_minus(Vt)
    eta_plus = max(float(spectrum[-1]), eta_spectral)
    allowed = rtol * eta_plus * (eta_spectral + eta_closed) + eta_sq_err
    if abs(eta_spectral**2 - eta_closed**2) > allowed:
        raise SymplecticInconsistencyError(
            f"symplectic eigenvalue inconsistency: spectral {eta_spectral:.15e} vs closed form {eta_closed:.15e}"
        )
    return eta_spectral


def log_negativity(V4: np.ndarray, side: Literal["a", "b"] = "a", rtol: float = SYMPLECTIC_RTOL) -> float:
    """E_N = max[0, −ln 2η⁻] for a two-mode covariance (vacuum variance ½)."""
    eta = min_symplectic_eigenvalue(V4, side, rtol)
    if eta <= 0:
        raise UnphysicalStateError("vanishing symplectic eigenvalue")
    return max(0.0, -math.log(2.0 * eta))


def negativities(
    V: np.ndarray,
    pairs: tuple[ModePair, ...] = ALL_PAIRS,
    rtol: float = SYMPLECTIC_RTOL,
) -> dict[str, float]:
    """E_N for each requested pair of the full covariance."""
    return {pair.id: log_negativity(reduce_covariance(V, pair), rtol=rtol) for pair in pairs}
