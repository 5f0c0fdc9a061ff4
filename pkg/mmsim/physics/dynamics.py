"""Drift and diffusion matrices of the linearized quadrature fluctuations.

Quadratures follow X = (δc + δc†)/√2, Y = (δc − δc†)/(√2 i) for every
bosonic mode, and the fluctuation vector is ordered
(X1, Y1, X2, Y2, x1, y1, x2, y2, q1, p1, q2, p2).

Deviations from the printed drift matrix, all derived from the Langevin
equations:
  - row y2 carries −κ_m2 on its diagonal (printed −κ_b2);
  - row p2 carries −γ_b2 on its diagonal (printed +γ_b2);
  - G_eff is complex: ẋ_k ∋ −Re G·q, ẏ_k ∋ −Im G·q,
    ṗ_k ∋ −Im G·x + Re G·y. For real G this is the printed pattern.
"""
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from mmsim.errors import EigenSolverError
from mmsim.physics.meanfield import SteadyState
from mmsim.physics.params import PhysicalConstants, SystemParams, thermal_occupation

logger = logging.getLogger(__name__)

ModeOrder = tuple[str, ...]

MODE_ORDER: ModeOrder = (
    "X1", "Y1", "X2", "Y2",
    "x1", "y1", "x2", "y2",
    "q1", "p1", "q2", "p2",
)

# First quadrature index of each mode in MODE_ORDER.
MODE_OFFSET = {"c1": 0, "c2": 2, "m1": 4, "m2": 6, "b1": 8, "b2": 10}


class LinearModel(BaseModel):
    """Drift M, diffusion D and the spectral abscissa of M."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    M: np.ndarray
    D: np.ndarray
    order: ModeOrder = MODE_ORDER
    stability_margin: float

    @property
    def stable(self) -> bool:
        return self.stability_margin < 0


def permutation_matrix(order_from: ModeOrder, order_to: ModeOrder) -> np.ndarray:
    """P such that P·v reorders a vector indexed by ``order_from`` into ``order_to``."""
    if sorted(order_from) != sorted(order_to):
        raise ValueError("orders must be permutations of each other")
    index = {label: i for i, label in enumerate(order_from)}
    p = np.zeros((len(order_to), len(order_from)))
    for row, label in enumerate(order_to):
        p[row, index[label]] = 1.0
    return p


def _reorder(matrix: np.ndarray, order: ModeOrder) -> np.ndarray:
    if tuple(order) == MODE_ORDER:
        return matrix
    p = permutation_matrix(MODE_ORDER, tuple(order))
    return p @ matrix @ p.T


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal ⊕ [[0, 1], [−1, 0]] for pairs (x, p) of each mode."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _rotation_block(m: np.ndarray, row: int, col: int, damping: float, detuning: float) -> None:
    m[row, col] = -damping
    m[row, col + 1] = detuning
    m[row + 1, col] = -detuning
    m[row + 1, col + 1] = -damping


def build_drift(params: SystemParams, ss: SteadyState, order: ModeOrder = MODE_ORDER) -> np.ndarray:
    """12×12 drift matrix of the quadrature fluctuations."""
    m = np.zeros((12, 12))
    delta_c = params.delta_c
    gamma = params.hop_Gamma

    for k in range(2):
        X = 2 * k      # cavity X_k
        x = 4 + 2 * k  # magnon x_k
        q = 8 + 2 * k  # phonon q_k
        Xj = 2 * (1 - k)

        _rotation_block(m, X, X, params.kappa_c[k], delta_c[k])
        _rotation_block(m, x, x, params.kappa_m[k], ss.Delta_m_eff[k])

        if params.hopping_convention == "hamiltonian":
            # −iΓ δc_j
            m[X, Xj + 1] = gamma
            m[X + 1, Xj] = -gamma
        else:
            # +Γ δc_j
            m[X, Xj] = gamma
            m[X + 1, Xj + 1] = gamma

        g = params.g_cm[k]
        m[X, x + 1] = g
        m[X + 1, x] = -g
        m[x, X + 1] = g
        m[x + 1, X] = -g

        G = complex(ss.G_eff[k])
        m[x, q] = -G.real
        m[x + 1, q] = -G.imag
        m[q + 1, x] = -G.imag
        m[q + 1, x + 1] = G.real

        m[q, q + 1] = params.omega_b[k]
        m[q + 1, q] = -params.omega_b[k]
        m[q + 1, q + 1] = -params.gamma_b[k]

    return _reorder(m, order)


def build_diffusion(
    params: SystemParams,
    consts: PhysicalConstants | None = None,
    order: ModeOrder = MODE_ORDER,
) -> np.ndarray:
    """Diagonal diffusion matrix, thermal occupations at each mode's own frequency."""
    consts = consts or PhysicalConstants()
    T = params.temperature
    diag = np.zeros(12)
    for k in range(2):
        n_c = thermal_occupation(params.omega_c[k], T, consts)
        n_m = thermal_occupation(params.omega_m[k], T, consts)
        n_b = thermal_occupation(params.omega_b[k], T, consts)
        diag[2 * k: 2 * k + 2] = params.kappa_c[k] * (2 * n_c + 1)
        diag[4 + 2 * k: 6 + 2 * k] = params.kappa_m[k] * (2 * n_m + 1)
        diag[9 + 2 * k] = params.gamma_b[k] * (2 * n_b + 1)
    return _reorder(np.diag(diag), order)


def stability_margin(M: np.ndarray) -> float:
    """Largest real part of the eigenvalues of M; stable iff negative."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"drift matrix must be square, got shape {M.shape}")
    try:
        eigenvalues = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        dump = np.array2string(M, precision=6, max_line_width=200)
        raise EigenSolverError(f"eigenvalue solver failed: {exc}\n{dump}") from exc
    return float(np.max(eigenvalues.real))


def build_linear_model(
    params: SystemParams,
    ss: SteadyState,
    consts: PhysicalConstants | None = None,
) -> LinearModel:
    """Assemble M, D and the stability margin for one steady state."""
    M = build_drift(params, ss)
    D = build_diffusion(params, consts)
    margin = stability_margin(M)
    logger.debug("stability margin %.6e rad/s", margin)
    return LinearModel(M=M, D=D, stability_margin=margin)
