"""Steady-state covariance from the Lyapunov equation M·V + V·Mᵀ = −D."""
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.linalg import lapack, lu_factor, lu_solve

from mmsim.errors import InstabilityError
from mmsim.physics.dynamics import (
    MODE_ORDER,
    ModeOrder,
    permutation_matrix,
    stability_margin,
    symplectic_form,
)

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
PHYSICALITY_TOL = 1e-9
CONDITION_LIMIT = 1e14


class CovarianceMatrix(BaseModel):
    """Symmetric covariance (vacuum variance ½) with accuracy and physicality data."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    V: np.ndarray
    residual_norm: float
    physical: bool
    min_symplectic_offset: float
    condition_estimate: float
    warnings: tuple[str, ...] = ()


def lyapunov_residual(M: np.ndarray, V: np.ndarray, D: np.ndarray) -> float:
    """‖MV + VMᵀ + D‖_F / ‖D‖_F (absolute norm when D = 0)."""
    r = np.linalg.norm(M @ V + V @ M.T + D)
    d = np.linalg.norm(D)
    return float(r / d) if d > 0 else float(r)


def uncertainty_check(
    V: np.ndarray,
    order: ModeOrder | None = None,
    tol: float = PHYSICALITY_TOL,
) -> tuple[bool, float]:
    """Minimum eigenvalue of V + (i/2)Ω and whether it clears −tol.

    ``order`` is only needed when V is not in the canonical mode order.
    """
    V = np.asarray(V, dtype=float)
    omega = symplectic_form(V.shape[0] // 2)
    if order is not None and tuple(order) != MODE_ORDER:
        p = permutation_matrix(MODE_ORDER, tuple(order))
        omega = p @ omega @ p.T
    hermitian = V + 0.5j * omega
    offset = float(np.min(np.linalg.eigvalsh(hermitian)))
    return offset >= -tol, offset


def solve_lyapunov(
    M: np.ndarray,
    D: np.ndarray,
    residual_tol: float = RESIDUAL_TOL,
    physicality_tol: float = PHYSICALITY_TOL,
    condition_limit: float = CONDITION_LIMIT,
) -> CovarianceMatrix:
    """Direct vectorized solve of the continuous Lyapunov equation.

    The system (M ⊗ I + I ⊗ M) vec(V) = −vec(D) is factored once, refined
    by one step, and the result symmetrized.
    """
    M = np.asarray(M, dtype=float)
    D = np.asarray(D, dtype=float)
    margin = stability_margin(M)
    if margin >= 0:
        raise InstabilityError(
            f"unstable drift matrix (stability margin {margin:.6e})", margin=margin
        )

    n = M.shape[0]
    # Rates span several decades; solve in units of the largest entry.
    scale = float(np.max(np.abs(M)))
    Ms = M / scale
    Ds = D / scale
    eye = np.eye(n)
    K = np.kron(Ms, eye) + np.kron(eye, Ms)
    rhs = -Ds.reshape(-1)

    lu, piv = lu_factor(K, check_finite=False)
    rcond, _ = lapack.dgecon(lu, np.linalg.norm(K, 1), norm="1")
    condition = float(np.inf if rcond == 0 else 1.0 / rcond)
    v = lu_solve((lu, piv), rhs, check_finite=False)
    v = v + lu_solve((lu, piv), rhs - K @ v, check_finite=False)

    V = v.reshape(n, n)
    V = 0.5 * (V + V.T)

    notes: list[str] = []
    if condition > condition_limit:
        logger.warning("ill-conditioned Lyapunov system (condition %.3e)", condition)
        notes.append(f"ill_conditioned: condition estimate {condition:.3e}")

    residual = lyapunov_residual(M, V, D)
    if residual > residual_tol:
        logger.warning("Lyapunov residual %.3e exceeds %.1e", residual, residual_tol)
        notes.append(f"inaccurate: residual {residual:.3e}")

    physical, offset = uncertainty_check(V, tol=physicality_tol)
    return CovarianceMatrix(
        V=V,
        residual_norm=residual,
        physical=physical,
        min_symplectic_offset=offset,
        condition_estimate=condition,
        warnings=tuple(notes),
    )
