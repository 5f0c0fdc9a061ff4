"""Self-consistent semiclassical steady state of the driven two-cavity system."""
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import optimize

from mmsim.errors import ConvergenceError, MeanFieldError, ParameterError
from mmsim.physics.params import PhysicalConstants, SystemParams, derive_drive

logger = logging.getLogger(__name__)

# Condition number above which the 4x4 amplitude system is singular.
_SINGULAR_COND = 1e15

# Damped passes before the root solver takes over.
_PLAIN_PASSES = 200
_MIN_DAMPING = 1.0 / 16.0

_ROOT_XTOL = 4.0 * np.finfo(float).eps
_ROOT_ACCEPT = 1e-9
_CONTINUATION_STEPS = 32

# Points on the shift interval scanned for the calibration root.
_CALIBRATION_SCAN = 128


class SteadyState(BaseModel):
    """Mean amplitudes about which the Langevin equations are linearized."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    c_avg: np.ndarray
    m_avg: np.ndarray
    q_avg: np.ndarray
    p_avg: np.ndarray
    Delta_m_eff: np.ndarray
    G_eff: np.ndarray
    Omega: np.ndarray
    iterations: int
    residual: float


def amplitude_matrix(params: SystemParams, delta_m_eff: np.ndarray) -> np.ndarray:
    """Coefficient matrix of the stationarity equations for (c1, c2, m1, m2)."""
    delta_c = params.delta_c
    if params.hopping_convention == "hamiltonian":
        hop = 1j * params.hop_Gamma
    else:
        # printed form ċ_k ∋ +Γ c_j
        hop = -params.hop_Gamma
    a = np.zeros((4, 4), dtype=complex)
    for k in range(2):
        j = 1 - k
        a[k, k] = 1j * delta_c[k] + params.kappa_c[k]
        a[k, j] = hop
        a[k, 2 + k] = 1j * params.g_cm[k]
        a[2 + k, k] = 1j * params.g_cm[k]
        a[2 + k, 2 + k] = 1j * delta_m_eff[k] + params.kappa_m[k]
    return a


def solve_linear_amplitudes(
    params: SystemParams,
    delta_m_eff,
    omega,
) -> tuple[np.ndarray, np.ndarray]:
    """Solve the frozen-q stationarity system for ⟨c_k⟩ and ⟨m_k⟩."""
    delta_m_eff = np.asarray(delta_m_eff, dtype=float)
    omega = np.asarray(omega, dtype=complex)
    a = amplitude_matrix(params, delta_m_eff)
    rhs = np.concatenate([np.zeros(2, dtype=complex), omega])
    if np.linalg.cond(a) > _SINGULAR_COND:
        raise MeanFieldError("mean-field system singular")
    try:
        x = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise MeanFieldError("mean-field system singular") from exc
    return x[:2], x[2:]


def stationarity_residual(params: SystemParams, ss: SteadyState) -> float:
    """Relative residual of the stationarity equations at the stored state."""
    a = amplitude_matrix(params, ss.Delta_m_eff)
    x = np.concatenate([ss.c_avg, ss.m_avg])
    rhs = np.concatenate([np.zeros(2, dtype=complex), ss.Omega])
    scale = max(np.linalg.norm(rhs), np.linalg.norm(a @ x), 1e-300)
    q_expected = -np.asarray(params.g_mb) / np.asarray(params.omega_b) * np.abs(ss.m_avg) ** 2
    q_scale = max(np.max(np.abs(q_expected)), 1e-300)
    return float(
        max(
            np.linalg.norm(a @ x - rhs) / scale,
            np.max(np.abs(ss.q_avg - q_expected)) / q_scale,
        )
    )


def _relative_change(new: np.ndarray, old: np.ndarray) -> float:
    scale = max(np.max(np.abs(new)), np.max(np.abs(old)))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(new - old)) / scale)


def _build_state(params, c, m, q, delta_m_eff, omega, iterations, residual) -> SteadyState:
    g_mb = np.asarray(params.g_mb)
    return SteadyState(
        c_avg=c,
        m_avg=m,
        q_avg=q,
        p_avg=np.zeros(2),
        Delta_m_eff=delta_m_eff,
        G_eff=1j * math.sqrt(2.0) * g_mb * m,
        Omega=np.asarray(omega, dtype=complex),
        iterations=iterations,
        residual=residual,
    )


def _shift_equation(params: SystemParams, omega):
    """Dimensionless stationarity condition for the magnon shifts s = g_mb·⟨q⟩.

    Zero where s_k = −g_mb,k²|⟨m_k⟩(s)|²/ω_b,k, with s in units of ω_ref.
    """
    g_mb = np.asarray(params.g_mb, dtype=float)
    omega_b = np.asarray(params.omega_b, dtype=float)
    delta_m0 = params.delta_m0
    unit = params.omega_ref

    def equation(u: np.ndarray) -> np.ndarray:
        _, m = solve_linear_amplitudes(params, delta_m0 + u * unit, omega)
        return u + g_mb**2 / omega_b * np.abs(m) ** 2 / unit

    return equation


def _hybrid_root(equation, start: np.ndarray) -> np.ndarray | None:
    try:
        sol = optimize.root(equation, start, method="hybr", options={"xtol": _ROOT_XTOL})
        value = equation(sol.x)
    except MeanFieldError:
        return None
    if not np.all(np.isfinite(sol.x)):
        return None
    if np.max(np.abs(value)) > _ROOT_ACCEPT * max(1.0, float(np.max(np.abs(sol.x)))):
        return None
    return sol.x


def _root_displacement(params: SystemParams, omega, q_start: np.ndarray) -> np.ndarray | None:
    """⟨q⟩ from a Powell-hybrid root solve, None when no root is found.

    Tries the stalled iterate first, then continues in the drive amplitude
    from Ω = 0 so the root reached is the one connected to the undriven state.
    """
    g_mb = np.asarray(params.g_mb, dtype=float)
    omega = np.asarray(omega, dtype=complex)
    u = _hybrid_root(_shift_equation(params, omega), g_mb * q_start / params.omega_ref)
    if u is None:
        u = np.zeros(2)
        for step in range(1, _CONTINUATION_STEPS + 1):
            ramp = math.sqrt(step / _CONTINUATION_STEPS)
            u = _hybrid_root(_shift_equation(params, ramp * omega), u)
            if u is None:
                return None
    shift = u * params.omega_ref
    return np.divide(shift, g_mb, out=np.zeros(2), where=g_mb != 0)


def solve_self_consistent(
    params: SystemParams,
    omega,
    tol: float = 1e-12,
    max_iter: int = 500,
    q0=None,
) -> SteadyState:
    """Fixed-point loop over the magnomechanical displacement ⟨q⟩.

    Plain updates from ``q0`` (default 0). After two consecutive residual
    increases the update is damped by 0.5, never below 1/16. When the
    damped loop stalls with budget left, the stationarity equations are
    handed to a root solver; that phase counts as one iteration and its
    result must pass the same residual test.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    if max_iter < 1:
        raise ParameterError("max_iter must be >= 1")

    g_mb = np.asarray(params.g_mb, dtype=float)
    omega_b = np.asarray(params.omega_b, dtype=float)
    delta_m0 = params.delta_m0
    q = np.zeros(2) if q0 is None else np.asarray(q0, dtype=float).copy()
    m_prev: np.ndarray | None = None
    damping = 1.0
    increases = 0
    residual = math.inf
    iteration = 0

    while iteration < max_iter:
        iteration += 1
        delta_m_eff = delta_m0 + g_mb * q
        c, m = solve_linear_amplitudes(params, delta_m_eff, omega)
        q_new = -g_mb / omega_b * np.abs(m) ** 2

        previous = residual
        residual = _relative_change(q_new, q)
        if m_prev is not None:
            residual = max(residual, _relative_change(m, m_prev))
        logger.debug("mean-field iteration %d residual %.3e", iteration, residual)

        if residual < tol:
            return _build_state(params, c, m, q, delta_m_eff, omega, iteration, residual)

        stalled = iteration >= _PLAIN_PASSES
        if residual > previous:
            increases += 1
            if increases >= 2:
                increases = 0
                if damping <= _MIN_DAMPING:
                    stalled = True
                else:
                    damping = max(0.5 * damping, _MIN_DAMPING)
                    logger.debug("mean-field iteration oscillating, damping %.3g", damping)
        else:
            increases = 0

        q = q + damping * (q_new - q)
        m_prev = m
        if stalled:
            break

    if iteration >= max_iter:
        raise ConvergenceError(
            f"no convergence after {max_iter} iterations (last residual {residual:.3e})",
            residual=residual,
        )

    logger.warning(
        "mean-field loop stalled at residual %.3e after %d passes, switching to root solve",
        residual,
        iteration,
    )
    q_root = _root_displacement(params, omega, q)
    if q_root is not None:
        iteration += 1
        delta_m_eff = delta_m0 + g_mb * q_root
        c, m = solve_linear_amplitudes(params, delta_m_eff, omega)
        q_new = -g_mb / omega_b * np.abs(m) ** 2
        residual = _relative_change(q_new, q_root)
        if residual < tol:
            return _build_state(params, c, m, q_root, delta_m_eff, omega, iteration, residual)
    raise ConvergenceError(
        f"no convergence after {iteration} iterations and a root solve "
        f"(last residual {residual:.3e})",
        residual=residual,
    )


def closed_form_single_cavity(params: SystemParams, k: int, delta_m_eff: float, omega: complex):
    """⟨c_k⟩, ⟨m_k⟩ of an isolated cavity (Γ = 0) in closed form."""
    cav = 1j * params.delta_c[k] + params.kappa_c[k]
    mag = 1j * delta_m_eff + params.kappa_m[k]
    g = params.g_cm[k]
    m = omega * cav / (cav * mag + g**2)
    c = -1j * g * m / cav
    return c, m


def _nearest_root(func, lower: float) -> float | None:
    """Root of ``func`` on [lower, 0] closest to 0, given func(0) >= 0."""
    grid = np.linspace(0.0, lower, _CALIBRATION_SCAN + 1)
    tol = abs(lower) * 1e-14
    prev_s = 0.0
    if abs(func(prev_s)) <= tol:
        return 0.0
    for s in grid[1:]:
        value = func(s)
        if abs(value) <= tol:
            return float(s)
        if value < 0:
            return float(optimize.brentq(func, s, prev_s))
        prev_s = s
    return None


def _calibrate(params: SystemParams, G_target: float) -> tuple[np.ndarray, np.ndarray]:
    """Common drive and the matching displacements for max_k |G_eff,k| = G_target.

    For each subsystem k assumed to reach the target, its shift is fixed
    at −G²/(2ω_b,k) and the other shift is solved so that it is
    self-consistent and no larger in magnitude. Of the admissible
    choices the smaller drive wins: it is the first one reached as the
    drive is raised.
    """
    g_mb = np.asarray(params.g_mb, dtype=float)
    omega_b = np.asarray(params.omega_b, dtype=float)
    if G_target < 0 or np.any(g_mb <= 0):
        raise ParameterError("coupling target needs G_target >= 0 and g_mb > 0")
    if G_target == 0:
        return np.zeros(2, dtype=complex), np.zeros(2)

    full_shift = G_target**2 / (2.0 * omega_b)
    best: tuple[float, np.ndarray] | None = None
    for k in range(2):
        j = 1 - k

        def drive_scale(s_j: float, k=k, j=j) -> tuple[float, np.ndarray, np.ndarray]:
            shifts = np.empty(2)
            shifts[k] = -full_shift[k]
            shifts[j] = s_j
            _, m_unit = solve_linear_amplitudes(params, params.delta_m0 + shifts, np.ones(2))
            if m_unit[k] == 0:
                return math.inf, shifts, m_unit
            return G_target / (math.sqrt(2.0) * g_mb[k] * abs(m_unit[k])), shifts, m_unit

        def mismatch(s_j: float, j=j, drive_scale=drive_scale) -> float:
            scale, _, m_unit = drive_scale(s_j)
            if not math.isfinite(scale):
                return math.inf
            return s_j + g_mb[j] ** 2 * scale**2 * abs(m_unit[j]) ** 2 / omega_b[j]

        s_j = _nearest_root(mismatch, -full_shift[j])
        if s_j is None:
            continue
        scale, shifts, _ = drive_scale(s_j)
        if best is None or scale < best[0]:
            best = (scale, shifts)

    if best is None:
        raise MeanFieldError(f"no common drive reaches max |G_eff| = {G_target:.6g} rad/s")
    scale, shifts = best
    logger.debug("calibrated drive %.6e rad/s, shifts %s rad/s", scale, shifts)
    return np.full(2, scale, dtype=complex), shifts / g_mb


def calibrate_drive(params: SystemParams, G_target: float) -> np.ndarray:
    """Common drive Ω (per subsystem) giving max_k |G_eff,k| = G_target.

    Exact for asymmetric points: the displacement of the subsystem below
    the target is solved self-consistently, not assumed.
    """
    omega, _ = _calibrate(params, G_target)
    return omega


def resolve_drive(params: SystemParams, consts: PhysicalConstants | None = None) -> np.ndarray:
    """Drive Ω per subsystem: coupling target, then Ω override, then B0 formula."""
    if params.G_target is not None:
        return calibrate_drive(params, params.G_target)
    if params.Omega_override is not None:
        return np.asarray(params.Omega_override, dtype=complex)
    return np.asarray(derive_drive(params, consts).Omega_rabi, dtype=complex)


def solve_steady_state(
    params: SystemParams,
    consts: PhysicalConstants | None = None,
    tol: float = 1e-12,
    max_iter: int = 500,
) -> SteadyState:
    """Resolve the drive and solve the mean field.

    Calibrated points start from the calibrated displacement, so the loop
    lands on the steady state the calibration was made for.
    """
    if params.G_target is not None:
        omega, q0 = _calibrate(params, params.G_target)
        return solve_self_consistent(params, omega, tol=tol, max_iter=max_iter, q0=q0)
    return solve_self_consistent(params, resolve_drive(params, consts), tol=tol, max_iter=max_iter)
