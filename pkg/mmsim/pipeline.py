"""Per-point pipeline: mean field → dynamics → stability gate → covariance → negativity."""
import logging
import time

import numpy as np
from pydantic import BaseModel, ConfigDict

from mmsim.config import Settings, settings as default_settings
from mmsim.errors import MMSimError
from mmsim.physics.dynamics import build_diffusion, build_drift, stability_margin
from mmsim.physics.entanglement import ALL_PAIRS, ModePair, negativities
from mmsim.physics.lyapunov import CovarianceMatrix, solve_lyapunov
from mmsim.physics.meanfield import SteadyState, solve_steady_state
from mmsim.physics.params import PhysicalConstants, SystemParams, rad_to_hz
from mmsim.schemas import EntanglementReport, MeanFieldSummary, StepRecord

logger = logging.getLogger(__name__)


class PointResult(BaseModel):
    """Report plus the intermediate objects, for dumps and diagnostics."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    report: EntanglementReport
    steady_state: SteadyState | None = None
    M: np.ndarray | None = None
    D: np.ndarray | None = None
    covariance: CovarianceMatrix | None = None


def describe_point(params: SystemParams) -> str:
    """Short human-readable coordinates of a parameter point."""
    wb = params.omega_ref
    d = params.delta_c / wb
    dm = params.delta_m0 / wb
    return (
        f"Delta=({d[0]:.4g}, {d[1]:.4g}) Delta_m=({dm[0]:.4g}, {dm[1]:.4g}) "
        f"hop_Gamma={params.hop_Gamma / wb:.4g} [omega_b], T={params.temperature:.4g} K, "
        f"omega_b/2pi={rad_to_hz(wb):.6g} Hz"
    )


def summarize(ss: SteadyState) -> MeanFieldSummary:
    return MeanFieldSummary(
        m_abs=np.abs(ss.m_avg).tolist(),
        c_abs=np.abs(ss.c_avg).tolist(),
        q_avg=np.asarray(ss.q_avg, dtype=float).tolist(),
        delta_m_eff=np.asarray(ss.Delta_m_eff, dtype=float).tolist(),
        G_abs=np.abs(ss.G_eff).tolist(),
        iterations=ss.iterations,
        residual=ss.residual,
    )


class ReportRunner:
    """Runs the named steps for one parameter point."""

    STEP_NAMES = [
        "mean_field",
        "drift",
        "diffusion",
        "stability_gate",
        "lyapunov",
        "negativity",
    ]

    def __init__(
        self,
        consts: PhysicalConstants | None = None,
        settings: Settings | None = None,
    ):
        self.consts = consts or PhysicalConstants()
        self.settings = settings or default_settings

    def run(
        self,
        params: SystemParams,
        pairs: tuple[ModePair, ...] = ALL_PAIRS,
        stability_only: bool = False,
    ) -> PointResult:
        """Evaluate one point; upstream errors are re-raised with a point note."""
        state: dict = {}
        result = PointResult(report=EntanglementReport())
        steps = result.report.steps

        for step_name in self.STEP_NAMES:
            if stability_only and step_name in ("diffusion", "lyapunov", "negativity"):
                continue
            if state.get("halt"):
                steps.append(StepRecord(step_name=step_name, status="skipped"))
                continue
            started = time.perf_counter()
            try:
                self._execute_step(step_name, params, pairs, state, result)
            except MMSimError as exc:
                steps.append(
                    StepRecord(
                        step_name=step_name,
                        status="failed",
                        elapsed_s=time.perf_counter() - started,
                        error=str(exc),
                    )
                )
                exc.add_context(f"while running step {step_name} at {describe_point(params)}")
                raise
            steps.append(
                StepRecord(
                    step_name=step_name,
                    status="completed",
                    elapsed_s=time.perf_counter() - started,
                )
            )
        return result

    def _execute_step(
        self,
        step_name: str,
        params: SystemParams,
        pairs: tuple[ModePair, ...],
        state: dict,
        result: PointResult,
    ) -> None:
        report = result.report
        if step_name == "mean_field":
            ss = solve_steady_state(
                params,
                self.consts,
                tol=self.settings.meanfield_tol,
                max_iter=self.settings.meanfield_max_iter,
            )
            result.steady_state = ss
            report.mean_field = summarize(ss)
        elif step_name == "drift":
            result.M = build_drift(params, result.steady_state)
        elif step_name == "diffusion":
            result.D = build_diffusion(params, self.consts)
        elif step_name == "stability_gate":
            margin = stability_margin(result.M)
            report.stability_margin = margin
            if margin >= 0:
                logger.debug("unstable point (margin %.3e): %s", margin, describe_point(params))
                report.flags.append("unstable")
                state["halt"] = True
        elif step_name == "lyapunov":
            cov = solve_lyapunov(
                result.M,
                result.D,
                residual_tol=self.settings.lyapunov_residual_tol,
                physicality_tol=self.settings.physicality_tol,
                condition_limit=self.settings.condition_limit,
            )
            result.covariance = cov
            report.residual_norm = cov.residual_norm
            report.min_symplectic_offset = cov.min_symplectic_offset
            if not cov.physical:
                report.flags.append("unphysical")
                state["halt"] = True
            report.flags.extend(w.split(":", 1)[0] for w in cov.warnings)
        elif step_name == "negativity":
            report.values = negativities(
                result.covariance.V, pairs, rtol=self.settings.symplectic_rtol
            )
        else:
            raise ValueError(f"Unknown step: {step_name}")


def full_report(
    params: SystemParams,
    pairs: tuple[ModePair, ...] = ALL_PAIRS,
    consts: PhysicalConstants | None = None,
    settings: Settings | None = None,
) -> EntanglementReport:
    """Negativities of the requested pairs (all 15 by default) at one point."""
    return ReportRunner(consts, settings).run(params, pairs).report
