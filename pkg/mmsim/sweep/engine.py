"""Sweep engine: grids, per-point evaluation, prescans and worker dispatch."""
import hashlib
import json
import logging
import math
import time
from datetime import datetime, timezone

import numpy as np
from pydantic import BaseModel, ConfigDict

from mmsim import __version__
from mmsim.config import Settings, settings as default_settings
from mmsim.errors import ConfigError, MMSimError, ParameterError
from mmsim.jobs.dispatcher import run_jobs
from mmsim.physics.entanglement import ModePair
from mmsim.physics.params import SystemParams, validate
from mmsim.pipeline import ReportRunner, describe_point
from mmsim.schemas import EntanglementReport, SweepAxis, SweepMetadata, SweepSpec

logger = logging.getLogger(__name__)

# 1-D axes are cut into this many tasks per worker.
_SLICES_PER_WORKER = 4


class SweepResult(BaseModel):
    """Row-major sweep output: one report per grid point."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: SweepSpec
    coordinates: list[np.ndarray]
    points: list[tuple[float, ...]]
    reports: list[EntanglementReport]
    metadata: SweepMetadata

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.coordinates)

    def grid(self, pair: str) -> np.ndarray:
        """E_N of one pair reshaped to the grid; NaN where no value exists."""
        values = [r.values.get(pair, np.nan) for r in self.reports]
        return np.asarray(values, dtype=float).reshape(self.shape)


class RowTask(BaseModel):
    """One grid row, or a slice of a 1-D axis, shipped to a worker process."""

    params: SystemParams
    axes: tuple[SweepAxis, ...]
    values: list[tuple[float, ...]]
    pairs: tuple[str, ...]
    stability_only: bool = False
    settings: dict


def task_length(coordinates: list[np.ndarray], workers: int) -> int:
    """Points per worker task: a full row in 2-D, a slice of the axis in 1-D."""
    if len(coordinates) == 2:
        return len(coordinates[-1])
    count = len(coordinates[0])
    return max(1, math.ceil(count / (max(workers, 1) * _SLICES_PER_WORKER)))


def build_grid(spec: SweepSpec) -> list[np.ndarray]:
    """Axis coordinates, endpoints included."""
    return [np.linspace(axis.start, axis.stop, axis.count) for axis in spec.axes]


def grid_points(coordinates: list[np.ndarray]) -> list[tuple[float, ...]]:
    """Row-major point list: the last axis varies fastest."""
    if len(coordinates) == 1:
        return [(float(x),) for x in coordinates[0]]
    return [(float(x), float(y)) for x in coordinates[0] for y in coordinates[1]]


def apply_constraints(params: SystemParams, constraints: dict[str, float]) -> SystemParams:
    """Fixed overrides (multiples of ω_b, temperature in K)."""
    for name, value in constraints.items():
        try:
            params = params.with_override(name, value)
        except ParameterError as exc:
            raise ConfigError(f"invalid sweep constraint {name!r}: {exc}") from exc
    return params


def apply_axis_values(
    params: SystemParams,
    axes: tuple[SweepAxis, ...],
    values: tuple[float, ...],
) -> SystemParams:
    for axis, value in zip(axes, values):
        params = params.with_override(axis.name, value, axis.unit)
    return params


def evaluate_point(
    params: SystemParams,
    pairs: tuple[ModePair, ...],
    stability_only: bool = False,
    settings: Settings | None = None,
) -> EntanglementReport:
    """Report for one point; numerical failures become an ``error:<Kind>`` flag."""
    try:
        return ReportRunner(settings=settings).run(params, pairs, stability_only).report
    except MMSimError as exc:
        logger.warning("point failed (%s): %s", type(exc).__name__, describe_point(params))
        return EntanglementReport(flags=[f"error:{type(exc).__name__}"])


def evaluate_row(task: RowTask) -> list[EntanglementReport]:
    """Evaluate one grid row; module level so worker processes can import it."""
    settings = Settings(**task.settings)
    pairs = tuple(ModePair.parse(p) for p in task.pairs)
    return [
        evaluate_point(
            apply_axis_values(task.params, task.axes, values),
            pairs,
            task.stability_only,
            settings,
        )
        for values in task.values
    ]


def params_hash(params: SystemParams, spec: SweepSpec) -> str:
    """sha256 over the resolved parameters and sweep definition."""
    payload = json.dumps(
        {"params": params.model_dump(mode="json"), "spec": spec.model_dump(mode="json")},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def resolve_prescan(
    spec: SweepSpec,
    params: SystemParams,
    workers: int,
    settings: Settings,
) -> dict[str, float]:
    """Cavity detunings maximizing the prescan pair on a coarse Δ1 × Δ2 grid."""
    prescan = spec.prescan
    coarse = SweepSpec(
        name=f"{spec.name}-prescan",
        axes=(
            SweepAxis(name="Delta1", start=prescan.start, stop=prescan.stop, count=prescan.count),
            SweepAxis(name="Delta2", start=prescan.start, stop=prescan.stop, count=prescan.count),
        ),
        pairs=(prescan.pair,),
    )
    result = _run_grid(coarse, params, workers, settings, stability_only=False)
    values = result.grid(prescan.pair)
    if np.all(np.isnan(values)):
        logger.warning("prescan for %s found no stable point; keeping Delta1 = Delta2 = 1", spec.name)
        return {"Delta1": 1.0, "Delta2": 1.0}
    i, j = np.unravel_index(np.nanargmax(values), values.shape)
    best = {
        "Delta1": float(result.coordinates[0][i]),
        "Delta2": float(result.coordinates[1][j]),
    }
    logger.info(
        "prescan for %s: max %s = %.4g at Delta1=%.4g, Delta2=%.4g",
        spec.name, prescan.pair, values[i, j], best["Delta1"], best["Delta2"],
    )
    return best


def _run_grid(
    spec: SweepSpec,
    params: SystemParams,
    workers: int,
    settings: Settings,
    stability_only: bool,
) -> SweepResult:
    coordinates = build_grid(spec)
    points = grid_points(coordinates)
    row_length = task_length(coordinates, workers)
    settings_dump = settings.model_dump()
    tasks = [
        RowTask(
            params=params,
            axes=spec.axes,
            values=points[start:start + row_length],
            pairs=spec.pairs,
            stability_only=stability_only,
            settings=settings_dump,
        )
        for start in range(0, len(points), row_length)
    ]
    started = time.perf_counter()
    rows = run_jobs(evaluate_row, tasks, workers)
    reports = [report for row in rows for report in row]
    metadata = SweepMetadata(
        spec=spec,
        params=params.model_dump(mode="json"),
        params_hash=params_hash(params, spec),
        code_version=__version__,
        points=len(reports),
        unstable_points=sum(1 for r in reports if "unstable" in r.flags),
        failed_points=sum(1 for r in reports if r.flag.startswith("error:")),
        elapsed_s=time.perf_counter() - started,
        workers=workers,
        created_at=datetime.now(timezone.utc),
    )
    return SweepResult(
        spec=spec,
        coordinates=coordinates,
        points=points,
        reports=reports,
        metadata=metadata,
    )


def run_sweep(
    spec: SweepSpec,
    params: SystemParams,
    workers: int | None = None,
    stability_only: bool = False,
    settings: Settings | None = None,
    overrides: list[str] | None = None,
) -> SweepResult:
    """
    Evaluate a sweep over its grid.

    Constraints are applied to ``params`` first, then the prescan (if any)
    fixes the cavity detunings, then every grid point is evaluated. Results
    are identical for any worker count.
    """
    settings = settings or default_settings
    workers = workers or settings.workers
    base = apply_constraints(params, spec.constraints)
    report = validate(base)
    if not report.ok:
        raise ConfigError("invalid sweep parameters: " + "; ".join(report.violations))

    resolved: dict[str, float] = dict(spec.constraints)
    if spec.prescan is not None:
        best = resolve_prescan(spec, base, workers, settings)
        base = apply_constraints(base, best)
        resolved.update(best)

    logger.info(
        "sweep %s: %s points, pairs %s",
        spec.name, "x".join(str(a.count) for a in spec.axes), ", ".join(spec.pairs),
    )
    result = _run_grid(spec, base, workers, settings, stability_only)
    result.metadata.overrides = list(overrides or [])
    result.metadata.resolved_constraints = resolved
    logger.info(
        "sweep %s done: %d points, %d unstable, %d failed in %.1f s",
        spec.name,
        result.metadata.points,
        result.metadata.unstable_points,
        result.metadata.failed_points,
        result.metadata.elapsed_s,
    )
    return result
