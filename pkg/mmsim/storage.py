"""Result files: sweep CSV, JSON sidecar and reports, matrix dumps."""
import csv
import json
import logging
from pathlib import Path

import numpy as np

from mmsim.errors import OutputError
from mmsim.physics.params import SystemParams
from mmsim.schemas import EntanglementReport
from mmsim.sweep.engine import SweepResult

logger = logging.getLogger(__name__)

NA = "NA"


def format_float(value: float | None) -> str:
    """Shortest round-trip text for a float; ``NA`` for missing or non-finite."""
    if value is None or not np.isfinite(value):
        return NA
    return repr(float(value))


def sweep_header(result: SweepResult) -> list[str]:
    return [axis.name for axis in result.spec.axes] + ["stability_margin", "flag", *result.spec.pairs]


def sweep_rows(result: SweepResult) -> list[list[str]]:
    """CSV rows in grid order; E_N is ``NA`` where the point was not evaluated."""
    rows = []
    for point, report in zip(result.points, result.reports):
        row = [format_float(x) for x in point]
        row.append(format_float(report.stability_margin))
        row.append(report.flag)
        row.extend(format_float(report.values.get(pair)) for pair in result.spec.pairs)
        rows.append(row)
    return rows


def _ensure_parent(path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create directory {path.parent}: {exc}") from exc


def write_sweep_csv(path: str | Path, result: SweepResult) -> Path:
    """Write the sweep table; one row per grid point."""
    path = Path(path)
    _ensure_parent(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(sweep_header(result))
            writer.writerows(sweep_rows(result))
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    logger.info("wrote %s (%d rows)", path, len(result.reports))
    return path


def _write_text(path: Path, text: str) -> Path:
    _ensure_parent(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def write_sidecar(path: str | Path, result: SweepResult) -> Path:
    """Metadata JSON describing how the CSV was produced."""
    path = Path(path)
    _write_text(path, result.metadata.model_dump_json(indent=2) + "\n")
    logger.info("wrote %s", path)
    return path


def sidecar_path(csv_path: str | Path) -> Path:
    """``fig2a.csv`` → ``fig2a.json``."""
    return Path(csv_path).with_suffix(".json")


def write_sweep(csv_path: str | Path, result: SweepResult) -> tuple[Path, Path]:
    """CSV plus its metadata sidecar."""
    return write_sweep_csv(csv_path, result), write_sidecar(sidecar_path(csv_path), result)


def write_report_json(
    path: str | Path,
    report: EntanglementReport,
    params: SystemParams | None = None,
    overrides: list[str] | None = None,
) -> Path:
    """Single-point report together with the resolved parameters it came from."""
    payload = {
        "params": None if params is None else params.model_dump(mode="json"),
        "overrides": list(overrides or []),
        "report": report.model_dump(mode="json"),
    }
    return _write_text(Path(path), json.dumps(payload, indent=2) + "\n")


def _save_matrix(path: Path, matrix: np.ndarray) -> Path:
    _ensure_parent(path)
    try:
        np.savetxt(path, matrix, fmt="%.17g", delimiter=",")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    logger.info("wrote %s", path)
    return path


def dump_matrices(out_dir: str | Path, M: np.ndarray, D: np.ndarray) -> tuple[Path, Path]:
    """Drift and diffusion matrices as ``drift.csv`` and ``diffusion.csv``."""
    out_dir = Path(out_dir)
    return _save_matrix(out_dir / "drift.csv", M), _save_matrix(out_dir / "diffusion.csv", D)


def dump_covariance(path: str | Path, V: np.ndarray) -> Path:
    return _save_matrix(Path(path), V)


def read_sweep_csv(path: str | Path) -> list[dict[str, str]]:
    """Rows of a sweep CSV as dictionaries (for inspection and tests)."""
    try:
        with Path(path).open(newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc


def load_sidecar(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc
