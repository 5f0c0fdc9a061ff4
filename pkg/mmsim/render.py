"""PNG rendering of sweep results."""
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from mmsim.errors import OutputError  # noqa: E402
from mmsim.sweep.engine import SweepResult  # noqa: E402

logger = logging.getLogger(__name__)

_AXIS_LABELS = {
    "Delta1": r"$\Delta_1$",
    "Delta2": r"$\Delta_2$",
    "Delta_m1": r"$\Delta_{m1}$",
    "Delta_m2": r"$\Delta_{m2}$",
    "hop_Gamma": r"$\Gamma$",
    "Delta_sym": r"$\Delta_1 = \Delta_2$",
    "Delta_antisym": r"$\Delta_1 = -\Delta_2$",
}

_UNIT_LABELS = {"omega_b": r"$\omega_b$", "kappa_c": r"$\kappa_c$"}


def axis_label(name: str, unit: str) -> str:
    return f"{_AXIS_LABELS.get(name, name)} / {_UNIT_LABELS[unit]}"


def _save(fig, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=130, bbox_inches="tight")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)
    logger.info("wrote %s", path)
    return path


def render_sweep(result: SweepResult, out_dir: str | Path) -> list[Path]:
    """
    One PNG per pair, ``<name>_<pair>.png``: a density plot for 2-D sweeps,
    a line plot for 1-D sweeps. Unevaluated points are left blank.
    """
    out_dir = Path(out_dir)
    spec = result.spec

    if len(spec.axes) == 1:
        axis = spec.axes[0]
        paths = []
        for pair in spec.pairs:
            fig, ax = plt.subplots(figsize=(6, 4))
            ax.plot(result.coordinates[0], result.grid(pair))
            ax.set_xlabel(axis_label(axis.name, axis.unit))
            ax.set_ylabel(rf"$E_N$ ({pair})")
            ax.set_title(f"{spec.name}: {pair}")
            paths.append(_save(fig, out_dir / f"{spec.name}_{pair}.png"))
        return paths

    x_axis, y_axis = spec.axes
    xs, ys = result.coordinates
    paths = []
    for pair in spec.pairs:
        fig, ax = plt.subplots(figsize=(5, 4))
        # grid is indexed [x, y]; imshow wants rows along y
        im = ax.imshow(
            result.grid(pair).T,
            origin="lower",
            extent=[xs[0], xs[-1], ys[0], ys[-1]],
            aspect="auto",
            cmap="viridis",
        )
        cbar = fig.colorbar(im, ax=ax)
        cbar.set_label(rf"$E_N$ ({pair})")
        ax.set_xlabel(axis_label(x_axis.name, x_axis.unit))
        ax.set_ylabel(axis_label(y_axis.name, y_axis.unit))
        ax.set_title(f"{spec.name}: {pair}")
        paths.append(_save(fig, out_dir / f"{spec.name}_{pair}.png"))
    return paths
