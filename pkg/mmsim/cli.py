"""Command-line entry point: ``mmsim report|sweep|stability|preset|dump``."""
import argparse
import json
import logging
import sys
from pathlib import Path

from mmsim import __version__
from mmsim.config import configure_logging, load_params, settings
from mmsim.errors import ConfigError, InstabilityError, MMSimError, UnphysicalStateError
from mmsim.physics.entanglement import ALL_PAIRS
from mmsim.physics.params import SystemParams, rad_to_hz, validate
from mmsim.pipeline import PointResult, ReportRunner
from mmsim.render import render_sweep
from mmsim.schemas import SweepAxis, SweepSpec
from mmsim.storage import dump_covariance, dump_matrices, write_report_json, write_sweep
from mmsim.sweep.engine import run_sweep
from mmsim.sweep.presets import PRESET_NAMES, preset

logger = logging.getLogger(__name__)


EXIT_CODES = """exit status:
  0  success
  1  numerical failure at the point (mean field, eigen-solver, covariance)
  2  invalid configuration or parameters
  3  report point is dynamically unstable
  4  output cannot be written
"""


def _add_point_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="TOML parameter file (default: bundled Table 1)")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a dotted TOML key (file units) or an alias such as Delta1 (units of omega_b)",
    )


def _add_dump_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dump-matrices", type=Path, metavar="DIR", help="write drift.csv and diffusion.csv")
    parser.add_argument("--dump-covariance", type=Path, metavar="PATH", help="write the covariance matrix")


def _add_sweep_options(parser: argparse.ArgumentParser) -> None:
    _add_point_options(parser)
    parser.add_argument("--preset", help="figure preset, see 'mmsim preset --list'")
    parser.add_argument(
        "--axis",
        action="append",
        default=[],
        metavar="NAME:START:STOP:COUNT[:UNIT]",
        help="custom sweep axis (repeat for a 2-D sweep)",
    )
    parser.add_argument("--pairs", help="comma-separated pair ids for a custom sweep (default: all 15)")
    parser.add_argument("--points", type=int, help="resample every axis to this many points")
    parser.add_argument("--out", type=Path, help="CSV path (default: <name>.csv); sidecar goes next to it")
    parser.add_argument("--workers", type=int, help="worker processes (default: MMSIM_WORKERS)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmsim",
        description="Steady-state entanglement of two coupled cavity-magnon-phonon systems.",
        epilog=EXIT_CODES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    report = sub.add_parser("report", help="mean field, stability margin and all 15 negativities at one point")
    _add_point_options(report)
    _add_dump_options(report)
    report.add_argument("--json", type=Path, metavar="PATH", help="write the report as JSON")

    dump = sub.add_parser("dump", help="write M, D (and V when stable) for one point")
    _add_point_options(dump)
    _add_dump_options(dump)

    sweep = sub.add_parser("sweep", help="negativities over a 1-D or 2-D grid")
    _add_sweep_options(sweep)
    sweep.add_argument("--render", action="store_true", help="write one PNG per pair next to the CSV")

    stability = sub.add_parser("stability", help="stability margin over a 1-D or 2-D grid")
    _add_sweep_options(stability)

    presets = sub.add_parser("preset", help="list presets or print one as JSON")
    presets.add_argument("name", nargs="?", help="preset name")
    presets.add_argument("--list", action="store_true", help="print every preset name")
    presets.add_argument("--points", type=int, help="resample every axis to this many points")
    return parser


def parse_axis(text: str) -> SweepAxis:
    """``Delta1:-2:2:201`` or ``hop_Gamma:0:10:201:kappa_c``."""
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise ConfigError(f"axis must look like NAME:START:STOP:COUNT[:UNIT], got {text!r}")
    fields = dict(zip(("name", "start", "stop", "count", "unit"), parts))
    try:
        return SweepAxis.model_validate(fields)
    except ValueError as exc:
        raise ConfigError(f"invalid axis {text!r}: {exc}") from exc


def resolve_spec(args: argparse.Namespace) -> SweepSpec:
    """Sweep spec from ``--preset`` or ``--axis``/``--pairs``."""
    if args.preset and args.axis:
        raise ConfigError("use either --preset or --axis, not both")
    if args.preset:
        spec = preset(
            args.preset,
            count_2d=settings.grid_points_2d,
            count_1d=settings.grid_points_1d,
            prescan_count=settings.prescan_points,
        )
    elif args.axis:
        pairs = tuple(p.strip() for p in args.pairs.split(",")) if args.pairs else tuple(p.id for p in ALL_PAIRS)
        try:
            spec = SweepSpec(
                axes=tuple(parse_axis(a) for a in args.axis),
                pairs=pairs,
            )
        except ValueError as exc:
            raise ConfigError(f"invalid sweep: {exc}") from exc
    else:
        raise ConfigError("a sweep needs --preset or --axis")
    if args.points is not None:
        if args.points < 2:
            raise ConfigError("--points must be at least 2")
        spec = spec.with_points(args.points)
    return spec


def _run_point(args: argparse.Namespace) -> tuple[SystemParams, PointResult]:
    params = load_params(args.config, args.overrides)
    for note in validate(params).notes:
        logger.info(note)
    return params, ReportRunner().run(params)


def _write_dumps(args: argparse.Namespace, result: PointResult) -> None:
    if args.dump_matrices is not None:
        dump_matrices(args.dump_matrices, result.M, result.D)
    if args.dump_covariance is not None:
        if result.covariance is None:
            logger.warning("no covariance at this point (%s); skipping dump", result.report.flag)
        else:
            dump_covariance(args.dump_covariance, result.covariance.V)


def _fmt_pair(values, scale: float = 1.0) -> str:
    return "(" + ", ".join(f"{v / scale:.6g}" for v in values) + ")"


def print_report(params: SystemParams, result: PointResult) -> None:
    report = result.report
    wb = params.omega_ref
    mf = report.mean_field
    print(f"omega_b/2pi = {rad_to_hz(wb):.6g} Hz; frequencies below in units of omega_b")
    print("mean field:")
    print(f"  |<m>|          {_fmt_pair(mf.m_abs)}")
    print(f"  |<c>|          {_fmt_pair(mf.c_abs)}")
    print(f"  <q>            {_fmt_pair(mf.q_avg)}")
    print(f"  Delta_m_eff    {_fmt_pair(mf.delta_m_eff, wb)}")
    print(f"  |G_eff|        {_fmt_pair(mf.G_abs, wb)}")
    print(f"  iterations     {mf.iterations} (residual {mf.residual:.3e})")
    print(f"stability margin: {report.stability_margin:.6g} rad/s ({report.stability_margin / wb:.6g} omega_b)")
    if report.residual_norm is not None:
        print(f"lyapunov residual: {report.residual_norm:.3e}")
    if report.flags:
        print(f"flags: {', '.join(report.flags)}")
    print("logarithmic negativity:")
    for pair, value in report.values.items():
        print(f"  {pair:<6} {value:.6f}")


def cmd_report(args: argparse.Namespace) -> int:
    params, result = _run_point(args)
    _write_dumps(args, result)
    report = result.report
    if args.json is not None:
        write_report_json(args.json, report, params, args.overrides)
    if not report.stable:
        print(f"stability margin: {report.stability_margin:.6g} rad/s")
        raise InstabilityError(
            f"unstable drift matrix (max Re lambda = {report.stability_margin:.6g} rad/s)",
            report.stability_margin,
        )
    if "unphysical" in report.flags:
        raise UnphysicalStateError(
            f"covariance violates the uncertainty relation (offset {report.min_symplectic_offset:.3e})"
        )
    print_report(params, result)
    return 0


def cmd_dump(args: argparse.Namespace) -> int:
    if args.dump_matrices is None and args.dump_covariance is None:
        raise ConfigError("dump needs --dump-matrices and/or --dump-covariance")
    _, result = _run_point(args)
    _write_dumps(args, result)
    print(f"stability margin: {result.report.stability_margin:.6g} rad/s")
    return 0


def _sweep(args: argparse.Namespace, stability_only: bool) -> int:
    spec = resolve_spec(args)
    if stability_only:
        spec = spec.model_copy(update={"pairs": ()})
    params = load_params(args.config, args.overrides)
    result = run_sweep(
        spec,
        params,
        workers=args.workers,
        stability_only=stability_only,
        overrides=args.overrides,
    )
    suffix = "_stability" if stability_only else ""
    out = args.out or Path(f"{spec.name}{suffix}.csv")
    csv_path, json_path = write_sweep(out, result)
    print(f"{csv_path} ({result.metadata.points} points, {result.metadata.unstable_points} unstable)")
    print(json_path)
    if getattr(args, "render", False):
        for path in render_sweep(result, csv_path.parent):
            print(path)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    return _sweep(args, stability_only=False)


def cmd_stability(args: argparse.Namespace) -> int:
    return _sweep(args, stability_only=True)


def cmd_preset(args: argparse.Namespace) -> int:
    if args.list:
        for name in PRESET_NAMES:
            print(name)
        return 0
    if not args.name:
        raise ConfigError("preset needs a name or --list")
    spec = preset(
        args.name,
        count_2d=settings.grid_points_2d,
        count_1d=settings.grid_points_1d,
        prescan_count=settings.prescan_points,
    )
    if args.points is not None:
        spec = spec.with_points(args.points)
    print(json.dumps(spec.model_dump(mode="json"), indent=2))
    return 0


COMMANDS = {
    "report": cmd_report,
    "dump": cmd_dump,
    "sweep": cmd_sweep,
    "stability": cmd_stability,
    "preset": cmd_preset,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: None, 1: "INFO"}.get(args.verbose, "DEBUG")
    configure_logging(level)
    try:
        return COMMANDS[args.command](args)
    except MMSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for note in getattr(exc, "__notes__", ()):
            print(f"  {note}", file=sys.stderr)
        return exc.exit_code
