# haptickit/cli.py
"""
Command-line front end. Angles on the command line are in degrees, lengths
in meters; every number is printed with 9 significant digits.

Exit codes: 0 success, 1 domain error (error name on stderr) or failed
output write, 2 usage error.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import device, optimize, orthoglide, report, transmission, wrist, workspace
from .config import Settings, configure_logging
from .errors import HaptickitError, error_names
from .model import DeviceGeometry, load_geometry_file, validate_geometry
from .utils import fmt, fmt_row, to_degrees, to_radians

log = logging.getLogger(__name__)


def _geometry_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("geometry")
    g.add_argument("--geom", metavar="FILE", help="geometry JSON (default: $HAPTICKIT_GEOMETRY or built-in)")
    g.add_argument("--leg-length", type=float, metavar="L")
    g.add_argument("--stroke", type=float, nargs=2, metavar=("MIN", "MAX"))
    g.add_argument("--half-cone", type=float, metavar="DEG")
    g.add_argument("--wrist-limit", type=float, metavar="DEG")
    g.add_argument("--unconstrained", action="store_true", help="unbounded strokes and an open parallelogram cone")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _geometry_options()
    parser = argparse.ArgumentParser(
        prog="haptickit",
        description="Kinematics and sizing of a 6-dof haptic device.",
        epilog="domain errors (exit 1): " + ", ".join(error_names()),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name: str, help_: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_, parents=[common])

    for name, help_ in (("ik", "prismatic joints for a platform position"),
                        ("jacobian", "translation Jacobian and amplification factors")):
        c = cmd(name, help_)
        c.add_argument("xyz", type=float, nargs=3, metavar="XYZ", help="platform position x y z (m)")

    c = cmd("fk", "platform position from prismatic joints")
    c.add_argument("rho", type=float, nargs=3, metavar="RHO", help="prismatic joints rho1 rho2 rho3 (m)")

    c = cmd("wrist-ik", "wrist joint angles (deg) for a quaternion")
    c.add_argument("quat", type=float, nargs=4, metavar="Q", help="quaternion qw qx qy qz")

    c = cmd("wrist-fk", "quaternion for wrist joint angles (deg)")
    c.add_argument("theta", type=float, nargs=3, metavar="THETA", help="joint angles theta1 theta2 theta3 (deg)")

    c = cmd("transmission", "double Cardan transfer of one leg over a motor revolution")
    c.add_argument("xyz", type=float, nargs=3, metavar="XYZ", help="platform position x y z (m)")
    c.add_argument("--leg", type=int, choices=(1, 2, 3), default=1)
    c.add_argument("--samples", type=int, default=8)

    c = cmd("map", "feasibility and conditioning over a grid")
    c.add_argument("--bounds", type=float, nargs=6, required=True,
                   metavar=("XMIN", "XMAX", "YMIN", "YMAX", "ZMIN", "ZMAX"))
    c.add_argument("--res", type=int, required=True)
    c.add_argument("--out", metavar="FILE")
    c.add_argument("--format", choices=[f.value for f in workspace.ExportFormat], default="csv")

    c = cmd("cube", "largest axis-aligned cube in the workspace")
    c.add_argument("--tol", type=float, default=None, help="bisection tolerance (default 1e-4 L)")

    c = cmd("optimize", "minimal leg length for a cube and an amplification bound")
    c.add_argument("--edge", type=float, required=True)
    c.add_argument("--psi", type=float, required=True)
    c.add_argument("--pdf", metavar="FILE")

    c = cmd("sweep", "cube and dexterity over a list of leg lengths")
    c.add_argument("--lengths", type=float, nargs="+", required=True)
    c.add_argument("--edge", type=float, required=True)
    c.add_argument("--psi", type=float, required=True)
    c.add_argument("--out", metavar="FILE")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def resolve_geometry(args: argparse.Namespace, settings: Settings) -> DeviceGeometry:
    """--geom beats $HAPTICKIT_GEOMETRY beats the built-in default; flags override fields."""
    path = args.geom or settings.geometry_path
    geom = load_geometry_file(path) if path else DeviceGeometry.default()
    if args.unconstrained:
        geom = replace(DeviceGeometry.unconstrained(geom.leg_length),
                       wrist_pitch_yaw_limit=geom.wrist_pitch_yaw_limit, variant=geom.variant)
    if args.leg_length is not None:
        geom = geom.with_leg_length(args.leg_length)
    if args.stroke is not None:
        geom = replace(geom, stroke_min=args.stroke[0], stroke_max=args.stroke[1])
    if args.half_cone is not None:
        geom = replace(geom, parallelogram_half_cone=to_radians(args.half_cone))
    if args.wrist_limit is not None:
        geom = replace(geom, wrist_pitch_yaw_limit=to_radians(args.wrist_limit))
    return validate_geometry(geom)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


# --- Subcommands --------------------------------------------------------------
def _ik(args, geom, settings) -> None:
    print(f"rho = {fmt_row(orthoglide.ik_translation(args.xyz, geom).rho)}")


def _fk(args, geom, settings) -> None:
    print(f"p = {fmt_row(orthoglide.fk_translation(args.rho, geom))}")


def _wrist_ik(args, geom, settings) -> None:
    q = np.array(args.quat)
    norm = np.linalg.norm(q)
    if not norm > 0.0:
        raise ValueError("quaternion must be nonzero")
    theta = wrist.ik_wrist(q / norm).theta
    print(f"theta = {fmt_row(to_degrees(t) for t in theta)}")


def _wrist_fk(args, geom, settings) -> None:
    print(f"q = {fmt_row(wrist.fk_wrist([to_radians(t) for t in args.theta]))}")


def _jacobian(args, geom, settings) -> None:
    J = orthoglide.jacobian_translation(args.xyz, geom).matrix
    amp = orthoglide.velocity_amplification(args.xyz, geom)
    for row in J:
        print(fmt_row(row))
    print(f"sigma = {fmt_row(amp.sigma)}")
    print(f"kappa = {fmt(amp.kappa)}")


def _transmission(args, geom, settings) -> None:
    if args.samples < 1:
        raise ValueError(f"--samples must be >= 1, got {args.samples}")
    print(f"beta = {fmt(to_degrees(transmission.bend_angle(args.xyz, geom, args.leg)))}")
    print("phi_motor phi_after_u1 phi_after_u2")
    for phi in np.linspace(0.0, 2.0 * math.pi, args.samples, endpoint=False):
        s = transmission.double_cardan_transfer(phi, args.xyz, geom, args.leg)
        print(fmt_row(to_degrees(v) for v in (s.phi_motor, s.phi_after_u1, s.phi_after_u2)))


def _map(args, geom, settings) -> None:
    grid = workspace.map_workspace(geom, workspace.as_bounds(args.bounds), args.res, workers=settings.workers)
    log.info("feasible fraction %.4f over %d nodes", workspace.feasible_fraction(grid), len(grid))
    _emit(workspace.export_grid(grid, workspace.ExportFormat(args.format)), args.out)


def _cube(args, geom, settings) -> None:
    cube = workspace.largest_cube(geom, tolerance=args.tol)
    print(f"center = {fmt_row(cube.center)}")
    print(f"edge = {fmt(cube.edge)}")


def _optimize(args, geom, settings) -> None:
    rep = optimize.size_leg_length(args.edge, args.psi, geom)
    text = report.render_sizing(rep)
    sys.stdout.write(text)
    if args.pdf:
        Path(args.pdf).write_bytes(report.write_pdf(text))
        print(f"wrote {args.pdf}")


def _sweep(args, geom, settings) -> None:
    rows = optimize.sweep_report(geom, args.lengths, args.edge, args.psi, workers=settings.workers)
    _emit(optimize.export_sweep(rows, workspace.ExportFormat(args.format)), args.out)


COMMANDS = {
    "ik": _ik,
    "fk": _fk,
    "wrist-ik": _wrist_ik,
    "wrist-fk": _wrist_fk,
    "jacobian": _jacobian,
    "transmission": _transmission,
    "map": _map,
    "cube": _cube,
    "optimize": _optimize,
    "sweep": _sweep,
}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    settings = Settings.from_env()
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0

    configure_logging("DEBUG" if args.verbose > 1 else "INFO" if args.verbose else settings.log_level)
    try:
        geom = resolve_geometry(args, settings)
        COMMANDS[args.command](args, geom, settings)
    except HaptickitError as e:
        print(str(e), file=sys.stderr)
        return 1
    except OSError as e:
        print(f"{parser.prog}: I/O error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2
    return 0
