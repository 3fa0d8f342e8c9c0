# haptickit/optimize.py
"""
Leg-length sizing: the smallest L for which a cube of a prescribed edge fits
the workspace with every velocity amplification factor inside [1/psi, psi].

Strokes are an output of sizing: the template's stroke interval is lifted
during the search and the sized geometry carries the interval the cube
actually needs. The parallelogram cone of the template stays binding.

The check at a given L works in units of L: candidate cube centres sit on a
fixed grid ``CENTER_TICKS * L`` and the cube edge enters only as ``edge / L``,
so the check is exactly scale invariant and the sized L is linear in the
target edge.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .errors import BadBound, EmptyInput, HaptickitError, Unachievable
from .model import DeviceGeometry, validate_geometry
from .orthoglide import LEG_OK, conditioning, solve_legs
from .utils import cube_lattice, fmt, round_sig
from .workspace import Dexterity, ExportFormat, dexterity_of, largest_cube

log = logging.getLogger(__name__)

REL_TOL = 1e-6
CERTIFICATE_FACTOR = 10.0
CENTER_TICKS = np.linspace(-0.5, 0.5, 9)     # includes 0, the isotropic point
SCAN_RATIO = 2.0 ** 0.25
MAX_SCAN = 160                               # 2**40 above the lower bracket
SWEEP_COLUMNS = ("L", "achieved_edge", "worst_kappa", "passed", "status")


def _center_grid() -> np.ndarray:
    gx, gy, gz = np.meshgrid(CENTER_TICKS, CENTER_TICKS, CENTER_TICKS, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)


@dataclass(frozen=True, eq=False)
class CubeCheck:
    """Outcome of the (edge, psi) check at one leg length."""
    passed: bool
    feasible: bool                         # some centre has every sample reachable
    center: Optional[np.ndarray]           # best centre; None if nothing is reachable
    dexterity: Optional[Dexterity]
    stroke_required: Optional[np.ndarray]  # (3, 2) min/max rho per leg


@dataclass(frozen=True, eq=False)
class SizingReport:
    geometry: DeviceGeometry
    template: DeviceGeometry
    leg_length: float
    target_edge: float
    psi: float
    center: np.ndarray
    stroke_required: np.ndarray
    dexterity: Dexterity
    passes_at_L: bool
    fails_below: bool
    tolerance: float
    checks: int

    @property
    def certified(self) -> bool:
        return self.passes_at_L and self.fails_below


@dataclass(frozen=True)
class SweepRow:
    leg_length: float
    achieved_edge: float
    worst_kappa: float
    passed: bool
    status: str = "ok"


def check_cube(geom: DeviceGeometry, edge: float, psi: float, lattice: int = 5) -> CubeCheck:
    """
    Try every centre of the fixed grid. A centre passes when every lattice
    sample of the cube is reachable, J is regular there and all singular
    values of J lie in [1/psi, psi]. Among passing centres (or, failing
    that, merely reachable ones) the lowest worst-case kappa wins, then the
    centre closest to the isotropic point.
    """
    L = geom.leg_length
    centers = _center_grid()
    offsets = cube_lattice(lattice)
    m, k = centers.shape[0], offsets.shape[0]
    pts = (L * (centers[:, None, :] + (edge / L) * offsets[None, :, :])).reshape(-1, 3)

    rho, codes = solve_legs(pts, geom)
    reachable = np.all(codes == LEG_OK, axis=1)
    sigma = np.full(pts.shape, np.nan)
    if np.any(reachable):
        s, singular = conditioning(pts[reachable], rho[reachable], geom)
        idx = np.flatnonzero(reachable)
        reachable[idx[singular]] = False
        sigma[idx] = s

    ok = reachable.reshape(m, k).all(axis=1)
    sigma = sigma.reshape(m, k, 3)
    if not np.any(ok):
        return CubeCheck(False, False, None, None, None)

    smin, smax, kappa = (np.full(m, np.nan) for _ in range(3))
    smin[ok], smax[ok], kappa[ok] = dexterity_of(sigma[ok])
    passing = ok.copy()
    passing[ok] = (smin[ok] >= 1.0 / psi) & (smax[ok] <= psi)
    pool = passing if np.any(passing) else ok

    candidates = np.flatnonzero(pool)
    order = np.lexsort((np.linalg.norm(centers[candidates], axis=1), kappa[candidates]))
    best = int(candidates[order[0]])

    r = rho.reshape(m, k, 3)[best]
    stroke = np.stack([r.min(axis=0), r.max(axis=0)], axis=1)
    return CubeCheck(
        passed=bool(np.any(passing)),
        feasible=True,
        center=L * centers[best],
        dexterity=Dexterity(float(smin[best]), float(smax[best]), float(kappa[best])),
        stroke_required=stroke,
    )


def _stroke_free(template: DeviceGeometry) -> DeviceGeometry:
    return replace(template, stroke_min=-math.inf, stroke_max=math.inf)


def _sized_geometry(template: DeviceGeometry, L: float, stroke: np.ndarray) -> DeviceGeometry:
    lo = float(stroke[:, 0].min())
    hi = float(stroke[:, 1].max())
    if not lo < hi:
        hi = lo + abs(lo) * REL_TOL + REL_TOL * L
    return validate_geometry(DeviceGeometry(
        leg_length=L,
        stroke_min=lo,
        stroke_max=hi,
        parallelogram_half_cone=template.parallelogram_half_cone,
        wrist_pitch_yaw_limit=template.wrist_pitch_yaw_limit,
        variant=template.variant,
    ))


def size_leg_length(target_edge: float, psi: float, template: DeviceGeometry,
                    tolerance: float = REL_TOL, lattice: int = 5) -> SizingReport:
    """
    Minimal leg length for a cube of ``target_edge`` with amplification
    factors in [1/psi, psi].

    The lower bracket ``target_edge / 2`` always fails (the cube corners
    would leave the reach cylinders). The upper bracket is the first pass
    on a geometric scan, then plain bisection narrows the bracket to a
    relative width of ``tolerance``.

    The template's strokes are ignored; the returned geometry carries the
    stroke interval the sized cube requires.
    """
    if not (isinstance(psi, (int, float)) and math.isfinite(psi)) or psi < 1.0:
        raise BadBound(f"psi must be >= 1, got {psi!r}")
    if not (math.isfinite(target_edge) and target_edge > 0.0):
        raise BadBound(f"target edge must be > 0, got {target_edge!r}")
    if psi == 1.0:
        raise Unachievable("psi = 1 demands exact isotropy, which holds at a single point only")

    free = _stroke_free(template)
    checks = 0

    def passes(L: float) -> bool:
        nonlocal checks
        checks += 1
        return check_cube(free.with_leg_length(L), target_edge, psi, lattice).passed

    lo = 0.5 * target_edge
    if passes(lo):
        raise Unachievable(f"bracket is invalid: L={lo:.9g} passes although the cube cannot fit")
    hi = None
    for _ in range(MAX_SCAN):
        L = lo * SCAN_RATIO
        if passes(L):
            hi = L
            break
        lo = L
    if hi is None:
        raise Unachievable(
            f"no leg length up to {lo:.9g} fits a cube of edge {target_edge:.9g} with psi={psi:.9g}"
        )

    while hi - lo > tolerance * hi:
        mid = 0.5 * (lo + hi)
        if passes(mid):
            hi = mid
        else:
            lo = mid
        log.debug("bisection bracket [%.12g, %.12g]", lo, hi)

    L = hi
    at_L = check_cube(free.with_leg_length(L), target_edge, psi, lattice)
    below = check_cube(
        free.with_leg_length(L * (1.0 - CERTIFICATE_FACTOR * tolerance)), target_edge, psi, lattice
    )
    checks += 2
    if not (at_L.passed and not below.passed):
        log.warning("sizing certificate failed at L=%.9g (pass=%s, below=%s)", L, at_L.passed, below.passed)
    log.info("sized L=%.9g for edge=%.9g psi=%.9g after %d checks", L, target_edge, psi, checks)

    return SizingReport(
        geometry=_sized_geometry(template, L, at_L.stroke_required),
        template=template,
        leg_length=L,
        target_edge=float(target_edge),
        psi=float(psi),
        center=at_L.center,
        stroke_required=at_L.stroke_required,
        dexterity=at_L.dexterity,
        passes_at_L=at_L.passed,
        fails_below=not below.passed,
        tolerance=tolerance,
        checks=checks,
    )


# -------------------------------------------------------------------
# Sweep
# -------------------------------------------------------------------

def _sweep_row(template: DeviceGeometry, L: float, target_edge: float, psi: float) -> SweepRow:
    try:
        geom = validate_geometry(_stroke_free(template).with_leg_length(L))
        edge = largest_cube(geom).edge
        check = check_cube(geom, target_edge, psi)
    except HaptickitError as e:
        log.debug("sweep row L=%r failed: %s", L, e)
        return SweepRow(float(L), math.nan, math.nan, False, e.name)
    kappa = check.dexterity.kappa if check.dexterity is not None else math.nan
    return SweepRow(float(L), float(edge), float(kappa), check.passed)


def sweep_report(template: DeviceGeometry, lengths: Sequence[float], target_edge: float,
                 psi: float, workers: int = 1) -> List[SweepRow]:
    """One independent row per leg length, in input order."""
    lengths = [float(L) for L in lengths]
    if not lengths:
        raise EmptyInput("sweep needs at least one leg length")
    if not math.isfinite(psi) or psi < 1.0:
        raise BadBound(f"psi must be >= 1, got {psi!r}")

    def row(L: float) -> SweepRow:
        return _sweep_row(template, L, target_edge, psi)

    if workers > 1 and len(lengths) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(row, lengths))
    return [row(L) for L in lengths]


def _row_record(r: SweepRow) -> dict:
    def num(v: float):
        return None if math.isnan(v) else round_sig(v)

    return {
        "L": round_sig(r.leg_length),
        "achieved_edge": num(r.achieved_edge),
        "worst_kappa": num(r.worst_kappa),
        "passed": r.passed,
        "status": r.status,
    }


def export_sweep(rows: Sequence[SweepRow], fmt_: ExportFormat = ExportFormat.CSV) -> str:
    kind = ExportFormat(fmt_)
    if kind is ExportFormat.JSON:
        return json.dumps([_row_record(r) for r in rows], indent=1) + "\n"
    if kind is ExportFormat.XYZ:
        raise ValueError("sweep tables export as csv or json")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([fmt(r.leg_length), fmt(r.achieved_edge), fmt(r.worst_kappa), int(r.passed), r.status])
    return buf.getvalue()
