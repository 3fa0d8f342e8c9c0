# haptickit/workspace.py
"""
Workspace maps of the translational stage and the largest axis-aligned
cube inside the reachable set.

Every evaluation is a pure function of the point, done in numpy batches;
chunks may be spread over threads but results are always assembled in
input order, so the output does not depend on the worker count.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BadBounds,
    BadResolution,
    CubeNotFeasible,
    EmptyWorkspace,
    HaptickitError,
    SingularConfiguration,
)
from .model import DeviceGeometry, as_vector
from .orthoglide import LEG_OK, REASON_OF, conditioning, fk_translation, point_reasons, solve_legs
from .utils import chunks, cube_lattice, fmt, round_sig

log = logging.getLogger(__name__)

CHUNK = 65536
SINGULAR_CODE = max(REASON_OF) + 1
REASONS = {**REASON_OF, SINGULAR_CODE: SingularConfiguration.__name__}
CSV_COLUMNS = ("x", "y", "z", "feasible", "sigma_min", "sigma_max", "kappa", "reason")


class ExportFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    XYZ = "xyz"


@dataclass(frozen=True, eq=False)
class WorkspaceGrid:
    bounds: np.ndarray          # (3, 2) rows of [lo, hi]
    resolution: int
    points: np.ndarray          # (resolution**3, 3), x index slowest
    feasible: np.ndarray        # (n,) bool
    reason: np.ndarray          # (n,) str, "" where feasible
    sigma_min: np.ndarray       # NaN where infeasible
    sigma_max: np.ndarray
    kappa: np.ndarray

    def __len__(self) -> int:
        return self.points.shape[0]

    def feasible_points(self) -> np.ndarray:
        return self.points[self.feasible]


@dataclass(frozen=True, eq=False)
class CubicWorkspace:
    center: np.ndarray
    edge: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center).copy())
        object.__setattr__(self, "edge", float(self.edge))


class Dexterity(NamedTuple):
    sigma_min: float
    sigma_max: float
    kappa: float


# -------------------------------------------------------------------
# Point evaluation
# -------------------------------------------------------------------

def _evaluate_chunk(args) -> Tuple[np.ndarray, np.ndarray]:
    points, geom = args
    rho, codes = solve_legs(points, geom)
    reasons = point_reasons(codes)
    sigma = np.full(points.shape, np.nan)
    ok = reasons == LEG_OK
    if np.any(ok):
        s, singular = conditioning(points[ok], rho[ok], geom)
        idx = np.flatnonzero(ok)
        reasons[idx[singular]] = SINGULAR_CODE
        sigma[idx] = s
    return reasons, sigma


def evaluate_points(points, geom: DeviceGeometry, workers: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Failure code (0 = feasible) and descending singular values per point."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    jobs = [(points[s], geom) for s in chunks(points.shape[0], CHUNK)]
    if not jobs:
        return np.zeros(0, dtype=np.int8), np.zeros((0, 3))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_evaluate_chunk, jobs))
    else:
        parts = [_evaluate_chunk(job) for job in jobs]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _reachable(points: np.ndarray, geom: DeviceGeometry) -> np.ndarray:
    """IK success (all limits) per point, without conditioning."""
    _, codes = solve_legs(points, geom)
    return np.all(codes == LEG_OK, axis=1)


def _check_bounds(bounds) -> np.ndarray:
    try:
        b = np.asarray(bounds, dtype=float).reshape(3, 2)
    except (TypeError, ValueError):
        raise BadBounds("bounds must be three [lo, hi] pairs") from None
    if not np.all(np.isfinite(b)) or np.any(b[:, 0] >= b[:, 1]):
        raise BadBounds(f"bounds must be finite with lo < hi on every axis, got {b.tolist()}")
    return b


def _grid_points(b: np.ndarray, resolution: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, resolution) for lo, hi in b]
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)


# -------------------------------------------------------------------
# Operations
# -------------------------------------------------------------------

def map_workspace(geom: DeviceGeometry, bounds, resolution: int, workers: int = 1) -> WorkspaceGrid:
    """
    Feasibility and velocity amplification at every node of a regular
    ``resolution``^3 grid spanning ``bounds`` (nodes include the bounds).
    """
    b = _check_bounds(bounds)
    if isinstance(resolution, bool) or int(resolution) != resolution or resolution < 2:
        raise BadResolution(f"resolution must be an integer >= 2, got {resolution!r}")
    resolution = int(resolution)

    points = _grid_points(b, resolution)
    codes, sigma = evaluate_points(points, geom, workers=workers)
    feasible = codes == LEG_OK
    reason = np.array([REASONS.get(int(c), "") for c in codes], dtype=object)
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = sigma[:, 0] / sigma[:, 2]
    log.info("mapped %d cells, %d feasible", points.shape[0], int(feasible.sum()))
    return WorkspaceGrid(
        bounds=b,
        resolution=resolution,
        points=points,
        feasible=feasible,
        reason=reason,
        sigma_min=sigma[:, 2],
        sigma_max=sigma[:, 0],
        kappa=kappa,
    )


def _max_edges(centers: np.ndarray, geom: DeviceGeometry, offsets: np.ndarray,
               tolerance: float) -> np.ndarray:
    """
    Largest certified edge per center, by simultaneous bisection.
    Centers that are themselves unreachable get -1.
    """
    m = centers.shape[0]
    lo = np.zeros(m)
    hi = np.full(m, 2.0 * geom.leg_length)     # never feasible: corner radius sqrt(2) L
    valid = _reachable(centers, geom)
    steps = max(1, math.ceil(math.log2(2.0 * geom.leg_length / tolerance)))
    k = offsets.shape[0]
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        pts = centers[:, None, :] + mid[:, None, None] * offsets[None, :, :]
        ok = _reachable(pts.reshape(-1, 3), geom).reshape(m, k).all(axis=1)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return np.where(valid, lo, -1.0)


def _pick(centers: np.ndarray, edges: np.ndarray, anchor: np.ndarray) -> int:
    """Largest edge; ties go to the center nearest the anchor, then to input order."""
    best = edges.max()
    tied = np.flatnonzero(edges == best)
    dist = np.linalg.norm(centers[tied] - anchor, axis=1)
    return int(tied[np.argmin(dist)])


def _joint_space_seeds(geom: DeviceGeometry, b: np.ndarray, n: int) -> np.ndarray:
    """
    Reachable points found by forward kinematics over an n^3 grid of joint
    values inside the strokes. Thin stroke bands can slip between the nodes
    of a Cartesian grid; these seeds meet the strokes by construction.
    """
    L = geom.leg_length
    lo, hi = max(geom.stroke_min, -L), min(geom.stroke_max, 2.0 * L)
    if not lo < hi:
        return np.zeros((0, 3))
    seeds = []
    for rho in itertools.product(np.linspace(lo, hi, n), repeat=3):
        try:
            p = fk_translation(rho, geom)
        except HaptickitError:
            continue
        if np.all((p >= b[:, 0]) & (p <= b[:, 1])):
            seeds.append(p)
    if not seeds:
        return np.zeros((0, 3))
    seeds = np.array(seeds)
    return seeds[_reachable(seeds, geom)]


def largest_cube(geom: DeviceGeometry, search_bounds=None, tolerance: Optional[float] = None,
                 lattice: int = 5, coarse: int = 9) -> CubicWorkspace:
    """
    Largest axis-aligned cube whose sample lattice is entirely reachable.

    Candidate centers come from a ``coarse``^3 grid over ``search_bounds``
    (default [-L, L]^3), then a compass search refines the best one until
    its step drops below ``tolerance`` (default 1e-4 L). The edge at each
    center is bisected to ``tolerance``.
    """
    L = geom.leg_length
    tol = 1e-4 * L if tolerance is None else float(tolerance)
    if not tol > 0.0:
        raise ValueError(f"tolerance must be > 0, got {tolerance!r}")
    b = _check_bounds(search_bounds if search_bounds is not None else [[-L, L]] * 3)
    offsets = cube_lattice(lattice)

    nodes = _grid_points(b, max(int(coarse), 2))
    nodes = nodes[_reachable(nodes, geom)]
    if nodes.shape[0] == 0:
        nodes = _joint_space_seeds(geom, b, max(int(coarse), 2))
        log.debug("no reachable grid node; %d joint-space seeds", nodes.shape[0])
    if nodes.shape[0] == 0:
        raise EmptyWorkspace(f"no reachable point in search bounds {b.tolist()}")
    anchor = nodes.mean(axis=0)

    edges = _max_edges(nodes, geom, offsets, tol)
    i = _pick(nodes, edges, anchor)
    center, edge = nodes[i], float(edges[i])
    log.debug("coarse search: center=%s edge=%.9g", center, edge)

    step = float(np.min(b[:, 1] - b[:, 0])) / (2.0 * (max(int(coarse), 2) - 1))
    moves = np.vstack([np.eye(3), -np.eye(3)])
    for _ in range(1000):
        if step < tol:
            break
        candidates = np.clip(center + step * moves, b[:, 0], b[:, 1])
        cand_edges = _max_edges(candidates, geom, offsets, tol)
        j = _pick(candidates, cand_edges, anchor)
        if cand_edges[j] > edge:
            center, edge = candidates[j], float(cand_edges[j])
        else:
            step *= 0.5
    log.info("largest cube: center=%s edge=%.9g", center, edge)
    return CubicWorkspace(center=center, edge=edge)


def cube_points(cube: CubicWorkspace, samples: int = 5) -> np.ndarray:
    return cube.center[None, :] + cube.edge * cube_lattice(samples)


def dexterity_of(sigma: np.ndarray) -> Dexterity:
    """
    Extremes over the sample axis of descending singular values shaped
    (..., samples, 3). Leading axes are kept, one entry per batch.
    """
    sigma = np.asarray(sigma, dtype=float)
    return Dexterity(
        sigma_min=sigma[..., 2].min(axis=-1),
        sigma_max=sigma[..., 0].max(axis=-1),
        kappa=(sigma[..., 0] / sigma[..., 2]).max(axis=-1),
    )


def dexterity_over_cube(geom: DeviceGeometry, cube: CubicWorkspace, samples: int = 5) -> Dexterity:
    """Extremes of the velocity amplification factors over the cube's lattice."""
    codes, sigma = evaluate_points(cube_points(cube, samples), geom)
    if np.any(codes != LEG_OK):
        bad = sorted({REASONS[int(c)] for c in codes if c != LEG_OK})
        raise CubeNotFeasible(
            f"cube at {cube.center} with edge {cube.edge:.9g} has unreachable samples ({', '.join(bad)})"
        )
    return Dexterity(*(float(v) for v in dexterity_of(sigma)))


# -------------------------------------------------------------------
# Export
# -------------------------------------------------------------------

def _num(v: float):
    return None if math.isnan(v) else round_sig(v)


def _cell_records(grid: WorkspaceGrid) -> List[dict]:
    return [
        {
            "x": round_sig(p[0]), "y": round_sig(p[1]), "z": round_sig(p[2]),
            "feasible": bool(f),
            "sigma_min": _num(smin), "sigma_max": _num(smax), "kappa": _num(k),
            "reason": str(r),
        }
        for p, f, smin, smax, k, r in zip(
            grid.points, grid.feasible, grid.sigma_min, grid.sigma_max, grid.kappa, grid.reason
        )
    ]


def export_grid(grid: WorkspaceGrid, fmt_: ExportFormat = ExportFormat.CSV) -> str:
    kind = ExportFormat(fmt_)
    if kind is ExportFormat.XYZ:
        return "".join(f"{fmt(p[0])} {fmt(p[1])} {fmt(p[2])}\n" for p in grid.feasible_points())
    if kind is ExportFormat.JSON:
        doc = {
            "bounds": grid.bounds.tolist(),
            "resolution": grid.resolution,
            "cells": _cell_records(grid),
        }
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for p, f, smin, smax, k, r in zip(
        grid.points, grid.feasible, grid.sigma_min, grid.sigma_max, grid.kappa, grid.reason
    ):
        writer.writerow([fmt(p[0]), fmt(p[1]), fmt(p[2]), int(bool(f)), fmt(smin), fmt(smax), fmt(k), r])
    return buf.getvalue()


def load_grid_json(text: str) -> WorkspaceGrid:
    doc = json.loads(text)
    cells = doc["cells"]

    def col(key: str) -> np.ndarray:
        return np.array([np.nan if c[key] is None else c[key] for c in cells], dtype=float)

    return WorkspaceGrid(
        bounds=np.asarray(doc["bounds"], dtype=float),
        resolution=int(doc["resolution"]),
        points=np.stack([col("x"), col("y"), col("z")], axis=1) if cells else np.zeros((0, 3)),
        feasible=np.array([bool(c["feasible"]) for c in cells], dtype=bool),
        reason=np.array([c["reason"] for c in cells], dtype=object),
        sigma_min=col("sigma_min"),
        sigma_max=col("sigma_max"),
        kappa=col("kappa"),
    )


def feasible_fraction(grid: WorkspaceGrid) -> float:
    return float(grid.feasible.mean()) if len(grid) else 0.0


def as_bounds(values: Sequence[float]) -> np.ndarray:
    """Flat [xmin, xmax, ymin, ymax, zmin, zmax] to a (3, 2) bounds array."""
    return _check_bounds(values)
