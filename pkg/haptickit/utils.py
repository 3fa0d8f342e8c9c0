import math
from typing import Iterable, Iterator

import numpy as np

# Radians per degree. Every degree<->radian conversion in the package goes
# through this one factor.
DEG = math.pi / 180.0

SIG_DIGITS = 9


def to_radians(deg: float) -> float:
    return float(deg) * DEG


def to_degrees(rad: float) -> float:
    return float(rad) / DEG


def to_degrees_exact(rad: float, max_ulps: int = 8) -> float:
    """
    Degree value ``d`` with ``d * DEG == rad`` bit-exactly, searched in the
    few ulps around ``rad / DEG``. Falls back to the plain quotient.
    """
    guess = to_degrees(rad)
    if not math.isfinite(guess):
        return guess
    up = down = guess
    for _ in range(max_ulps + 1):
        if up * DEG == rad:
            return up
        if down * DEG == rad:
            return down
        up = math.nextafter(up, math.inf)
        down = math.nextafter(down, -math.inf)
    return guess


def fmt(value: float) -> str:
    """9 significant digits, '.' as decimal point, independent of locale."""
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    out = f"{v:.{SIG_DIGITS}g}"
    return "0" if out == "-0" else out


def fmt_row(values: Iterable[float], sep: str = " ") -> str:
    return sep.join(fmt(v) for v in values)


def round_sig(value: float) -> float:
    """The float a 9-significant-digit text form reads back as."""
    return float(fmt(value))


def cube_lattice(n: int = 5) -> np.ndarray:
    """
    Unit-cube sample offsets in [-0.5, 0.5]^3, shape (k, 3). Corners, edge
    midpoints and face centres are always included; ``n`` sets the extra
    interior density per axis.
    """
    n = max(int(n), 2)
    ticks = np.linspace(-0.5, 0.5, n)
    if n % 2 == 0:
        ticks = np.unique(np.concatenate([ticks, [0.0]]))
    gx, gy, gz = np.meshgrid(ticks, ticks, ticks, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)


def chunks(n: int, size: int) -> Iterator[slice]:
    for start in range(0, n, size):
        yield slice(start, min(start + size, n))
