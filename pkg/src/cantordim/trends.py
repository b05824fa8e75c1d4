"""Probe grids and the shared finite-data trend test.

Every "bounded vs. diverging" decision in the package goes through
:func:`slope_trend`: the least-squares slope of a log-quantity against a
log-scale, compared with :data:`SLOPE_TOL`.
"""
from __future__ import annotations

import enum
import math

import numpy as np

from .errors import InsufficientDataError

#: |slope| at or below this is read as "bounded" (no power-law drift).
SLOPE_TOL = 0.05

#: Upper bound on the index-grid ratio used by tail functionals.
GRID_RATIO = 1.5

#: Nominal number of points requested from :func:`index_grid`.
GRID_POINTS = 48

#: Minimum number of grid points a limit estimate will accept.
MIN_POINTS = 24


class Trend(str, enum.Enum):
    BOUNDED = "bounded"
    DIVERGING = "diverging"


def ls_slope(x, y) -> float:
    """Least-squares slope of ``y`` against ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise InsufficientDataError("a slope needs at least two points")
    xc = x - x.mean()
    denom = float(np.dot(xc, xc))
    if denom == 0.0:
        return 0.0
    return float(np.dot(xc, y - y.mean()) / denom)


def slope_trend(slope: float, tol: float = SLOPE_TOL) -> Trend:
    return Trend.BOUNDED if abs(slope) <= tol else Trend.DIVERGING


def drift(x, y, tol: float = SLOPE_TOL) -> tuple[float, int]:
    """Slope of ``y`` on the last third of ``x`` and its persistent sign.

    The sign is +1 (or -1) only when the slope exceeds ``tol`` (or falls
    below ``-tol``) both on the last third and on the last sixth of the
    grid, so a single bounded step inside the window is not read as drift.
    ``x`` must be ordered toward the limit being probed.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    third = terminal_third(x.size)
    slope = ls_slope(x[third], y[third])
    k = max(2, (third.stop - third.start) // 2)
    late = ls_slope(x[-k:], y[-k:])
    if slope > tol and late > tol:
        return slope, 1
    if slope < -tol and late < -tol:
        return slope, -1
    return slope, 0


def terminal_third(size: int) -> slice:
    """Slice selecting the last third (at least two points) of a grid."""
    k = max(2, size // 3)
    return slice(size - k, size)


def index_grid(stop: int, *, start: int = 1, ratio: float = GRID_RATIO,
               points: int = GRID_POINTS) -> np.ndarray:
    """Geometric grid of distinct integers in ``[start, stop]``.

    The ratio between consecutive nominal points is at most ``ratio``; at
    least ``points`` nominal points are requested, so short ranges get a
    denser grid (small ranges simply return every integer).
    """
    start = int(start)
    stop = int(stop)
    if stop < start or start < 1:
        raise InsufficientDataError(f"empty index range [{start}, {stop}]")
    span = math.log(stop / start)
    num = max(points, int(math.ceil(span / math.log(ratio))) + 1)
    if stop - start + 1 <= num:
        return np.arange(start, stop + 1, dtype=np.int64)
    grid = np.unique(np.rint(np.geomspace(start, stop, num)).astype(np.int64))
    grid[0], grid[-1] = start, stop
    return np.unique(grid)


def scale_grid(top: float, *, ratio: float = 2.0, points: int = GRID_POINTS) -> np.ndarray:
    """Descending geometric grid ``top, top/ratio, ...`` of ``points`` scales."""
    return top / ratio ** np.arange(points, dtype=float)


def log1mexp(x):
    """``log(1 - exp(x))`` for ``x <= 0``, accurate near both ends."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    near = x > -math.log(2.0)
    with np.errstate(divide="ignore"):
        out[near] = np.log(-np.expm1(x[near]))
        out[~near] = np.log1p(-np.exp(x[~near]))
    return out
