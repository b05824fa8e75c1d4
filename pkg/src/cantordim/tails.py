"""Scaled tail functionals ``n h(r_n/n)`` and dimension estimates from tails.

``b_n = r_n / n`` is the average scale of the ``2^k``-th generation; the
Hausdorff and packing dimensions are the lower and upper limits of
``-log n / log b_n`` and gauge classes follow the limits of ``n h(b_n)``.
Limits are estimated from finite grids and labelled as estimates.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .cantor import CantorApproximation
from .errors import DomainError, InsufficientDataError
from .gauges import DimensionFunction
from .sequences import GapSequence
from .trends import MIN_POINTS, SLOPE_TOL, index_grid, ls_slope, terminal_third

#: Envelope moves larger than this (in log units) count as a rise or a fall.
OSCILLATION_STEP = 0.5

#: Number of log-width bins the terminal window is split into.
WINDOW_BINS = 4


class MeasureClass(enum.IntEnum):
    ZERO = 0
    FINITE = 1
    INFINITE = 2

    @property
    def label(self) -> str:
        return ("0", "1", "inf")[self]


class LimitTrend(str, enum.Enum):
    CONVERGENT = "convergent"
    TO_ZERO = "to_zero"
    TO_INFINITY = "to_infinity"
    OSCILLATING = "oscillating"


_TREND_CLASS = {
    LimitTrend.CONVERGENT: MeasureClass.FINITE,
    LimitTrend.TO_ZERO: MeasureClass.ZERO,
    LimitTrend.TO_INFINITY: MeasureClass.INFINITE,
}


@dataclass(frozen=True)
class LimitEstimate:
    """Finite-grid estimate of the lower and upper limit of a positive sequence.

    ``window_inf``/``window_sup`` are taken over the last third of the grid;
    a class is ``None`` when its trend is oscillating.
    """

    grid: np.ndarray = field(repr=False)
    log_values: np.ndarray = field(repr=False)
    window_inf: float
    window_sup: float
    slope_inf: float
    slope_sup: float
    trend_inf: LimitTrend
    trend_sup: LimitTrend

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    @property
    def liminf_class(self) -> MeasureClass | None:
        return _TREND_CLASS.get(self.trend_inf)

    @property
    def limsup_class(self) -> MeasureClass | None:
        return _TREND_CLASS.get(self.trend_sup)


def first_in_domain(seq: GapSequence, gauge: DimensionFunction) -> int:
    """Smallest ``n`` with ``b_n = r_n/n`` inside the gauge's domain."""
    bound = gauge.log_domain

    def inside(n):
        return float(seq.log_tail(n)) - math.log(n) <= bound

    if inside(1):
        return 1
    hi = 2
    while not inside(hi):
        hi *= 2
        if seq.max_tail_index is not None and hi > seq.max_tail_index:
            raise DomainError(f"no scale b_n of {seq.label()} falls inside {gauge.spec()}'s domain")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        lo, hi = (lo, mid) if inside(mid) else (mid, hi)
    return hi


def log_scales(seq: GapSequence, n) -> np.ndarray:
    """``log b_n = log r_n - log n``."""
    n = np.asarray(n, dtype=np.int64)
    return np.asarray(seq.log_tail(n), dtype=float) - np.log(n.astype(float))


def scaled_values(seq: GapSequence, gauge: DimensionFunction, max_n: int | None = None, *,
                  grid=None, log: bool = False):
    """``(n, n h(b_n))`` on a geometric grid up to ``max_n`` (or on ``grid``).

    Raises :class:`DomainError` naming the first scale outside ``h``'s domain.
    With ``log=True`` the second array holds ``log(n h(b_n))``.
    """
    if grid is None:
        if max_n is None:
            raise ValueError("give max_n or an explicit grid")
        grid = index_grid(max_n)
    n = np.asarray(grid, dtype=np.int64)
    lb = log_scales(seq, n)
    bad = lb > gauge.log_domain + 1e-12
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DomainError(f"scale b_{int(n[i])} = {math.exp(lb[i]):.6g} outside "
                          f"the domain (0, {gauge.domain:.6g}] of {gauge.spec()}")
    lv = np.log(n.astype(float)) + gauge.log_eval(lb)
    return n, (lv if log else np.exp(lv))


def _trend(slope: float, envelope: np.ndarray) -> LimitTrend:
    steps = np.diff(envelope)
    if np.any(steps > OSCILLATION_STEP) and np.any(steps < -OSCILLATION_STEP):
        return LimitTrend.OSCILLATING
    if slope <= -SLOPE_TOL:
        return LimitTrend.TO_ZERO
    if slope >= SLOPE_TOL:
        return LimitTrend.TO_INFINITY
    return LimitTrend.CONVERGENT


def limit_estimates(n, values, *, log: bool = False) -> LimitEstimate:
    """Estimate lower/upper limits of positive ``values`` sampled at indices ``n``.

    The last third of the grid is split into four bins of equal log-width;
    the slopes of the per-bin minima and maxima against ``log n`` give the
    lower and upper trends (``<= -0.05`` to zero, ``>= 0.05`` to infinity).
    Envelopes that both rise and fall by more than 0.5 in log units are
    reported as oscillating.
    """
    n = np.asarray(n, dtype=float)
    lv = np.asarray(values, dtype=float)
    if not log:
        with np.errstate(divide="ignore"):
            lv = np.log(lv)
    if n.size < MIN_POINTS:
        raise InsufficientDataError(f"limit estimates need >= {MIN_POINTS} points, got {n.size}")
    if n.shape != lv.shape:
        raise ValueError("grid and values differ in shape")
    win = terminal_third(n.size)
    x, y = np.log(n[win]), lv[win]
    edges = np.linspace(x[0], x[-1], WINDOW_BINS + 1)
    which = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, WINDOW_BINS - 1)
    centres, lows, highs = [], [], []
    for b in range(WINDOW_BINS):
        sel = which == b
        if np.any(sel):
            centres.append(x[sel].mean())
            lows.append(y[sel].min())
            highs.append(y[sel].max())
    centres, lows, highs = map(np.asarray, (centres, lows, highs))
    if centres.size >= 2:
        s_inf, s_sup = ls_slope(centres, lows), ls_slope(centres, highs)
    else:
        s_inf = s_sup = ls_slope(x, y)
    return LimitEstimate(
        grid=n.astype(np.int64), log_values=lv,
        window_inf=float(np.exp(y.min())), window_sup=float(np.exp(y.max())),
        slope_inf=s_inf, slope_sup=s_sup,
        trend_inf=_trend(s_inf, lows), trend_sup=_trend(s_sup, highs),
    )


# -------------------------------------------------------------- dimensions

@dataclass(frozen=True)
class DimensionEstimate:
    dim_h: float
    dim_p: float
    diagnostics: dict


def _ratios(seq: GapSequence, n: np.ndarray):
    lb = log_scales(seq, n)
    keep = (lb < 0) & np.isfinite(lb)
    return n[keep], -np.log(n[keep].astype(float)) / lb[keep], n[~keep]


def dimensions(seq: GapSequence, max_n: int) -> DimensionEstimate:
    """Hausdorff and packing dimension estimates from ``-log n / log b_n``.

    The estimates are the minimum and maximum over the last third of the
    dyadic indices ``n = 2^j <= max_n``.  Dyadic ``n`` are where ``b_n`` is the
    mean length of a whole generation; between them the ratio carries an
    ``O(1/j)`` interpolation bias that vanishes only in the limit.  The
    window extremes over the dense geometric grid are kept in the
    diagnostics.
    """
    if max_n < 1000:
        raise InsufficientDataError("dimensions() needs max_n >= 1000")
    max_n = int(max_n)
    if seq.finite_support and seq.max_index is not None:
        max_n = min(max_n, int(seq.max_index))
    top = int(math.floor(math.log2(max_n)))
    dyadic = np.int64(1) << np.arange(0, top + 1, dtype=np.int64)
    nd, rd, dropped = _ratios(seq, dyadic)
    if rd.size < 3:
        raise InsufficientDataError("too few usable dyadic indices")
    win = terminal_third(rd.size)
    dense_n, dense_r, _ = _ratios(seq, index_grid(max_n))
    dwin = terminal_third(dense_r.size)
    diagnostics = {
        "max_n": max_n,
        "dyadic_window": [int(nd[win][0]), int(nd[win][-1])],
        "dense_window_inf": float(dense_r[dwin].min()),
        "dense_window_sup": float(dense_r[dwin].max()),
        "excluded_scales_ge_1": [int(v) for v in dropped],
    }
    lo, hi = float(rd[win].min()), float(rd[win].max())
    return DimensionEstimate(min(max(lo, 0.0), 1.0), min(max(hi, 0.0), 1.0), diagnostics)


def box_dimension_oracle(approx: CantorApproximation, *, return_counts: bool = False):
    """Box-counting dimension of the built tree, independent of tail formulas.

    For generations ``g`` from ``k/3`` to ``k-2`` the mesh size is the
    largest generation-``g`` length and the count is the number of mesh
    cells meeting the generation-``k`` intervals.  Returns the least-squares
    slope of ``log count`` against ``log(1/delta)``.
    """
    k = approx.depth
    if k < 10:
        raise InsufficientDataError(f"box counting needs depth >= 10, got {k}")
    lefts, lengths = approx.intervals()
    lefts = lefts - approx.origin
    rights = lefts + lengths
    deltas, counts = [], []
    for g in range(max(1, k // 3), k - 1):
        delta = float(np.max(approx.intervals(g)[1]))
        if not delta > 1e-14 * approx.total_length:
            break
        start = np.floor(lefts / delta)
        end = np.floor(rights / delta)
        seen = np.concatenate([[-1.0], np.maximum.accumulate(end)[:-1]])
        fresh = np.clip(end - np.maximum(start, seen + 1) + 1, 0, None)
        deltas.append(delta)
        counts.append(float(fresh.sum()))
    if len(deltas) < 3:
        raise InsufficientDataError("too few resolvable generations for box counting")
    x = -np.log(deltas)
    y = np.log(counts)
    slope = ls_slope(x, y)
    return (slope, np.asarray(deltas), np.asarray(counts)) if return_counts else slope


def tail_table(seq: GapSequence, gauge: DimensionFunction, max_n: int):
    """Rows ``(n, r_n, b_n, n h(b_n), -log n / log b_n)`` for plotting."""
    start = first_in_domain(seq, gauge)
    n, lv = scaled_values(seq, gauge, grid=index_grid(max_n, start=start), log=True)
    lr = np.asarray(seq.log_tail(n), dtype=float)
    lb = lr - np.log(n.astype(float))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lb < 0, -np.log(n.astype(float)) / lb, np.nan)
    return [(int(a), math.exp(b), math.exp(c), math.exp(d), float(e))
            for a, b, c, d, e in zip(n, lr, lb, lv, ratio)]
