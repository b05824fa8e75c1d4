"""Dimension functions (gauges): construction, evaluation, inversion, ordering.

Gauges are evaluated in log-log coordinates (``log h(e^u)``) so that scales
like ``e^-100000`` stay meaningful; :meth:`DimensionFunction.evaluate` and
:meth:`DimensionFunction.inverse` are thin linear-space wrappers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterDomainError, SequenceValidationError
from .sequences import GapSequence
from .trends import Trend, drift, index_grid, ls_slope, scale_grid

_DOMAIN_SLACK = 1e-12


def _scalar_or_array(values, like):
    return float(values) if np.ndim(like) == 0 else values


class DimensionFunction:
    """Continuous increasing gauge ``h`` on ``(0, domain]``."""

    kind = ""
    domain = math.inf

    def log_eval(self, u):
        """``log h(e^u)``; no domain check."""
        raise NotImplementedError

    def log_inv(self, v):
        """``log h^-1(e^v)``; no domain check."""
        raise NotImplementedError

    @property
    def log_domain(self) -> float:
        return math.log(self.domain) if math.isfinite(self.domain) else math.inf

    @property
    def log_top(self) -> float:
        """``log h(domain)`` (infinite for unbounded domains)."""
        if not math.isfinite(self.domain):
            return math.inf
        return float(self.log_eval(np.array([self.log_domain]))[0])

    def check_log_scale(self, u, what="scale"):
        u = np.asarray(u, dtype=float)
        bad = ~(u <= self.log_domain + _DOMAIN_SLACK) | np.isnan(u)
        if np.any(bad):
            worst = float(np.asarray(u)[bad].flat[0])
            raise DomainError(f"{self.spec()}: {what} e^{worst:.6g} outside (0, {self.domain:.6g}]")

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(~(x > 0)):
            raise DomainError(f"{self.spec()}: scale must be positive")
        with np.errstate(divide="ignore"):
            u = np.log(x)
        self.check_log_scale(u)
        return _scalar_or_array(np.exp(self.log_eval(u)), x)

    __call__ = evaluate

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(~(y > 0)):
            raise DomainError(f"{self.spec()}: inverse argument must be positive")
        v = np.log(y)
        if np.any(v > self.log_top + _DOMAIN_SLACK):
            raise DomainError(f"{self.spec()}: inverse argument above the value at the "
                              f"domain bound, {math.exp(self.log_top):.6g}")
        return _scalar_or_array(np.exp(self.log_inv(v)), y)

    def spec(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec()}>"


@dataclass(frozen=True, repr=False)
class Power(DimensionFunction):
    """``h(x) = scale * x^s``."""

    exponent: float
    scale: float = 1.0
    domain: float = math.inf
    kind = "power"

    def __post_init__(self):
        if not 0.0 < self.exponent <= 1.0:
            raise ParameterDomainError(f"power gauge needs 0 < s <= 1, got {self.exponent}")
        if not self.scale > 0.0 or not self.domain > 0.0:
            raise ParameterDomainError("power gauge needs positive scale and domain")

    def log_eval(self, u):
        return math.log(self.scale) + self.exponent * np.asarray(u, dtype=float)

    def log_inv(self, v):
        return (np.asarray(v, dtype=float) - math.log(self.scale)) / self.exponent

    def spec(self):
        if self.scale == 1.0:
            return f"power({self.exponent:.12g})"
        return f"power({self.exponent:.12g},{self.scale:.12g})"


@dataclass(frozen=True, repr=False)
class LogReciprocal(DimensionFunction):
    """``h(x) = scale * |log x|^-p`` on ``(0, domain]`` with ``domain < 1``."""

    scale: float = 1.0
    order: float = 1.0
    domain: float = 0.5
    kind = "log_reciprocal"

    def __post_init__(self):
        if not self.scale > 0.0 or not self.order > 0.0:
            raise ParameterDomainError("logrec gauge needs positive scale and exponent")
        if not 0.0 < self.domain < 1.0:
            raise ParameterDomainError(f"logrec gauge needs domain in (0, 1), got {self.domain}")

    def log_eval(self, u):
        with np.errstate(invalid="ignore", divide="ignore"):
            return math.log(self.scale) - self.order * np.log(-np.asarray(u, dtype=float))

    def log_inv(self, v):
        return -np.exp((math.log(self.scale) - np.asarray(v, dtype=float)) / self.order)

    def spec(self):
        return f"logrec({self.scale:.12g},{self.order:.12g})"


@dataclass(frozen=True, repr=False)
class PowerLog(DimensionFunction):
    """``h(x) = scale * x^s * |log x|^t``.

    Increasing where ``|log x| > t/s``, so for ``t > 0`` the default domain is
    ``min(1/2, exp(-2t/s))``.  No closed-form inverse: bisection in log scale.
    """

    exponent: float
    log_exponent: float
    scale: float = 1.0
    domain: float = None
    kind = "power_log"

    def __post_init__(self):
        if not 0.0 < self.exponent <= 1.0:
            raise ParameterDomainError(f"powerlog gauge needs 0 < s <= 1, got {self.exponent}")
        if not self.scale > 0.0:
            raise ParameterDomainError("powerlog gauge needs a positive scale")
        limit = math.exp(-self.log_exponent / self.exponent) if self.log_exponent > 0 else 1.0
        if self.domain is None:
            bound = math.exp(-2.0 * self.log_exponent / self.exponent)
            object.__setattr__(self, "domain", min(0.5, bound))
        if not 0.0 < self.domain < 1.0 or self.domain >= limit:
            raise ParameterDomainError(
                f"powerlog({self.exponent}, {self.log_exponent}) is increasing "
                f"only below {limit:.6g}")

    def log_eval(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            return math.log(self.scale) + self.exponent * u + self.log_exponent * np.log(-u)

    def log_inv(self, v):
        shape = np.shape(v)
        v = np.atleast_1d(np.asarray(v, dtype=float))
        hi = np.full(v.shape, self.log_domain)
        # the bracket must stay below the domain bound, where h is increasing
        lo = np.minimum(hi - 1.0, (v - math.log(self.scale)) / self.exponent) * 2.0
        for _ in range(64):
            low = self.log_eval(lo) > v
            if not np.any(low):
                break
            lo = np.where(low, lo * 2.0, lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if np.all((mid == lo) | (mid == hi)):
                break
            up = self.log_eval(mid) > v
            hi = np.where(up, mid, hi)
            lo = np.where(up, lo, mid)
        return (0.5 * (lo + hi)).reshape(shape)

    def spec(self):
        return f"powerlog({self.exponent:.12g},{self.log_exponent:.12g})"


class Interpolated(DimensionFunction):
    """Piecewise-linear gauge in log-log coordinates through strictly increasing knots.

    Beyond the knot range the terminal segments are extended, so the gauge
    is defined on all of ``(0, domain]`` and inversion is exact per segment.
    """

    kind = "associated"

    def __init__(self, log_x, log_y, *, domain=None, label="interpolated"):
        log_x = np.asarray(log_x, dtype=float)
        log_y = np.asarray(log_y, dtype=float)
        if log_x.ndim != 1 or log_x.shape != log_y.shape or log_x.size < 2:
            raise ValueError("need matching 1-D knot arrays with at least two knots")
        if not (np.all(np.diff(log_x) > 0) and np.all(np.diff(log_y) > 0)):
            raise SequenceValidationError("interpolation knots must be strictly increasing")
        self.log_x = log_x
        self.log_y = log_y
        self.log_x.setflags(write=False)
        self.log_y.setflags(write=False)
        self.domain = float(np.exp(log_x[-1])) if domain is None else float(domain)
        self.label = label

    @staticmethod
    def _piecewise(t, xs, ys):
        t = np.asarray(t, dtype=float)
        out = np.interp(t, xs, ys)
        lo_slope = (ys[1] - ys[0]) / (xs[1] - xs[0])
        hi_slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        out = np.where(t < xs[0], ys[0] + lo_slope * (t - xs[0]), out)
        return np.where(t > xs[-1], ys[-1] + hi_slope * (t - xs[-1]), out)

    def log_eval(self, u):
        return self._piecewise(u, self.log_x, self.log_y)

    def log_inv(self, v):
        return self._piecewise(v, self.log_y, self.log_x)

    @property
    def knots(self):
        return np.exp(self.log_x), np.exp(self.log_y)

    def spec(self):
        return self.label


def make_function(kind: str, **params) -> DimensionFunction:
    """Construct a gauge by kind name.

    Kinds: ``power`` (``exponent``, ``scale``), ``logrec`` (``scale``, ``order``),
    ``powerlog`` (``exponent``, ``log_exponent``, ``scale``); each also takes
    ``domain``.
    """
    kinds = {"power": Power, "logrec": LogReciprocal, "log_reciprocal": LogReciprocal,
             "powerlog": PowerLog, "power_log": PowerLog}
    if kind not in kinds:
        raise ParameterDomainError(f"unknown gauge kind {kind!r}")
    try:
        return kinds[kind](**params)
    except TypeError as exc:
        raise ParameterDomainError(f"bad parameters for {kind}: {exc}") from None


def associated_function(seq: GapSequence, max_n: int, *, ratio: float = 1.5) -> Interpolated:
    """Gauge through the knots ``(r_n/n, 1/n)`` on a geometric grid up to ``max_n``.

    At every knot ``h(r_n/n) = 1/n``.
    """
    if max_n < 16:
        raise ValueError("associated_function needs max_n >= 16")
    if seq.max_index is not None:
        max_n = min(int(max_n), int(seq.max_index))
    n = index_grid(max_n, ratio=ratio)
    log_b = np.asarray(seq.log_tail(n), dtype=float) - np.log(n)
    log_x = log_b[::-1]
    log_y = -np.log(n.astype(float))[::-1]
    return Interpolated(log_x, log_y, label=f"associated({seq.label()},{max_n})")


# ---------------------------------------------------------------- reports

@dataclass(frozen=True)
class DoublingReport:
    target: str  # "function" | "inverse"
    tau_estimate: float
    slope: float
    trend: Trend
    scale_floor: float

    @property
    def verdict(self) -> str:
        return "fails" if self.trend is Trend.DIVERGING else "holds_at_probed_scales"

    @property
    def holds(self) -> bool:
        return self.trend is Trend.BOUNDED


@dataclass(frozen=True)
class OrderReport:
    """One direction of the order: ``f <= c h`` probed on a grid."""

    direction: str
    constant_estimate: float
    slope: float
    trend: Trend
    scale_floor: float

    @property
    def verdict(self) -> str:
        return "fails" if self.trend is Trend.DIVERGING else "holds_at_probed_scales"

    @property
    def holds(self) -> bool:
        return self.trend is Trend.BOUNDED


@dataclass(frozen=True)
class ComparisonReport:
    forward: OrderReport   # first <= c second
    backward: OrderReport  # second <= c first

    @property
    def equivalent(self) -> bool:
        return self.forward.holds and self.backward.holds


def default_scales(*gauges: DimensionFunction, points: int = 48) -> np.ndarray:
    """Ratio-2 grid of scales descending from ``min(A, 1/2)`` over the given gauges."""
    top = min([0.5] + [g.domain for g in gauges])
    return scale_grid(top, points=points)


def doubling_report(gauge: DimensionFunction, target: str = "function",
                    scales=None) -> DoublingReport:
    """Probe ``g(x) >= tau g(2x)`` for ``g = h`` or ``g = h^-1``.

    For the inverse the probe points are ``y = h(x)`` over the scale grid.
    Fails when ``log(g(2x)/g(x))`` drifts upward against ``log(1/x)`` on the
    smallest third of the grid.
    """
    xs = default_scales(gauge) if scales is None else np.asarray(scales, dtype=float)
    u = np.log(xs)
    if target == "function":
        u = u[u + math.log(2.0) <= gauge.log_domain + _DOMAIN_SLACK]
        log_ratio = gauge.log_eval(u + math.log(2.0)) - gauge.log_eval(u)
        axis = -u
    elif target == "inverse":
        v = gauge.log_eval(u) if scales is None else u
        v = v[v + math.log(2.0) <= gauge.log_top + _DOMAIN_SLACK]
        log_ratio = gauge.log_inv(v + math.log(2.0)) - gauge.log_inv(v)
        axis = -v
    else:
        raise ValueError("target must be 'function' or 'inverse'")
    order = np.argsort(axis)
    axis, log_ratio = axis[order], log_ratio[order]
    slope, sign = drift(axis, log_ratio)
    trend = Trend.DIVERGING if sign > 0 else Trend.BOUNDED
    return DoublingReport(target, float(np.exp(-np.max(log_ratio))), slope, trend,
                          float(np.exp(-axis[-1])))


def _order_pair(log_ratio, axis, names):
    order = np.argsort(axis)
    axis, log_ratio = axis[order], log_ratio[order]
    slope, sign = drift(axis, log_ratio)
    floor = float(np.exp(-axis[-1]))
    with np.errstate(over="ignore"):
        c_fwd, c_bwd = float(np.exp(np.max(log_ratio))), float(np.exp(np.max(-log_ratio)))
    fwd = OrderReport(f"{names[0]}<={names[1]}", c_fwd, slope,
                      Trend.DIVERGING if sign > 0 else Trend.BOUNDED, floor)
    bwd = OrderReport(f"{names[1]}<={names[0]}", c_bwd, -slope,
                      Trend.DIVERGING if sign < 0 else Trend.BOUNDED, floor)
    return ComparisonReport(fwd, bwd)


def compare(first: DimensionFunction, second: DimensionFunction, grid=None) -> ComparisonReport:
    """Probe ``first <= c second`` and ``second <= c first`` on a common scale grid.

    >>> compare(Power(0.5, 2.0), Power(0.5)).equivalent
    True
    """
    xs = default_scales(first, second) if grid is None else np.asarray(grid, dtype=float)
    u = np.log(xs)
    first.check_log_scale(u)
    second.check_log_scale(u)
    return _order_pair(first.log_eval(u) - second.log_eval(u), -u, ("first", "second"))


def compare_inverses(first: DimensionFunction, second: DimensionFunction,
                     grid=None) -> ComparisonReport:
    """Same as :func:`compare` for the inverses, probed at ``y = second(x)``."""
    xs = default_scales(first, second) if grid is None else np.asarray(grid, dtype=float)
    v = second.log_eval(np.log(xs))
    v = v[v <= min(first.log_top, second.log_top) + _DOMAIN_SLACK]
    return _order_pair(first.log_inv(v) - second.log_inv(v), -v,
                       ("first^-1", "second^-1"))


def sample_checks(gauge: DimensionFunction, points: int = 64) -> dict:
    """Structural checks on a 64-point geometric grid below the domain bound.

    Returns strict monotonicity, the decay trend toward 0 and the worst
    relative inverse round-trip error.
    """
    xs = default_scales(gauge, points=points)[::-1]
    u = np.log(xs)
    log_h = gauge.log_eval(u)
    back = gauge.log_inv(log_h)
    return {
        "increasing": bool(np.all(np.diff(log_h) > 0)),
        "to_zero": bool(log_h[0] < log_h[-1]
                        and ls_slope(u[: points // 3], log_h[: points // 3]) > 0),
        "roundtrip_err": float(np.max(np.abs(np.expm1(back - u)))),
    }
