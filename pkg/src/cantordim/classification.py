"""Dimension-partition cells of gauges for a cut-out set, with finite-depth oracles.

A gauge ``h`` lands in a cell ``(hausdorff, packing)``: the Hausdorff class
follows the lower limit of ``n h(b_n)`` and the packing class its
upper limit, each read as 0, positive finite (1) or infinite.  Covering and
packing sums over the built interval tree are reported alongside as
independent evidence; they never decide the cell.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .cantor import CantorApproximation, build
from .errors import DomainError
from .gauges import DimensionFunction
from .sequences import GapSequence
from .tails import (LimitEstimate, MeasureClass, first_in_domain, limit_estimates,
                    scaled_values)
from .trends import index_grid

#: Relative slack on the factor-4 bracket around the oracle sums.
SANDWICH_TOL = 0.1


def thread_count() -> int:
    """Worker cap from ``CANTORDIM_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("CANTORDIM_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class PartitionCell:
    hausdorff: MeasureClass
    packing: MeasureClass

    def __post_init__(self):
        if self.hausdorff > self.packing:
            raise ValueError(
                f"cell below the diagonal: {self.hausdorff.label} > {self.packing.label}")

    @property
    def regular(self) -> bool:
        return self.hausdorff is MeasureClass.FINITE and self.packing is MeasureClass.FINITE

    def label(self) -> str:
        return f"({self.hausdorff.label},{self.packing.label})"


# ------------------------------------------------------------------ oracles

def _log_lengths(approx: CantorApproximation, generation: int | None):
    g = approx.depth if generation is None else generation
    return approx.log_length[approx.generation(g)]


def _check_domain(gauge: DimensionFunction, log_len: np.ndarray):
    if np.any(log_len > gauge.log_domain + 1e-12):
        worst = float(np.exp(log_len.max()))
        raise DomainError(f"interval length {worst:.6g} outside the domain of {gauge.spec()}")


def log_cover_sum(approx: CantorApproximation, gauge: DimensionFunction,
                  generation: int | None = None) -> float:
    """``log sum_j h(|I_j|)`` over one generation (default: the deepest)."""
    ll = _log_lengths(approx, generation)
    _check_domain(gauge, ll)
    return float(logsumexp(gauge.log_eval(ll)))


def cover_sum(approx: CantorApproximation, gauge: DimensionFunction,
              generation: int | None = None) -> float:
    """``sum_j h(|I_j|)`` over the intervals of one generation.

    >>> import math
    >>> from cantordim.cantor import build
    >>> from cantordim.gauges import Power
    >>> from cantordim.sequences import MiddleThirdBlocks
    >>> round(cover_sum(build(MiddleThirdBlocks(), 5), Power(math.log(2) / math.log(3))), 9)
    1.0
    """
    ll = _log_lengths(approx, generation)
    _check_domain(gauge, ll)
    with np.errstate(under="ignore"):
        return math.fsum(np.exp(gauge.log_eval(ll)))


def log_packing_sum(approx: CantorApproximation, gauge: DimensionFunction, delta: float,
                    generation: int | None = None) -> float:
    """``log`` of :func:`packing_sum`."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    ll = np.minimum(_log_lengths(approx, generation), math.log(delta))
    _check_domain(gauge, ll)
    return float(logsumexp(gauge.log_eval(ll)))


def packing_sum(approx: CantorApproximation, gauge: DimensionFunction, delta: float,
                generation: int | None = None) -> float:
    """``sum_j h(min(|I_j|, delta))`` for balls centred at interval midpoints.

    Each ball lies inside its own interval, so the balls are disjoint.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    ll = np.minimum(_log_lengths(approx, generation), math.log(delta))
    _check_domain(gauge, ll)
    with np.errstate(under="ignore"):
        return math.fsum(np.exp(gauge.log_eval(ll)))


@dataclass(frozen=True)
class OracleRow:
    depth: int
    cover: float
    packing: float
    log_cover: float
    log_packing: float


def oracle_rows(approx: CantorApproximation, gauge: DimensionFunction, depths) -> list[OracleRow]:
    """Cover and packing sums per generation; the packing uses ``delta`` = largest length."""
    rows = []
    for g in depths:
        ll = approx.log_length[approx.generation(g)]
        if np.any(ll > gauge.log_domain + 1e-12):
            continue
        # delta is kept in log form: deep generations of fast sequences underflow
        log_delta = float(ll.max())
        lc = float(logsumexp(gauge.log_eval(ll)))
        lp = float(logsumexp(gauge.log_eval(np.minimum(ll, log_delta))))
        rows.append(OracleRow(g, math.exp(lc), math.exp(lp), lc, lp))
    return rows


# ----------------------------------------------------------------- sandwich

@dataclass(frozen=True)
class SandwichReport:
    applicable: bool
    reason: str
    lower_limit: float | None
    upper_limit: float | None
    cover_min: float | None
    packing_max: float | None
    cover_ok: bool | None
    packing_ok: bool | None
    depths: tuple = ()

    @property
    def ok(self) -> bool:
        return self.applicable and bool(self.cover_ok) and self.packing_ok is not False


def _bracket(value: float, limit: float, tol: float) -> bool:
    return limit / 4.0 * (1.0 - tol) <= value <= 4.0 * limit * (1.0 + tol)


def sandwich_check(seq: GapSequence, gauge: DimensionFunction, depth: int, max_n: int, *,
                   estimate: LimitEstimate | None = None, approx: CantorApproximation | None = None,
                   tol: float = SANDWICH_TOL) -> SandwichReport:
    """Check the factor-4 bracket of the oracle sums by the tail-functional limits.

    The minimum cover sum over depths ``k/2 .. k`` is compared with the
    lower limit ``L`` and the maximum packing sum with the upper limit ``U``.
    Only meaningful when ``L`` is positive and finite; otherwise the report
    says "not applicable".  The packing side is skipped when ``U`` is not
    finite.
    """
    if estimate is None:
        n0 = first_in_domain(seq, gauge)
        n, lv = scaled_values(seq, gauge, grid=index_grid(max_n, start=n0), log=True)
        estimate = limit_estimates(n, lv, log=True)
    if estimate.liminf_class is not MeasureClass.FINITE:
        what = {MeasureClass.ZERO: "zero", MeasureClass.INFINITE: "infinite",
                None: "indeterminate"}[estimate.liminf_class]
        return SandwichReport(False, f"not applicable (liminf {what})", None, None,
                              None, None, None, None)
    approx = build(seq, depth) if approx is None else approx
    rows = oracle_rows(approx, gauge, range(max(1, depth // 2), depth + 1))
    if not rows:
        return SandwichReport(False, "not applicable (no depth inside the gauge domain)",
                              estimate.window_inf, estimate.window_sup, None, None, None, None)
    cover_min = min(r.cover for r in rows)
    packing_max = max(r.packing for r in rows)
    L, U = estimate.window_inf, estimate.window_sup
    cover_ok = _bracket(cover_min, L, tol)
    packing_ok = (_bracket(packing_max, U, tol)
                  if estimate.limsup_class is MeasureClass.FINITE else None)
    return SandwichReport(True, "checked", L, U, cover_min, packing_max, cover_ok, packing_ok,
                          tuple(r.depth for r in rows))


# ------------------------------------------------------------ classification

@dataclass(frozen=True)
class ClassificationReport:
    sequence_spec: str
    gauge_spec: str
    cell: PartitionCell | None
    estimate: LimitEstimate = field(repr=False)
    oracles: tuple = ()
    sandwich: SandwichReport | None = None
    reason: str = ""

    @property
    def verdict(self) -> str:
        return "classified" if self.cell is not None else "indeterminate"

    @property
    def regular(self) -> bool:
        return self.cell is not None and self.cell.regular


def classify(seq: GapSequence, gauge: DimensionFunction, max_n: int, depth: int | None = None,
             *, approx: CantorApproximation | None = None,
             sequence_spec: str | None = None) -> ClassificationReport:
    """Cell of ``h`` in the dimension partition of the set built from ``seq``.

    The grid starts at the first index whose scale lies in ``h``'s domain.
    Oscillating trends or a lower class above the upper class give an
    indeterminate verdict.  With ``depth`` the covering/packing oracles and
    the sandwich check are attached.
    """
    n0 = first_in_domain(seq, gauge)
    n, lv = scaled_values(seq, gauge, grid=index_grid(max_n, start=n0), log=True)
    est = limit_estimates(n, lv, log=True)
    a, b = est.liminf_class, est.limsup_class
    cell, reason = None, ""
    if a is None or b is None:
        reason = "oscillating trend"
    elif a > b:
        reason = "lower limit class above upper limit class"
    else:
        cell = PartitionCell(a, b)
    oracles, sandwich = (), None
    if depth is not None:
        approx = build(seq, depth) if approx is None else approx
        oracles = tuple(oracle_rows(approx, gauge, range(max(1, depth // 2), depth + 1)))
        sandwich = sandwich_check(seq, gauge, depth, max_n, estimate=est, approx=approx)
    return ClassificationReport(sequence_spec or seq.label(), gauge.spec(), cell, est,
                                oracles, sandwich, reason)


def battery(seq: GapSequence, gauges, max_n: int, depth: int | None = None,
            sequence_spec: str | None = None) -> list[ClassificationReport]:
    """Classify every gauge; rows run in parallel up to ``CANTORDIM_THREADS``."""
    gauges = list(gauges)
    approx = build(seq, depth) if depth is not None else None

    def one(gauge):
        return classify(seq, gauge, max_n, depth, approx=approx, sequence_spec=sequence_spec)

    workers = min(thread_count(), max(1, len(gauges)))
    if workers == 1:
        return [one(gauge) for gauge in gauges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, gauges))


_CELL_NAMES = {
    (0, 0): "0-h Hausdorff / 0-h packing",
    (0, 1): "0-h Hausdorff / h-packing set",
    (0, 2): "0-h Hausdorff / inf-h packing",
    (1, 1): "h-regular set",
    (1, 2): "h-Hausdorff set / inf-h packing",
    (2, 2): "inf-h Hausdorff / inf-h packing",
}


def render_table(reports) -> str:
    """Text grid of the partition: rows H_0, H_1, H_inf; columns P_0, P_1, P_inf."""
    cells = {key: [] for key in _CELL_NAMES}
    undecided = []
    for rep in reports:
        if rep.cell is None:
            undecided.append(rep.gauge_spec)
        else:
            cells[(int(rep.cell.hausdorff), int(rep.cell.packing))].append(rep.gauge_spec)
    width = max([34] + [len(", ".join(v)) + 2 for v in cells.values()])
    labels = ("0", "1", "inf")
    sep = "+" + "+".join(["-" * 7] + ["-" * width] * 3) + "+"
    lines = [sep, "|" + "|".join([" " * 7] + [f" P_{p}".ljust(width) for p in labels]) + "|", sep]
    for a in range(3):
        names, members = [], []
        for b in range(3):
            if b < a:
                names.append("")
                members.append("")
            else:
                names.append(" " + _CELL_NAMES[(a, b)])
                members.append(" " + (", ".join(cells[(a, b)]) or "-"))
        head = f" H_{labels[a]}".ljust(7)
        lines.append("|" + "|".join([head] + [s.ljust(width) for s in names]) + "|")
        lines.append("|" + "|".join([" " * 7] + [s.ljust(width) for s in members]) + "|")
        lines.append(sep)
    if undecided:
        lines.append("indeterminate: " + ", ".join(undecided))
    return "\n".join(lines)
