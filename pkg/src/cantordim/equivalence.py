"""Equivalence of gap sequences: termwise, by tails, and weak-tail.

Verdicts hold at probed indices only; every verdict records the probe bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classification import battery
from .gauges import DimensionFunction, Power, LogReciprocal, associated_function, compare
from .sequences import GapSequence
from .trends import drift, index_grid

#: A ratio whose range over the probes exceeds this many nats is unbounded.
SPREAD_LIMIT = 20 * math.log(2.0)

#: Knot range of the associated gauges, as a multiple of the probe bound,
#: so that the other sequence's scales stay inside the knots.
KNOT_FACTOR = 64

#: Relative slack on the weak-tail inequalities.
WEAK_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class EquivalenceVerdict:
    relation: str  # "sequence" | "tail" | "weak_tail"
    holds: bool
    probe_bound: int
    witnesses: dict = field(default_factory=dict)
    counterexample: dict | None = None
    slope: float | None = None

    @property
    def verdict(self) -> str:
        return "holds_up_to_N" if self.holds else "refuted"


def _probe_limit(seq: GapSequence, max_n: int, tails: bool) -> int:
    lim = seq.max_tail_index if tails else seq.max_index
    if seq.finite_support and lim is not None:
        return min(max_n, int(lim) - (1 if tails else 0))
    return max_n


def _ratio_verdict(relation: str, n: np.ndarray, log_ratio: np.ndarray, max_n: int):
    grid = index_grid(int(n[-1]))
    lr_grid = log_ratio[grid - 1]
    slope, sign = drift(np.log(grid.astype(float)), lr_grid)
    lo, hi = float(log_ratio.min()), float(log_ratio.max())
    holds = sign == 0 and hi - lo <= SPREAD_LIMIT
    if holds:
        return EquivalenceVerdict(relation, True, max_n, {"c1": math.exp(lo), "c2": math.exp(hi)},
                                  None, slope)
    mid = float(np.median(log_ratio))
    up = sign > 0 or (sign == 0 and hi - mid >= mid - lo)
    i = int(np.argmax(log_ratio)) if up else int(np.argmin(log_ratio))
    with np.errstate(over="ignore"):
        ratio = float(np.exp(log_ratio[i]))
    example = {"index": int(n[i]), "ratio": ratio, "log_ratio": float(log_ratio[i]),
               "direction": "a/b unbounded above" if up else "a/b tends to zero"}
    return EquivalenceVerdict(relation, False, max_n, {}, example, slope)


def ratio_profile(first: GapSequence, second: GapSequence, max_n: int, *, tails: bool = True):
    """Indices ``1..max_n`` and ``log(a/b)`` of terms or tails."""
    max_n = min(_probe_limit(first, max_n, tails), _probe_limit(second, max_n, tails))
    n = np.arange(1, max_n + 1, dtype=np.int64)
    if tails:
        return n, np.asarray(first.log_tail(n)) - np.asarray(second.log_tail(n))
    return n, np.asarray(first.log_term(n)) - np.asarray(second.log_term(n))


def sequence_equivalent(first: GapSequence, second: GapSequence,
                        max_n: int = 100_000) -> EquivalenceVerdict:
    """Is ``c1 <= a_n / b_n <= c2`` for ``n <= max_n``?

    Refuted when the ratio drifts (slope test over the last third of a
    geometric grid) or spans more than ``2^20``.
    """
    n, lr = ratio_profile(first, second, max_n, tails=False)
    return _ratio_verdict("sequence", n, lr, int(n[-1]))


def tail_equivalent(first: GapSequence, second: GapSequence,
                    max_n: int = 100_000) -> EquivalenceVerdict:
    """Same test as :func:`sequence_equivalent` on ``r^a_n / r^b_n``."""
    n, lr = ratio_profile(first, second, max_n, tails=True)
    return _ratio_verdict("tail", n, lr, int(n[-1]))


def _log_tails_padded(seq: GapSequence, idx: np.ndarray) -> np.ndarray:
    out = np.full(idx.shape, -np.inf)
    lim = seq.max_tail_index
    ok = idx <= lim if lim is not None else np.ones(idx.shape, dtype=bool)
    out[ok] = seq.log_tail(idx[ok])
    return out


def _smallest_factor(x: GapSequence, y: GapSequence, max_n: int, jmax: int):
    """Smallest ``j <= jmax`` with ``r^x_n >= r^y_{jn} / j`` for all ``n <= max_n``."""
    n = np.arange(1, max_n + 1, dtype=np.int64)
    lx = np.asarray(x.log_tail(n))
    violations = {}
    for j in range(1, jmax + 1):
        rhs = _log_tails_padded(y, n * j) - math.log(j)
        bad = lx < rhs - WEAK_TAIL_TOL
        if not np.any(bad):
            return j, violations
        violations[j] = int(n[np.argmax(bad)])
    return None, violations


def weak_tail_equivalent(first: GapSequence, second: GapSequence, max_n: int = 100_000,
                         jmax: int = 64) -> EquivalenceVerdict:
    """Smallest ``j, k <= jmax`` with ``r^a_n >= r^b_{jn}/j`` and ``r^b_n >= r^a_{kn}/k``.

    Refuted verdicts list, for each failing factor, the first violating ``n``.
    """
    if jmax < 1:
        raise ValueError("jmax must be >= 1")
    max_n = min(_probe_limit(first, max_n, True), _probe_limit(second, max_n, True))
    j, viol_j = _smallest_factor(first, second, max_n, jmax)
    k, viol_k = _smallest_factor(second, first, max_n, jmax)
    if j is not None and k is not None:
        return EquivalenceVerdict("weak_tail", True, max_n, {"j": j, "k": k})
    example = {}
    if j is None:
        example["a_vs_b_first_violation_per_j"] = viol_j
    if k is None:
        example["b_vs_a_first_violation_per_k"] = viol_k
    return EquivalenceVerdict("weak_tail", False, max_n, {"j": j, "k": k}, example)


# -------------------------------------------------------------- crosscheck

def default_gauges() -> list[DimensionFunction]:
    return [Power(0.3), Power(0.5), Power(0.7), LogReciprocal(1.0, 1.0)]


@dataclass(frozen=True)
class CrosscheckReport:
    conditions: dict  # name -> "holds" | "refuted" | "indeterminate"
    details: dict = field(repr=False, default_factory=dict)

    @property
    def consistent(self) -> bool:
        vals = set(self.conditions.values())
        return len(vals) == 1 and "indeterminate" not in vals

    @property
    def verdict(self) -> str:
        vals = set(self.conditions.values())
        if "indeterminate" in vals:
            return "indeterminate"
        return vals.pop() if len(vals) == 1 else "inconsistent"


def four_condition_crosscheck(first: GapSequence, second: GapSequence, gauges=None,
                            max_n: int = 100_000, jmax: int = 64) -> CrosscheckReport:
    """Evaluate four conditions that must agree for a pair of sequences.

    1. the associated gauges of ``a`` and ``b`` are equivalent;
    2. both sets are regular for the same gauges of the battery;
    3. every gauge of the battery gets the same partition cell;
    4. ``a`` and ``b`` are weak tail-equivalent.

    The battery is ``gauges`` (default: powers 0.3, 0.5, 0.7 and
    ``logrec(1,1)``) plus both associated gauges.
    """
    ha = associated_function(first, _probe_limit(first, KNOT_FACTOR * max_n, True))
    hb = associated_function(second, _probe_limit(second, KNOT_FACTOR * max_n, True))
    gset = list(default_gauges() if gauges is None else gauges) + [ha, hb]
    ra = battery(first, gset, max_n)
    rb = battery(second, gset, max_n)
    cmp = compare(ha, hb)
    weak = weak_tail_equivalent(first, second, max_n, jmax)

    def state(flag):
        return "holds" if flag else "refuted"

    undecided = any(r.cell is None for r in ra + rb)
    regular = state([x.regular for x in ra] == [y.regular for y in rb])
    cells = state([x.cell for x in ra] == [y.cell for y in rb])
    conditions = {
        "associated_equivalent": state(cmp.equivalent),
        "regular_sets_agree": "indeterminate" if undecided else regular,
        "partitions_agree": "indeterminate" if undecided else cells,
        "weak_tail_equivalent": state(weak.holds),
    }
    details = {
        "comparison": cmp,
        "weak_tail": weak,
        "cells_a": [(r.gauge_spec, r.cell.label() if r.cell else None) for r in ra],
        "cells_b": [(r.gauge_spec, r.cell.label() if r.cell else None) for r in rb],
    }
    return CrosscheckReport(conditions, details)
