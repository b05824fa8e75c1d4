"""Finite-depth interval trees of cut-out Cantor sets and their uniform measure.

Node ``m`` of the binary tree (heap indexing, root 1) is an interval; gap
``a_m`` splits it into children ``2m`` (left) and ``2m + 1`` (right).  The
length of node ``m`` is the telescoping sum

    S(m) = sum_{l >= 0} (r_{2^l m} - r_{2^l (m+1)}).

Leaf lengths are evaluated in log space so that fast-decaying sequences keep
their relative precision after linear values have underflowed.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ResourceError
from .sequences import INDEX_LIMIT, GapSequence
from .trends import log1mexp

#: Deepest tree :func:`build` will allocate (``2^(k+1)`` nodes).
MAX_DEPTH = 22

#: A telescoping level is dropped once it is this small relative to the partial sum.
LEVEL_REL_TOL = 1e-17


def _log_tails_padded(seq: GapSequence, idx: np.ndarray) -> np.ndarray:
    """``log r_n`` with ``-inf`` beyond the last index of a finite sequence."""
    out = np.full(idx.shape, -np.inf)
    lim = seq.max_tail_index
    ok = idx <= lim if lim is not None else np.ones(idx.shape, dtype=bool)
    if np.any(ok):
        out[ok] = seq.log_tail(idx[ok])
    return out


def _log_level_diff(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """``log(r_lo - r_hi)`` from ``log r_lo`` and ``log r_hi`` (``r_hi <= r_lo``)."""
    with np.errstate(invalid="ignore"):
        gap = np.minimum(hi - lo, 0.0)
        out = lo + log1mexp(np.where(np.isfinite(lo), gap, -np.inf))
    return np.where(np.isfinite(lo), out, -np.inf)


def _log_subtree_lengths(seq: GapSequence, first: int, count: int) -> np.ndarray:
    """``log S(m)`` for ``m = first .. first + count - 1`` via shared level boundaries.

    Level ``l`` contributes ``r_{2^l m} - r_{2^l (m+1)}``; the boundaries of
    consecutive ``m`` coincide, so each level costs ``count + 1`` tail calls.
    Stops when a level is negligible for every node, when all tails vanish,
    or at the 64-bit index limit; in the last case the remaining levels are
    extrapolated as a geometric series from the last two levels.
    """
    finite = seq.finite_support
    top = min(INDEX_LIMIT, seq.max_tail_index or INDEX_LIMIT)
    base = np.arange(first, first + count + 1, dtype=np.int64)
    acc = None
    prev = None
    level = 0
    while True:
        bounds = _log_tails_padded(seq, base << level)
        diff = _log_level_diff(bounds[:-1], bounds[1:])
        acc = diff if acc is None else np.logaddexp(acc, diff)
        if not np.any(np.isfinite(bounds)):
            break
        with np.errstate(invalid="ignore"):
            small = ~np.isfinite(diff) | (diff - acc < math.log(LEVEL_REL_TOL))
        if level > 0 and np.all(small):
            break
        if int(base[-1]) << (level + 1) > top:
            if not finite and prev is not None:
                with np.errstate(invalid="ignore"):
                    q = np.clip(diff - prev, -np.inf, math.log(0.999))
                rest = diff + q - log1mexp(q)
                acc = np.where(np.isfinite(rest), np.logaddexp(acc, rest), acc)
            break
        prev = diff
        level += 1
    return acc


def interval_length(seq: GapSequence, m: int) -> float:
    """Length of tree node ``m`` (``S(1) = r_1``).

    >>> from cantordim.sequences import MiddleThirdBlocks
    >>> round(interval_length(MiddleThirdBlocks(), 2), 12)
    0.333333333333
    """
    if int(m) < 1:
        raise ValueError("heap index must be >= 1")
    return float(np.exp(_log_subtree_lengths(seq, int(m), 1)[0]))


@dataclass(frozen=True, eq=False)
class CantorApproximation:
    """Depth-``k`` approximation: all tree nodes up to generation ``k``.

    Arrays are heap-indexed (entry 0 unused): ``left[m]``, ``length[m]`` and
    ``log_length[m]`` for ``1 <= m < 2^(k+1)``.
    """

    depth: int
    origin: float
    seq: GapSequence
    left: np.ndarray
    length: np.ndarray
    log_length: np.ndarray

    def generation(self, g: int) -> slice:
        if not 0 <= g <= self.depth:
            raise IndexError(f"generation {g} outside 0..{self.depth}")
        return slice(1 << g, 1 << (g + 1))

    @property
    def leaf_left(self) -> np.ndarray:
        return self.left[self.generation(self.depth)]

    @property
    def leaf_length(self) -> np.ndarray:
        return self.length[self.generation(self.depth)]

    @property
    def leaf_log_length(self) -> np.ndarray:
        return self.log_length[self.generation(self.depth)]

    @property
    def total_length(self) -> float:
        return float(self.length[1])

    @property
    def right_end(self) -> float:
        return self.origin + self.total_length

    def intervals(self, g: int | None = None):
        """``(left, length)`` arrays of generation ``g`` (default: the leaves)."""
        sl = self.generation(self.depth if g is None else g)
        return self.left[sl], self.length[sl]


def build(seq: GapSequence, depth: int, origin: float = 0.0) -> CantorApproximation:
    """Place the first ``2^depth - 1`` gaps and return every node interval."""
    k = int(depth)
    if k < 0:
        raise ValueError("depth must be >= 0")
    if k > MAX_DEPTH:
        raise ResourceError(f"depth {k} exceeds the desk-scale limit {MAX_DEPTH}")
    size = 1 << (k + 1)
    log_len = np.empty(size)
    log_len[0] = np.nan
    leaves = slice(1 << k, size)
    log_len[leaves] = _log_subtree_lengths(seq, 1 << k, 1 << k)
    if k > 0:
        lim = seq.max_index
        gaps_idx = np.arange(1, 1 << k, dtype=np.int64)
        log_gap = np.full(gaps_idx.shape, -np.inf)
        ok = gaps_idx <= lim if lim is not None else np.ones(gaps_idx.shape, dtype=bool)
        log_gap[ok] = seq.log_term(gaps_idx[ok])
        for g in range(k - 1, -1, -1):
            m = np.arange(1 << g, 1 << (g + 1))
            log_len[m] = np.logaddexp(log_gap[m - 1],
                                      np.logaddexp(log_len[2 * m], log_len[2 * m + 1]))
    with np.errstate(under="ignore"):
        length = np.exp(log_len)
    left = np.empty(size)
    left[0] = np.nan
    left[1] = origin
    if k > 0:
        gap = np.exp(log_gap)
        for g in range(k):
            m = np.arange(1 << g, 1 << (g + 1))
            left[2 * m] = left[m]
            left[2 * m + 1] = left[m] + length[2 * m] + gap[m - 1]
    for arr in (left, length, log_len):
        arr.setflags(write=False)
    return CantorApproximation(k, float(origin), seq, left, length, log_len)


def measure_cdf(approx: CantorApproximation, x):
    """``mu_k([origin, x])`` with each leaf's mass ``2^-k`` spread uniformly over it."""
    xs = np.asarray(x, dtype=float)
    lefts, lengths = approx.intervals()
    w = math.ldexp(1.0, -approx.depth)
    i = np.searchsorted(lefts, xs, side="right") - 1
    inside = i >= 0
    j = np.clip(i, 0, None)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        frac = np.where(lengths[j] > 0, (xs - lefts[j]) / lengths[j], 1.0)
    out = np.where(inside, (j + np.clip(frac, 0.0, 1.0)) * w, 0.0)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if np.ndim(x) == 0 else out


def ball_mass(approx: CantorApproximation, x0, r):
    """``mu_k(B(x0, r))``."""
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise ValueError("radius must be positive")
    x0 = np.asarray(x0, dtype=float)
    out = measure_cdf(approx, x0 + r) - measure_cdf(approx, x0 - r)
    return float(out) if np.ndim(out) == 0 else out


def first_contained_generation(approx: CantorApproximation, x0: float, r: float,
                               rtol: float = 1e-12) -> int | None:
    """Smallest generation with an interval inside ``[x0 - r, x0 + r]``."""
    slack = rtol * approx.total_length
    lo, hi = x0 - r - slack, x0 + r + slack
    for g in range(approx.depth + 1):
        lefts, lengths = approx.intervals(g)
        i = int(np.searchsorted(lefts, lo, side="left"))
        if i < lefts.size and lefts[i] + lengths[i] <= hi:
            return g
    return None


@dataclass(frozen=True)
class BallCheck:
    samples: int
    worst_ratio: float
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def five_interval_check(approx: CantorApproximation, samples: int = 200,
                        seed: int = 0) -> BallCheck:
    """Check ``mu_k(B(x0, r)) <= 5 * 2^-k*`` on random balls.

    Centres are leaf endpoints; radii are log-uniform between the largest
    leaf length and the total length, so some leaf always fits in the ball.
    ``k*`` is the first generation with an interval inside the ball.
    """
    if approx.depth < 1:
        raise InsufficientDataError("the ball check needs depth >= 1")
    rng = np.random.default_rng(seed)
    lefts, lengths = approx.intervals()
    ends = np.concatenate([lefts, lefts + lengths])
    r_lo = max(math.exp(float(np.max(approx.leaf_log_length))), 1e-15 * approx.total_length)
    r_hi = approx.total_length
    centres = rng.choice(ends, size=samples)
    radii = np.exp(rng.uniform(math.log(r_lo), math.log(r_hi), size=samples))
    worst = 0.0
    bad = []
    for x0, r in zip(centres, radii):
        g = first_contained_generation(approx, float(x0), float(r))
        if g is None:
            continue
        mass = ball_mass(approx, float(x0), float(r))
        ratio = mass / (5.0 * math.ldexp(1.0, -g))
        worst = max(worst, ratio)
        if ratio > 1.0 + 1e-12:
            bad.append((float(x0), float(r), g, mass))
    return BallCheck(samples, worst, tuple(bad))


def write_intervals_csv(approx: CantorApproximation, fh) -> None:
    """Leaf intervals as CSV rows ``generation,heap_index,left,length``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["generation", "heap_index", "left", "length"])
    lefts, lengths = approx.intervals()
    base = 1 << approx.depth
    for j, (x, ln) in enumerate(zip(lefts, lengths)):
        w.writerow([approx.depth, base + j, f"{x:.17g}", f"{ln:.17g}"])
