"""Gap sequences: positive, non-increasing, summable sequences ``a_n``.

Each family gives term access ``a_n``, tail access ``r_n = sum_{j >= n} a_j``
and log-space versions of both.  All accessors accept a scalar index or an
integer array and are vectorised.  Log-space access matters: geometric-type
tails underflow long before the indices we probe become large.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    OutOfRangeError,
    ParameterDomainError,
    SequenceValidationError,
)

#: Largest index any family accepts; keeps heap arithmetic inside int64.
INDEX_LIMIT = 2 ** 62

#: Relative tolerance for the telescoping check r_n = a_n + r_{n+1}.
TAIL_CONSISTENCY_TOL = 1e-12

# log r below which tails are checked in log space rather than linearly
_LINEAR_FLOOR = math.log(1e-290)


def _indices(n, limit):
    arr = np.asarray(n)
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
            raise TypeError("indices must be integers")
    elif arr.dtype.kind not in "iu":
        raise TypeError("indices must be integers")
    arr = arr.astype(np.int64)
    if arr.size and arr.min() < 1:
        raise OutOfRangeError(f"index {int(arr.min())} < 1")
    if arr.size and limit is not None and arr.max() > limit:
        raise OutOfRangeError(f"index {int(arr.max())} beyond last valid index {limit}")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


class GapSequence:
    """Common interface of every gap-sequence family.

    Subclasses implement at least one of ``_terms``/``_log_terms`` and one of
    ``_tails``/``_log_tails``; each pair falls back on the other.
    """

    family: str = ""
    #: Last valid term index (``None``: unbounded).
    max_index: int | None = INDEX_LIMIT
    #: True when every term past ``max_index`` is zero (or dropped as negligible);
    #: otherwise ``max_index`` is only a representation limit.
    finite_support: bool = False

    @property
    def max_tail_index(self) -> int | None:
        return None if self.max_index is None else self.max_index + 1

    def params(self) -> dict:
        return {}

    def _terms(self, n):
        return np.exp(self._log_terms(n))

    def _log_terms(self, n):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(self._terms(n))

    def _tails(self, n):
        return np.exp(self._log_tails(n))

    def _log_tails(self, n):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(self._tails(n))

    def term(self, n):
        """``a_n`` (float for a scalar index, array otherwise)."""
        idx = _indices(n, self.max_index)
        return _out(self._terms(idx), n)

    def log_term(self, n):
        idx = _indices(n, self.max_index)
        return _out(self._log_terms(idx), n)

    def tail(self, n):
        """``r_n = sum_{j >= n} a_j``."""
        idx = _indices(n, self.max_tail_index)
        return _out(self._tails(idx), n)

    def log_tail(self, n):
        idx = _indices(n, self.max_tail_index)
        return _out(self._log_tails(idx), n)

    def remainder_bound(self, m: int) -> float:
        """Certified bound on the error of the tail value returned at ``m``.

        Closed-form families return 0.
        """
        return 0.0

    def label(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params().items())
        return f"{self.family}({inner})"


# ---------------------------------------------------------------- power law

# Euler-Maclaurin correction terms for sum_{j>=M} j^{-p}: B_{2k}/(2k)! paired
# with the rising-factorial order 2k-1.
_EM_TERMS = ((1.0 / 12.0, 1), (-1.0 / 720.0, 3), (1.0 / 30240.0, 5), (-1.0 / 1209600.0, 7))
_EM_NEXT = (1.0 / 47900160.0, 9)


def _rising(p: float, m: int) -> float:
    out = 1.0
    for i in range(m):
        out *= p + i
    return out


@dataclass(frozen=True)
class PowerLaw(GapSequence):
    """``a_n = scale * n^(-1/s)`` with ``0 < s < 1``.

    Tails use the Euler-Maclaurin expansion at ``max(n, cutoff)`` and a
    compensated head sum below the cutoff; the first omitted expansion term
    bounds the error because every derivative of ``x^-p`` is monotone.
    """

    dimension: float
    scale: float = 1.0
    family = "power_law"
    _cutoff: int = field(init=False, repr=False, compare=False)
    _head: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 < self.dimension < 1.0:
            raise ParameterDomainError(f"power_law needs 0 < s < 1, got {self.dimension}")
        if not self.scale > 0.0:
            raise ParameterDomainError(f"power_law needs scale > 0, got {self.scale}")
        m = 16
        while self._em_error(m) > 1e-17 * self._em(np.array([m], dtype=float))[0]:
            m *= 2
        head = []
        acc = float(self._em(np.array([m], dtype=float))[0])
        terms = [self.scale * float(j) ** (-self.decay) for j in range(1, m)]
        for j in range(m - 1, 0, -1):
            head.append(math.fsum(terms[j - 1:]) + acc)
        object.__setattr__(self, "_cutoff", m)
        object.__setattr__(self, "_head", tuple(reversed(head)))

    @property
    def decay(self) -> float:
        return 1.0 / self.dimension

    def params(self):
        return {"s": self.dimension, "scale": self.scale}

    def _em(self, x):
        p = self.decay
        inv = 1.0 / x
        series = x / (p - 1.0) + 0.5
        for coef, order in _EM_TERMS:
            series = series + coef * _rising(p, order) * inv ** order
        return self.scale * x ** (-p) * series

    def _em_error(self, m: float) -> float:
        coef, order = _EM_NEXT
        p = self.decay
        return self.scale * coef * _rising(p, order) * m ** (-p - order)

    def remainder_bound(self, m):
        return self._em_error(float(max(m, self._cutoff)))

    def _terms(self, n):
        return self.scale * n.astype(float) ** (-self.decay)

    def _log_terms(self, n):
        return math.log(self.scale) - self.decay * np.log(n.astype(float))

    def _tails(self, n):
        n = np.asarray(n)
        out = np.empty(n.shape, dtype=float)
        small = n < self._cutoff
        if np.any(small):
            out[small] = np.asarray(self._head)[n[small] - 1]
        big = ~small
        if np.any(big):
            out[big] = self._em(n[big].astype(float))
        return out


# ---------------------------------------------------------------- geometric

@dataclass(frozen=True)
class Geometric(GapSequence):
    """``a_n = scale * ratio^n``; tails in closed form."""

    ratio: float
    scale: float = 1.0
    family = "geometric"

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise ParameterDomainError(f"geometric needs 0 < ratio < 1, got {self.ratio}")
        if not self.scale > 0.0:
            raise ParameterDomainError(f"geometric needs scale > 0, got {self.scale}")

    def params(self):
        return {"ratio": self.ratio, "scale": self.scale}

    def _log_terms(self, n):
        return math.log(self.scale) + n.astype(float) * math.log(self.ratio)

    def _log_tails(self, n):
        return self._log_terms(n) - math.log1p(-self.ratio)

    def remainder_bound(self, m):
        return 0.0


# ------------------------------------------------------- middle-third blocks

@dataclass(frozen=True)
class MiddleThirdBlocks(GapSequence):
    """Central Cantor gaps: ``a_n = (1-2*ratio) * ratio^(k-1)`` for ``2^(k-1) <= n < 2^k``.

    ``ratio = 1/3`` gives ``a_n = 3^-k``, the classical middle-third set.
    """

    ratio: float = 1.0 / 3.0
    family = "middle_third_blocks"
    max_index = 2 ** 53 - 1

    def __post_init__(self):
        if not 0.0 < self.ratio < 0.5:
            raise ParameterDomainError(
                f"middle_third_blocks needs 0 < ratio < 1/2, got {self.ratio}")

    def params(self):
        return {"ratio": self.ratio}

    @staticmethod
    def block(n):
        """Block index ``k = floor(log2 n) + 1``."""
        return np.frexp(np.asarray(n, dtype=float))[1].astype(np.int64)

    def _log_terms(self, n):
        k = self.block(n).astype(float)
        return math.log1p(-2.0 * self.ratio) + (k - 1.0) * math.log(self.ratio)

    def _tails(self, n):
        k = self.block(n)
        lam = self.ratio
        gap = (1.0 - 2.0 * lam) * lam ** (k - 1.0)
        return (np.ldexp(1.0, k) - n.astype(float)) * gap + (2.0 * lam) ** k.astype(float)


# ----------------------------------------------------------------- explicit

class Explicit(GapSequence):
    """A finite list of gaps; ``r_{L+1} = 0`` closes the tail."""

    family = "explicit"

    def __init__(self, terms: Iterable[float]):
        values = np.array([float(t) for t in terms], dtype=float)
        if values.size == 0:
            raise ParameterDomainError("explicit sequence needs at least one term")
        if not np.all(np.isfinite(values)):
            raise ParameterDomainError("explicit terms must be finite")
        self.values = values
        self.values.setflags(write=False)
        self.max_index = int(values.size)
        self.finite_support = True
        # backward Neumaier summation
        tails = np.zeros(values.size + 2)
        total = comp = 0.0
        for i in range(values.size - 1, -1, -1):
            v = float(values[i])
            t = total + v
            if abs(total) >= abs(v):
                comp += (total - t) + v
            else:
                comp += (v - t) + total
            total = t
            tails[i + 1] = total + comp
        self._tail_table = tails
        self._tail_table.setflags(write=False)

    def params(self):
        return {"length": self.max_index}

    def __repr__(self):
        return f"Explicit(length={self.max_index})"

    def _terms(self, n):
        return self.values[n - 1]

    def _tails(self, n):
        return self._tail_table[n]


# ------------------------------------------------------------- twin blocks

def twin_block_layout(count: int = 3):
    """``(k_j, n_j)`` for ``j = 1..count`` with ``k_1 = 1``, ``n_j = 2^(k_j+1) - 2``."""
    out = []
    k = 1
    for _ in range(count):
        n = 2 ** (k + 1) - 2
        out.append((k, n))
        k = n + k + 1
    return out


def twin_block_next_start(count: int = 3) -> int:
    """``k_{count+1}``, the first index of the block after ``count``."""
    k, n = twin_block_layout(count)[-1]
    return n + k + 1


@dataclass(frozen=True)
class TwinBlocks(GapSequence):
    """The tail-equivalent but inequivalent pair built on blocks ``k_j``.

    ``first``: ``a_{k_j} = 2^-k_j`` then ``2^-(2k_j+1)`` on ``k_j+1..n_j+k_j``.
    ``second``: ``2^-2k_j`` on the whole block ``k_j..n_j+k_j``.
    Only blocks ``j <= 3`` are representable; block 4 starts at ``2^36 + 34``
    where every term underflows, so its contribution (below ``2^-(2^36)``)
    is dropped from the tails.
    """

    which: str = "first"
    _starts: np.ndarray = field(init=False, repr=False, compare=False)
    _heads: np.ndarray = field(init=False, repr=False, compare=False)
    _rests: np.ndarray = field(init=False, repr=False, compare=False)
    _ends: np.ndarray = field(init=False, repr=False, compare=False)
    _later: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.which not in ("first", "second"):
            raise ParameterDomainError(
                f"twin-block variant must be first/second, got {self.which!r}")
        blocks = twin_block_layout(3)
        object.__setattr__(self, "max_index", twin_block_next_start(3) - 1)
        object.__setattr__(self, "finite_support", True)
        starts, heads, rests, ends, sums = [], [], [], [], []
        for k, n in blocks:
            if self.which == "first":
                head, rest = math.ldexp(1.0, -k), math.ldexp(1.0, -(2 * k + 1))
            else:
                head = rest = math.ldexp(1.0, -2 * k)
            starts.append(k)
            ends.append(n + k)
            heads.append(head)
            rests.append(rest)
            sums.append(head + n * rest)
        later = [math.fsum(sums[j + 1:]) for j in range(3)]
        for name, vals, dt in (("_starts", starts, np.int64), ("_heads", heads, float),
                               ("_rests", rests, float), ("_ends", ends, np.int64),
                               ("_later", later, float)):
            object.__setattr__(self, name, np.array(vals, dtype=dt))

    @property
    def family(self):
        return f"example_a_{self.which}"

    def params(self):
        return {}

    def blocks(self):
        return [(int(k), int(e - k)) for k, e in zip(self._starts, self._ends)]

    def _block_of(self, n):
        return np.searchsorted(self._starts, n, side="right") - 1

    def _terms(self, n):
        j = self._block_of(n)
        return np.where(n == self._starts[j], self._heads[j], self._rests[j])

    def _tails(self, n):
        j = self._block_of(n)
        ends = self._ends[j]
        head = np.where(n == self._starts[j], self._heads[j] - self._rests[j], 0.0)
        count = (ends - n + 1).astype(float)
        return head + count * self._rests[j] + self._later[j]


# ----------------------------------------------------------------- halving

class Halved(GapSequence):
    """``b_1 = a_1``, ``b_{2k} = b_{2k+1} = a_k / 2``; then ``r^b_{2n} = r^a_n``."""

    family = "halved_of"

    def __init__(self, inner: GapSequence, check_up_to: int = 4096):
        report = validate(inner, check_up_to if inner.max_index is None
                          else max(2, min(check_up_to, inner.max_index)))
        if not report.ok:
            raise SequenceValidationError(
                f"halved_of needs a valid inner sequence: {report.failures[:3]}")
        self.inner = inner
        lim = inner.max_index
        self.max_index = None if lim is None else min(2 * lim + 1, INDEX_LIMIT)
        self.finite_support = inner.finite_support

    def params(self):
        return {"inner": self.inner.label()}

    def __repr__(self):
        return f"Halved({self.inner!r})"

    def _terms(self, n):
        m = np.maximum(n // 2, 1)
        out = self.inner.term(m) / 2.0
        return np.where(n == 1, self.inner.term(np.ones_like(n)), out)

    def _log_terms(self, n):
        m = np.maximum(n // 2, 1)
        out = self.inner.log_term(m) - math.log(2.0)
        return np.where(n == 1, self.inner.log_term(np.ones_like(n)), out)

    def _log_tails(self, n):
        m = np.maximum(n // 2, 1)
        odd = (n % 2 == 1) & (n > 1)
        out = np.array(self.inner.log_tail(m), dtype=float)
        if np.any(odd):
            mo = m[odd]
            out[odd] = np.logaddexp(self.inner.log_tail(mo + 1),
                                    self.inner.log_term(mo) - math.log(2.0))
        one = n == 1
        if np.any(one):
            out[one] = np.logaddexp(self.inner.log_term(1), self.inner.log_tail(1))
        return out

    def _tails(self, n):
        m = np.maximum(n // 2, 1)
        odd = (n % 2 == 1) & (n > 1)
        out = np.array(self.inner.tail(m), dtype=float)
        if np.any(odd):
            mo = m[odd]
            out[odd] = self.inner.tail(mo + 1) + self.inner.term(mo) / 2.0
        one = n == 1
        if np.any(one):
            out[one] = self.inner.term(1) + self.inner.tail(1)
        return out

    def remainder_bound(self, m):
        return self.inner.remainder_bound(max(1, m // 2))


# --------------------------------------------------------------- validation

@dataclass(frozen=True)
class ValidationReport:
    checked_up_to: int
    monotone_ok: bool
    positive_ok: bool
    tail_ok: bool
    tail_consistency_max_err: float
    failures: tuple = ()

    @property
    def ok(self) -> bool:
        return self.monotone_ok and self.positive_ok and self.tail_ok


def _validation_indices(max_n: int) -> np.ndarray:
    dense = np.arange(1, min(max_n, 4096) + 1, dtype=np.int64)
    if max_n <= 4096:
        return dense
    geo = np.unique(np.rint(np.geomspace(4096, max_n, 256)).astype(np.int64))
    return np.union1d(dense, geo)


def validate(seq: GapSequence, max_n: int) -> ValidationReport:
    """Check positivity, monotonicity and ``r_n = a_n + r_{n+1}`` up to ``max_n``.

    Dense below 4096, geometric above.  Failures are reported, never raised.
    """
    if max_n < 2:
        raise ValueError("validate needs max_n >= 2")
    if seq.max_index is not None:
        max_n = min(int(max_n), int(seq.max_index))
    n = _validation_indices(max_n)
    failures = []

    la = np.asarray(seq.log_term(n), dtype=float)
    positive = np.isfinite(la)
    failures.extend((int(i), "non-positive term") for i in n[~positive][:20])

    m = n if seq.max_index is None else n[n + 1 <= seq.max_index]
    monotone_ok = True
    if m.size:
        la_m, la_next = np.asarray(seq.log_term(m)), np.asarray(seq.log_term(m + 1))
        with np.errstate(invalid="ignore"):
            bad = np.where(np.isfinite(la_m) & np.isfinite(la_next), la_m < la_next,
                           np.asarray(seq.term(m)) < np.asarray(seq.term(m + 1)))
        monotone_ok = not bool(np.any(bad))
        failures.extend((int(i), "term increases at next index") for i in m[bad][:20])

    # relative telescoping residual; where values underflow it is measured in
    # log space, net of the float resolution of log r_n itself
    lr = np.asarray(seq.log_tail(n), dtype=float)
    lr_next = np.asarray(seq.log_tail(n + 1), dtype=float)
    usable = positive & np.isfinite(lr)
    err = 0.0
    if np.any(usable):
        nu, la_u, lr_u, lrn_u = n[usable], la[usable], lr[usable], lr_next[usable]
        linear = lr_u > _LINEAR_FLOOR
        diff = np.empty(nu.size)
        if np.any(linear):
            r = np.asarray(seq.tail(nu[linear]), dtype=float)
            r_next = np.asarray(seq.tail(nu[linear] + 1), dtype=float)
            a = np.asarray(seq.term(nu[linear]), dtype=float)
            diff[linear] = np.abs(a + r_next - r) / r
        if np.any(~linear):
            with np.errstate(invalid="ignore"):
                d = np.abs(np.logaddexp(la_u[~linear], lrn_u[~linear]) - lr_u[~linear])
            diff[~linear] = np.maximum(d - 4.0 * np.finfo(float).eps * np.abs(lr_u[~linear]), 0.0)
        diff = np.where(np.isnan(diff), math.inf, diff)
        err = float(diff.max())
        if err > TAIL_CONSISTENCY_TOL:
            worst = int(nu[int(np.argmax(diff))])
            failures.append((worst, f"tail inconsistency {err:.3g}"))
    tail_ok = err <= TAIL_CONSISTENCY_TOL
    return ValidationReport(int(max_n), monotone_ok, bool(np.all(positive)), tail_ok, err,
                            tuple(failures))


# ------------------------------------------------------------------ factory

FAMILIES = ("power_law", "geometric", "middle_third_blocks", "explicit",
            "example_a_first", "example_a_second", "halved_of", "synthesized")


def make_sequence(family: str, **params) -> GapSequence:
    """Build a gap sequence from a family tag and its parameters.

    >>> make_sequence("power_law", s=0.5).term(4)
    0.0625
    """
    params = dict(params)

    def take(key, default=None, required=True):
        if key in params:
            return params.pop(key)
        if required and default is None:
            raise ParameterDomainError(f"{family} is missing parameter {key!r}")
        return default

    if family == "power_law":
        seq = PowerLaw(float(take("s")), float(take("scale", 1.0)))
    elif family == "geometric":
        seq = Geometric(float(take("ratio")), float(take("scale", 1.0)))
    elif family == "middle_third_blocks":
        seq = MiddleThirdBlocks(float(take("ratio", 1.0 / 3.0)))
    elif family == "explicit":
        seq = Explicit(take("terms"))
    elif family in ("example_a_first", "example_a_second"):
        seq = TwinBlocks(family.rsplit("_", 1)[1])
    elif family == "halved_of":
        inner = take("inner")
        if isinstance(inner, dict):
            inner = make_sequence(**inner)
        seq = Halved(inner)
    elif family == "synthesized":
        from .synthesis import sequence_from_function

        gauge = take("gauge")
        if isinstance(gauge, str):
            from .specfiles import parse_gauge

            gauge = parse_gauge(gauge)
        seq = sequence_from_function(gauge, int(take("count")),
                                     head=take("head", "strict"))
    else:
        raise ParameterDomainError(f"unknown sequence family {family!r}")
    if params:
        raise ParameterDomainError(f"unknown parameters for {family}: {sorted(params)}")
    return seq


def explicit(terms: Sequence[float]) -> Explicit:
    return Explicit(terms)
