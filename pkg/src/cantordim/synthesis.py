"""Gap sequences generated by a target gauge.

Setting ``h(r_n/n) = 1/n`` gives the tails ``r_n = n h^-1(1/n)`` and the
terms ``a_n = r_n - r_{n+1}``.  Tails are stored in this exact form (never
re-summed) and terms are differenced in log space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SynthesisInfeasibleError
from .gauges import DimensionFunction, associated_function, compare
from .sequences import GapSequence
from .trends import log1mexp

#: Relative slack when checking that consecutive terms do not increase.
MONOTONE_TOL = 1e-12

#: Longest non-monotone head the envelope repair will level.
MAX_HEAD = 64


def _log_tail_formula(gauge: DimensionFunction, n: np.ndarray) -> np.ndarray:
    logn = np.log(np.asarray(n, dtype=float))
    return logn + gauge.log_inv(-logn)


class SynthesizedSequence(GapSequence):
    """Sequence with ``r_n = n h^-1(1/n)``, optionally with a levelled head.

    The head (indices ``1..m``) is present only when the envelope repair was
    requested; it replaces each head term by the largest term at or after it
    and re-sums the head tails.
    """

    family = "synthesized"
    max_index = None
    finite_support = False

    def __init__(self, gauge: DimensionFunction, count: int, head_terms=None):
        self.gauge = gauge
        self.count = int(count)
        if head_terms is None:
            self._head_log_terms = np.empty(0)
            self._head_log_tails = np.empty(0)
        else:
            terms = np.asarray(head_terms, dtype=float)
            m = terms.size
            rest = float(np.exp(_log_tail_formula(gauge, np.array([m + 1]))[0]))
            tails = [rest]
            for t in terms[::-1]:
                tails.append(math.fsum([tails[-1], t]))
            self._head_log_terms = np.log(terms)
            self._head_log_tails = np.log(np.array(tails[::-1][:-1]))

    @property
    def head_length(self) -> int:
        return int(self._head_log_terms.size)

    def params(self):
        return {"gauge": self.gauge.spec(), "count": self.count}

    def __repr__(self):
        return f"SynthesizedSequence({self.gauge.spec()}, count={self.count})"

    def _log_tails(self, n):
        out = _log_tail_formula(self.gauge, n)
        m = self.head_length
        if m:
            head = n <= m
            out = np.where(head, self._head_log_tails[np.clip(n, 1, m) - 1], out)
        return out

    def _log_terms(self, n):
        lo = _log_tail_formula(self.gauge, n)
        hi = _log_tail_formula(self.gauge, n + 1)
        out = lo + log1mexp(np.minimum(hi - lo, 0.0))
        m = self.head_length
        if m:
            head = n <= m
            out = np.where(head, self._head_log_terms[np.clip(n, 1, m) - 1], out)
        return out


def sequence_from_function(gauge: DimensionFunction, max_n: int, *,
                           head: str = "strict") -> SynthesizedSequence:
    """Sequence whose associated gauge is ``h``, checked on indices ``1..max_n+1``.

    Raises :class:`SynthesisInfeasibleError` naming the first index where the
    tails stop decreasing (or a term exceeds its predecessor).  With
    ``head="envelope"`` a non-monotone stretch confined to the first
    :data:`MAX_HEAD` terms is levelled instead; all tails past the head stay
    exact.

    >>> from cantordim.gauges import Power
    >>> round(sequence_from_function(Power(0.5), 100).term(1), 12)
    0.5
    """
    if head not in ("strict", "envelope"):
        raise ValueError("head must be 'strict' or 'envelope'")
    max_n = int(max_n)
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    n = np.arange(1, max_n + 3, dtype=np.int64)
    above = -np.log(n.astype(float)) > gauge.log_top + 1e-12
    if np.any(above):
        i = int(np.nonzero(above)[-1][-1])
        raise SynthesisInfeasibleError(
            f"1/n exceeds the value at the domain bound for n <= {n[i]}: "
            f"{gauge.spec()} cannot be inverted there",
            index=int(n[0]))
    lt = _log_tail_formula(gauge, n)
    if not np.all(np.isfinite(lt)):
        i = int(np.argmax(~np.isfinite(lt)))
        raise SynthesisInfeasibleError(f"tail undefined at n={n[i]} for {gauge.spec()}",
                                       index=int(n[i]))
    step = np.diff(lt)
    if np.any(step >= 0):
        i = int(np.argmax(step >= 0))
        raise SynthesisInfeasibleError(
            f"tails of {gauge.spec()} do not decrease at n={n[i]} (term not positive)",
            index=int(n[i]))
    la = lt[:-1] + log1mexp(step)
    rising = np.nonzero(np.diff(la) > MONOTONE_TOL * np.maximum(1.0, np.abs(la[1:])))[0]
    if rising.size == 0:
        return SynthesizedSequence(gauge, max_n)
    first = int(rising[0]) + 1
    last = int(rising[-1]) + 1
    if head == "strict" or last > MAX_HEAD:
        raise SynthesisInfeasibleError(
            f"terms of {gauge.spec()} increase after n={first}", index=first)
    terms = np.exp(la[: last + 1])
    envelope = np.maximum.accumulate(terms[::-1])[::-1][:last]
    return SynthesizedSequence(gauge, max_n, head_terms=envelope)


@dataclass(frozen=True)
class RoundtripReport:
    gauge_spec: str
    cell: str | None
    associated_equivalent: bool
    dim_h: float
    dim_p: float
    identity_max_err: float
    head_length: int

    @property
    def ok(self) -> bool:
        return self.cell == "(1,1)" and self.associated_equivalent


def roundtrip_check(gauge: DimensionFunction, max_n: int, depth: int | None = None, *,
                    head: str = "strict") -> RoundtripReport:
    """Synthesize from ``h`` and confirm ``h`` comes back as the regular gauge.

    Reports the partition cell of ``h``, whether the associated gauge of the
    synthesized sequence is equivalent to ``h``, the dimension estimates and
    the worst relative error of ``n h(r_n/n) = 1`` over ``n <= max_n``.
    """
    from .classification import classify
    from .tails import dimensions, log_scales

    seq = sequence_from_function(gauge, max_n, head=head)
    rep = classify(seq, gauge, max_n, depth)
    cmp = compare(associated_function(seq, max_n), gauge)
    dims = dimensions(seq, max(max_n, 1000))
    n = np.arange(seq.head_length + 1, max_n + 1, dtype=np.int64)
    log_identity = np.log(n.astype(float)) + gauge.log_eval(log_scales(seq, n))
    err = float(np.max(np.abs(np.expm1(log_identity))))
    return RoundtripReport(gauge.spec(), rep.cell.label() if rep.cell else None, cmp.equivalent,
                           dims.dim_h, dims.dim_p, err, seq.head_length)
