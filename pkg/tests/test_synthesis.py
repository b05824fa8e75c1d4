import math

import numpy as np
import pytest

from cantordim.errors import SynthesisInfeasibleError
from cantordim.gauges import LogReciprocal, Power, PowerLog
from cantordim.sequences import validate
from cantordim.synthesis import MAX_HEAD, roundtrip_check, sequence_from_function
from cantordim.tails import log_scales


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_power_synthesis_is_legal_and_exact(s):
    gauge = Power(s)
    seq = sequence_from_function(gauge, 10 ** 4)
    assert validate(seq, 10 ** 4).ok
    n = np.arange(1, 10 ** 4 + 1)
    err = np.abs(np.expm1(np.log(n) + gauge.log_eval(log_scales(seq, n))))
    assert err.max() < 1e-12


def test_power_half_closed_form():
    # r_n = n h^-1(1/n) = 1/n for h = x^(1/2), so a_n = 1/(n(n+1))
    seq = sequence_from_function(Power(0.5), 100)
    n = np.arange(1, 50)
    assert np.allclose(seq.term(n), 1 / (n * (n + 1)), rtol=1e-13)


def test_log_reciprocal_needs_envelope_head():
    gauge = LogReciprocal(1.0, 1.0)
    with pytest.raises(SynthesisInfeasibleError) as info:
        sequence_from_function(gauge, 1000)
    assert info.value.index == 1
    seq = sequence_from_function(gauge, 1000, head="envelope")
    assert seq.head_length == 1
    assert validate(seq, 1000).ok
    # unrepaired terms from an mpmath oracle
    assert seq.term(2) == pytest.approx(0.12130936136963355, rel=1e-12)
    assert seq.term(3) == pytest.approx(0.076098649548655108, rel=1e-12)
    # the levelled head term is the largest term after it
    assert seq.term(1) == pytest.approx(seq.term(2), rel=1e-12)
    assert seq.term(1) > 0.097208874698216938


def test_infeasible_when_one_over_n_exceeds_the_top():
    with pytest.raises(SynthesisInfeasibleError, match="domain bound"):
        sequence_from_function(PowerLog(0.5, 1.0), 100)


def test_bad_arguments():
    with pytest.raises(ValueError):
        sequence_from_function(Power(0.5), 0)
    with pytest.raises(ValueError):
        sequence_from_function(Power(0.5), 10, head="sideways")


def test_roundtrip_report():
    rep = roundtrip_check(Power(0.5), 10 ** 4)
    assert rep.ok and rep.cell == "(1,1)" and rep.associated_equivalent
    assert rep.identity_max_err < 1e-12
    assert rep.head_length == 0


def test_roundtrip_log_reciprocal_with_envelope():
    rep = roundtrip_check(LogReciprocal(1.0, 1.0), 10 ** 4, head="envelope")
    assert rep.ok and rep.head_length == 1


def test_max_head_constant():
    assert MAX_HEAD == 64
