import math

import numpy as np
import pytest

from cantordim.errors import OutOfRangeError, ParameterDomainError, SequenceValidationError
from cantordim.sequences import (Explicit, TwinBlocks, Geometric, Halved, MiddleThirdBlocks,
                                 PowerLaw, twin_block_layout, make_sequence, validate)

# Hurwitz zeta values from an mpmath oracle at 30 digits
ZETA2 = {1: 1.6449340668482264, 10: 0.10516633568168575,
         1000: 0.0010005001666666333, 10 ** 6: 1.0000005000001667e-6}
ZETA3 = {10: 0.0055249174854010337, 1000: 5.0050024999991667e-7}


@pytest.mark.parametrize("n,expected", sorted(ZETA2.items()))
def test_power_law_half_tails_match_hurwitz_zeta(n, expected):
    assert PowerLaw(0.5).tail(n) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("n,expected", sorted(ZETA3.items()))
def test_power_law_third_tails_match_hurwitz_zeta(n, expected):
    assert PowerLaw(1 / 3).tail(n) == pytest.approx(expected, rel=1e-13)


def test_power_law_terms_and_scale():
    seq = PowerLaw(0.5, 2.0)
    assert seq.term(3) == pytest.approx(2 / 9)
    assert seq.tail(10) == pytest.approx(2 * ZETA2[10], rel=1e-13)


def test_geometric_closed_form():
    seq = Geometric(math.exp(-1))
    # mpmath: r_1 = e^-1/(1-e^-1), r_5 = e^-5/(1-e^-1)
    assert seq.tail(1) == pytest.approx(0.58197670686932642, rel=1e-14)
    assert seq.tail(5) == pytest.approx(0.010659275204673288, rel=1e-14)
    assert seq.log_tail(2000) == pytest.approx(-2000 - math.log1p(-math.exp(-1)), rel=1e-14)


def test_middle_third_blocks_terms_and_tails():
    seq = MiddleThirdBlocks()
    assert seq.term([1, 2, 3, 4, 7, 8]).tolist() == pytest.approx(
        [1 / 3, 1 / 9, 1 / 9, 1 / 27, 1 / 27, 1 / 81])
    assert seq.tail(1) == pytest.approx(1.0)
    # r_{2^(k-1)} = (2/3)^(k-1)
    for k in range(1, 30):
        assert seq.tail(2 ** (k - 1)) == pytest.approx((2 / 3) ** (k - 1), rel=1e-12)


def test_explicit_sequence_is_finite_support():
    seq = Explicit([0.5, 0.25, 0.25])
    assert seq.max_index == 3 and seq.finite_support
    assert seq.tail(1) == pytest.approx(1.0)
    assert seq.tail(3) == pytest.approx(0.25)
    assert seq.tail(4) == 0.0
    with pytest.raises(OutOfRangeError):
        seq.term(4)


def test_twin_block_layout_and_tails():
    assert twin_block_layout(3) == [(1, 2), (4, 30), (35, 2 ** 36 - 2)]
    first, second = TwinBlocks("first"), TwinBlocks("second")
    assert first.term(1) == 0.5 and first.term(2) == 0.125
    assert second.term(1) == 0.25 and second.term(3) == 0.25
    assert second.term(35) == 2.0 ** -70
    # tails decrease and telescope
    for seq in (first, second):
        assert validate(seq, 5000).ok


def test_halved_tail_identity():
    base = PowerLaw(0.5)
    gauge = Halved(base)
    n = np.arange(1, 200)
    assert np.allclose(gauge.tail(2 * n), base.tail(n), rtol=1e-14)
    assert gauge.term(1) == base.term(1)
    assert gauge.term(6) == gauge.term(7) == base.term(3) / 2


def test_halved_rejects_invalid_inner():
    with pytest.raises(SequenceValidationError):
        Halved(Explicit([0.3, 0.4]))


@pytest.mark.parametrize("family,params", [
    ("power_law", {"s": 1.0}),
    ("power_law", {"s": 0.5, "scale": -1.0}),
    ("geometric", {"ratio": 1.5}),
    ("middle_third_blocks", {"ratio": 0.5}),
    ("nonsense", {}),
    ("power_law", {"s": 0.5, "extra": 1}),
])
def test_make_sequence_rejects_bad_parameters(family, params):
    with pytest.raises(ParameterDomainError):
        make_sequence(family, **params)


def test_validate_flags_increasing_terms():
    rep = validate(Explicit([0.3, 0.4]), 10)
    assert not rep.monotone_ok and not rep.ok
    assert rep.failures[0][0] == 1


@pytest.mark.parametrize("seq", [PowerLaw(0.5), PowerLaw(0.9), Geometric(0.5),
                                 MiddleThirdBlocks(), Halved(Geometric(0.3))])
def test_validate_accepts_fixture_families(seq):
    rep = validate(seq, 100_000)
    assert rep.ok, rep.failures
    assert rep.tail_consistency_max_err < 1e-9
