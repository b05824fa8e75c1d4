import math

import numpy as np
import pytest

from cantordim.errors import DomainError, ParameterDomainError
from cantordim.gauges import (Interpolated, LogReciprocal, Power, PowerLog, associated_function,
                              compare, compare_inverses, doubling_report, make_function,
                              sample_checks)
from cantordim.sequences import MiddleThirdBlocks, PowerLaw


def test_power_evaluate_and_inverse():
    gauge = Power(0.5)
    assert gauge(0.04) == pytest.approx(0.2)
    assert gauge.inverse(0.2) == pytest.approx(0.04)
    assert gauge.spec() == "power(0.5)"


def test_log_reciprocal_evaluate_and_inverse():
    gauge = LogReciprocal(1.0, 1.0)
    assert gauge(math.exp(-5)) == pytest.approx(0.2)
    assert gauge.inverse(0.2) == pytest.approx(math.exp(-5))
    with pytest.raises(DomainError):
        gauge(0.9)
    with pytest.raises(DomainError):
        gauge.inverse(10.0)


def test_power_log_inverse_by_bisection():
    gauge = PowerLog(0.5, 1.0)
    x = np.geomspace(1e-200, 0.01, 40)
    assert np.allclose(gauge.inverse(gauge(x)), x, rtol=1e-10)


def test_log_space_reaches_tiny_scales():
    gauge = LogReciprocal(1.0, 1.0)
    # h(e^-100000) = 1e-5 is representable although e^-100000 is not
    assert gauge.log_eval(-1e5) == pytest.approx(math.log(1e-5))
    assert gauge.log_inv(math.log(1e-5)) == pytest.approx(-1e5)


@pytest.mark.parametrize("kind,params", [
    ("power", {"exponent": 0.0}), ("power", {"exponent": 1.5}),
    ("logrec", {"order": -1.0}), ("logrec", {"domain": 2.0}),
    ("powerlog", {"exponent": 0.5}), ("power", {"s": 0.5}), ("wavelet", {}),
])
def test_make_function_rejects_bad_parameters(kind, params):
    with pytest.raises(ParameterDomainError):
        make_function(kind, **params)


@pytest.mark.parametrize("gauge", [Power(0.3), Power(1.0), LogReciprocal(2.0, 0.5),
                               PowerLog(0.7, 2.0)])
def test_sample_checks(gauge):
    out = sample_checks(gauge)
    assert out["increasing"] and out["to_zero"]
    assert out["roundtrip_err"] < 1e-9


def test_power_doubling_constants():
    for s in (0.3, 0.5, 1.0):
        rep = doubling_report(Power(s), "function")
        assert rep.holds
        assert rep.tau_estimate == pytest.approx(2 ** -s, abs=1e-12)


def test_log_reciprocal_is_doubling_but_inverse_is_not():
    gauge = LogReciprocal(1.0, 1.0)
    assert doubling_report(gauge, "function").holds
    rep = doubling_report(gauge, "inverse")
    assert not rep.holds and rep.slope > 0


def test_compare_strictly_ordered_powers():
    rep = compare(Power(0.6), Power(0.5))
    assert rep.forward.holds and not rep.backward.holds
    assert not rep.equivalent


def test_compare_constant_multiples():
    rep = compare(Power(0.5, 2.0), Power(0.5))
    assert rep.equivalent
    assert rep.forward.constant_estimate == pytest.approx(2.0)
    assert rep.backward.constant_estimate == pytest.approx(0.5)


def test_compare_inverses_of_equivalent_powers():
    assert compare_inverses(Power(0.5, 3.0), Power(0.5)).equivalent


def test_interpolated_is_exact_at_knots():
    lx = np.array([-10.0, -5.0, -1.0])
    ly = np.array([-4.0, -2.0, -0.5])
    gauge = Interpolated(lx, ly, label="knots")
    assert gauge.log_eval(lx) == pytest.approx(ly)
    assert gauge.log_inv(ly) == pytest.approx(lx)
    # end-slope extension below the first knot
    assert gauge.log_eval(-20.0) == pytest.approx(-8.0)


def test_associated_function_hits_its_knots():
    seq = PowerLaw(0.5)
    gauge = associated_function(seq, 10_000)
    lx, ly = gauge.log_x, gauge.log_y
    n = np.rint(np.exp(-ly)).astype(np.int64)
    assert np.allclose(lx, np.log(seq.tail(n) / n), rtol=1e-13)


def test_associated_function_of_middle_third():
    gauge = associated_function(MiddleThirdBlocks(), 2 ** 20)
    # probe only where knots exist; beyond them the interpolant extrapolates
    grid = np.geomspace(0.25, math.exp(gauge.log_x[0]), 48)
    assert compare(gauge, Power(math.log(2) / math.log(3)), grid).equivalent
