import io
import math

import numpy as np
import pytest

from cantordim.cantor import (MAX_DEPTH, ball_mass, build, first_contained_generation,
                              five_interval_check, interval_length, measure_cdf,
                              write_intervals_csv)
from cantordim.errors import InsufficientDataError, ResourceError
from cantordim.sequences import Explicit, Geometric, MiddleThirdBlocks, PowerLaw


def test_middle_third_second_generation():
    approx = build(MiddleThirdBlocks(), 2)
    lefts, lengths = approx.intervals()
    assert lefts == pytest.approx([0, 2 / 9, 2 / 3, 8 / 9], abs=1e-15)
    assert lengths == pytest.approx([1 / 9] * 4, abs=1e-15)
    assert approx.right_end == pytest.approx(1.0)


def test_measure_cdf_and_ball_mass():
    approx = build(MiddleThirdBlocks(), 2)
    assert measure_cdf(approx, 1 / 9) == pytest.approx(0.25)
    assert measure_cdf(approx, 0.5) == pytest.approx(0.5)
    assert measure_cdf(approx, [-1.0, 2.0]).tolist() == [0.0, 1.0]
    assert ball_mass(approx, 0.5, 0.01) == 0.0
    with pytest.raises(ValueError):
        ball_mass(approx, 0.5, 0.0)


# node lengths from an mpmath oracle summing the subtree gaps directly
@pytest.mark.parametrize("seq,m,expected", [
    (Geometric(math.exp(-1)), 2, 0.16091002115529766),
    (Geometric(math.exp(-1)), 3, 0.053187244542586447),
    (PowerLaw(0.5), 2, 0.44188126365512602),
    (PowerLaw(0.5), 3, 0.20305280319310041),
])
def test_interval_length_matches_oracle(seq, m, expected):
    assert interval_length(seq, m) == pytest.approx(expected, rel=1e-12)


def test_root_equals_first_tail():
    for seq in (PowerLaw(0.5), Geometric(0.4), MiddleThirdBlocks()):
        assert interval_length(seq, 1) == pytest.approx(seq.tail(1), rel=1e-14)


@pytest.mark.parametrize("seq", [PowerLaw(0.5), Geometric(0.4), MiddleThirdBlocks(),
                                 Explicit([0.5, 0.25, 0.25, 0.1, 0.1, 0.05, 0.01])])
def test_generation_sums_plus_gaps_reproduce_the_root(seq):
    approx = build(seq, 10)
    total = approx.total_length
    for g in range(11):
        lengths = approx.intervals(g)[1]
        last = min(2 ** g - 1, seq.max_index or 2 ** g)
        gaps = seq.term(np.arange(1, last + 1)) if last else np.empty(0)
        assert math.fsum(lengths) + math.fsum(gaps) == pytest.approx(total, rel=1e-13)


def test_children_nest_inside_parents():
    approx = build(PowerLaw(0.5), 8)
    for g in range(8):
        lefts, lengths = approx.intervals(g)
        kids_l, kids_len = approx.intervals(g + 1)
        assert np.all(kids_l[0::2] == lefts)
        right = kids_l[1::2] + kids_len[1::2]
        assert np.allclose(right, lefts + lengths, rtol=1e-13)


def test_finite_support_builds_zero_leaves():
    approx = build(Explicit([0.5, 0.25, 0.25]), 3)
    assert approx.total_length == pytest.approx(1.0)
    assert np.count_nonzero(approx.leaf_length) == 0


def test_depth_limits():
    with pytest.raises(ResourceError):
        build(PowerLaw(0.5), MAX_DEPTH + 1)
    with pytest.raises(ValueError):
        build(PowerLaw(0.5), -1)
    with pytest.raises(InsufficientDataError):
        five_interval_check(build(PowerLaw(0.5), 0))


def test_first_contained_generation():
    approx = build(MiddleThirdBlocks(), 4)
    assert first_contained_generation(approx, 0.5, 0.6) == 0
    assert first_contained_generation(approx, 1 / 6, 1 / 6) == 1
    assert first_contained_generation(approx, 0.5, 1e-3) is None


def test_ball_check_is_seeded():
    approx = build(PowerLaw(0.5), 10)
    a = five_interval_check(approx, samples=50, seed=3)
    b = five_interval_check(approx, samples=50, seed=3)
    assert a == b and a.ok and a.worst_ratio <= 1


def test_csv_dump():
    buf = io.StringIO()
    write_intervals_csv(build(MiddleThirdBlocks(), 1), buf)
    rows = buf.getvalue().splitlines()
    assert rows[0] == "generation,heap_index,left,length"
    assert rows[1].startswith("1,2,0,0.33333")
    assert len(rows) == 3
