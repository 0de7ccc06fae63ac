from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqauction.lattice import Node
from seqauction.valuations import (
    Instance,
    Role,
    Valuation,
    as_fraction,
    real_cumulative,
    real_incremental,
    real_integral,
)

from conftest import valuations


def test_as_fraction_accepts_exact_inputs():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(" 7 ") == 7
    assert as_fraction(Fraction(1, 3)) == Fraction(1, 3)


@pytest.mark.parametrize("bad", [0.5, True, "0.5", "1e3", None, [1]])
def test_as_fraction_rejects_inexact(bad):
    with pytest.raises((TypeError, ValueError)):
        as_fraction(bad)


def test_valuation_rejects_increase_and_names_index():
    with pytest.raises(ValueError, match=r"v\(3\)"):
        Valuation.of([3, 2, 5])


def test_valuation_rejects_negative():
    with pytest.raises(ValueError, match=r"v\(2\).*negative"):
        Valuation.of([1, -1])


def test_valuation_rejects_empty():
    with pytest.raises(ValueError):
        Valuation.of([])


def test_instance_requires_equal_lengths():
    with pytest.raises(ValueError, match="lengths differ"):
        Instance.of([1, 1], [1])


def test_index_shift_at_node():
    inst = Instance.of([10, 9, 4], [8, 5, 1])
    x = Node(1, 2, 3)
    assert inst.v(1, 1, x) == 9
    assert inst.v(1, 2, x) == 4
    assert inst.V(1, 2, x) == 13
    with pytest.raises(IndexError):
        inst.v(2, 2, x)
    with pytest.raises(IndexError):
        inst.V(2, 2, x)


@given(st.integers(1, 6).flatmap(lambda T: valuations(T)))
def test_cumulative_is_prefix_sum(incs):
    v = Valuation.of(incs)
    for k in range(v.T + 1):
        assert v.total(k) == sum(incs[:k], Fraction(0))


def test_real_extension_conventions():
    inst = Instance.of([5, 3, 1], [0, 0, 0])
    v, x = inst.v1, inst.root
    assert real_incremental(v, 1, Role.MONOPSONIST, 0, x) == 5
    assert real_incremental(v, 1, Role.MONOPSONIST, 1, x) == 5
    assert real_incremental(v, 1, Role.MONOPSONIST, Fraction(5, 4), x) == 3
    assert real_incremental(v, 1, Role.OPPONENT, 0, x) == 5
    assert real_incremental(v, 1, Role.OPPONENT, 1, x) == 3
    assert real_incremental(v, 1, Role.OPPONENT, 3, x) == 1
    with pytest.raises(ValueError):
        real_incremental(v, 1, Role.OPPONENT, Fraction(13, 4), x)


@given(st.integers(1, 5).flatmap(lambda T: valuations(T)), st.data())
def test_real_integral_matches_unit_sums(incs, data):
    inst = Instance.of(incs, [0] * len(incs))
    x = inst.root
    T = len(incs)
    k = data.draw(st.integers(0, T))
    for role in Role:
        assert real_cumulative(inst.v1, 1, role, k, x) == inst.V(1, k, x)
    lo = Fraction(data.draw(st.integers(0, 4 * T)), 4)
    hi = Fraction(data.draw(st.integers(0, 4 * T)), 4)
    lo, hi = min(lo, hi), max(lo, hi)
    # midpoint rule on a 1/8 grid is exact for a step function with integer breakpoints
    n = int((hi - lo) * 8)
    mid = sum((real_incremental(inst.v1, 1, Role.MONOPSONIST, lo + Fraction(2 * s + 1, 16), x)
               for s in range(n)), Fraction(0)) / 8
    assert real_integral(inst.v1, 1, Role.MONOPSONIST, lo, hi, x) == mid
    assert real_integral(inst.v1, 1, Role.OPPONENT, lo, hi, x) == mid
