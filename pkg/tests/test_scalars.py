import math
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varlp.errors import ExponentBelowOne, ExponentOrderViolation, LengthMismatch, NegativeInput
from varlp.scalars import (
    FoldOrder,
    boxplus,
    constant_a,
    constant_bp,
    equivalence_constant,
    fold,
    fold_with,
    iterated_reduce,
    nested_fold_compare,
)

from conftest import dec_pow

nonneg = st.floats(0.0, 1e6)
expo = st.floats(1.0, 1e4)


def bisect_oracle(g, lo, hi, n=200):
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_boxplus_examples():
    assert boxplus(3.0, 4.0, 2.0) == 5.0
    assert boxplus(1.25, 2.5, 1.0) == 3.75
    assert boxplus(2.0, 7.0, math.inf) == 7.0
    with pytest.raises(NegativeInput):
        boxplus(-1.0, 1.0, 2.0)
    with pytest.raises(ExponentBelowOne):
        boxplus(1.0, 1.0, 0.5)


def test_boxplus_large_exponent_does_not_overflow():
    assert boxplus(1e300, 1e300, 1e6) == pytest.approx(1e300 * 2.0 ** 1e-6, rel=1e-15)
    assert boxplus(3.0, 2.0, 1e6) == pytest.approx(3.0, rel=1e-15)


def test_fold_examples():
    assert fold([1.0, 1.0], [2.0]) == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert fold([1.0, 2.0, 3.5], [1.0, 1.0]) == 6.5
    assert fold([0.5, 0.5, 0.5], [2.0, 1.0]) == pytest.approx(math.sqrt(0.5) + 0.5, rel=1e-15)
    with pytest.raises(LengthMismatch):
        fold([1.0, 2.0], [2.0, 2.0])


def test_fold_with_order():
    order = FoldOrder((2, 0, 1), (1.0, 2.0))
    # ((c + a) [+]_2 b)
    assert fold_with([1.0, 3.0, 3.0], order) == pytest.approx(5.0, rel=1e-15)


def test_nested_fold_compare_examples():
    lhs, rhs = nested_fold_compare([[1.0, 0.0], [0.0, 1.0]], [1.0, 2.0], 0)
    assert lhs == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert rhs == pytest.approx(2.0, rel=1e-15)
    t = np.zeros((2, 3, 2))
    t[1, 2, 0] = 4.5
    lhs, rhs = nested_fold_compare(t, [1.5, 3.0, 7.0], 1)
    assert lhs == rhs == 4.5
    with pytest.raises(ExponentOrderViolation):
        nested_fold_compare([[1.0, 2.0]], [3.0, 2.0], 0)


@given(st.lists(st.floats(0.0, 10.0), min_size=9, max_size=9), st.floats(1.0, 50.0))
def test_nested_fold_equal_exponents_commute(vals, r):
    t = np.array(vals).reshape(3, 3)
    lhs, rhs = nested_fold_compare(t, [r, r], 0)
    assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-300)


def test_iterated_reduce_matches_brute_force():
    rng = np.random.default_rng(3)
    t = rng.uniform(0, 5, (2, 3, 2))
    exps = [1.5, 2.0, 4.0]
    # brute force: reduce axis 0 then 1 then 2 with explicit sums
    inner = (t ** 1.5).sum(axis=0) ** (1 / 1.5)
    mid = (inner ** 2.0).sum(axis=0) ** 0.5
    outer = (mid ** 4.0).sum() ** 0.25
    assert iterated_reduce(t, exps, [0, 1, 2]) == pytest.approx(outer, rel=1e-14)


def test_constant_a():
    a = constant_a()
    assert abs(a * math.log(a) - 1.0) <= 1e-14
    assert round(a, 2) == 1.76
    assert abs(math.exp(a * math.log(a)) - math.e) <= 1e-13
    assert 1.7 ** 1.7 < math.e < 1.8 ** 1.8
    assert a == pytest.approx(bisect_oracle(lambda x: x * math.log(x) - 1.0, 1.7, 1.8), abs=1e-15)


def test_constant_bp_examples():
    assert constant_bp(1.0) == 1.0
    assert constant_bp(math.inf) == 2.0
    assert abs(constant_bp(2.0) - (1 + math.sqrt(5)) / 2) <= 1e-12
    oracle = bisect_oracle(lambda b: b + b ** -2.0 - 2.0, 1.2, 2.0)
    assert constant_bp(2.0) == pytest.approx(oracle, abs=1e-14)
    b100 = constant_bp(100.0)
    # b_100 = 2 - 2^-100 (1 + ...) rounds to 2.0 in double precision
    assert 1.99 < b100 <= 2.0
    with pytest.raises(ExponentBelowOne):
        constant_bp(0.9)


def test_b100_decimal_oracle_is_below_two():
    # the open-interval statement holds in exact arithmetic
    b = Decimal(2)
    for _ in range(5):
        b = 2 - b ** -100
    assert Decimal("1.99") < b < 2
    assert float(b) == constant_bp(100.0)


@given(st.floats(1.0001, 40.0))
def test_constant_bp_residual_and_monotone(p):
    b = constant_bp(p)
    assert abs(b + b ** -p - 2.0) <= 1e-14
    assert 1.0 < b < 2.0
    assert constant_bp(p * 1.01) > b


@given(st.floats(1.0, 1e4))
def test_constant_bp_continuity(p):
    d = 1e-6 * p
    assert abs(constant_bp(p + d) - constant_bp(p)) <= 1e-5


def test_equivalence_constant():
    assert equivalence_constant() == pytest.approx(2 * (1 + constant_a() * math.e), rel=1e-15)
    assert 11.58 < equivalence_constant() < 12.0


@given(nonneg, nonneg, expo)
def test_boxplus_bounds_and_commutative(x, y, p):
    v = boxplus(x, y, p)
    assert v == boxplus(y, x, p)
    assert max(x, y) <= v * (1 + 1e-15)
    assert v <= (x + y) * (1 + 1e-15)


@given(nonneg, nonneg, st.floats(1.0, 200.0))
def test_boxplus_matches_decimal_oracle(x, y, p):
    want = (dec_pow(x, p) + dec_pow(y, p))
    want = float((want.ln() / Decimal(repr(p))).exp()) if want > 0 else 0.0
    assert boxplus(x, y, p) == pytest.approx(want, rel=1e-13)


@given(nonneg, nonneg, nonneg, expo)
def test_boxplus_associative(x, y, z, p):
    assert boxplus(boxplus(x, y, p), z, p) == pytest.approx(boxplus(x, boxplus(y, z, p), p), rel=1e-13)


@given(nonneg, nonneg, expo, st.floats(0.0, 1e3))
def test_boxplus_homogeneous(x, y, p, lam):
    assert boxplus(lam * x, lam * y, p) == pytest.approx(lam * boxplus(x, y, p), rel=1e-13, abs=1e-300)


@settings(max_examples=300)
@given(nonneg, nonneg, nonneg, st.floats(1.0, 100.0), st.floats(1.0, 100.0))
def test_power_mean_orderings(a, b, c, p, r):
    p, r = min(p, r), max(p, r)
    assert boxplus(a, b, r) <= boxplus(a, b, p) * (1 + 1e-13)
    assert boxplus(a, boxplus(b, c, p), r) <= boxplus(boxplus(a, b, r), c, p) * (1 + 1e-13)


@given(st.floats(0.0, 10.0), st.floats(0.0, 10.0), st.floats(0.0, 5.0), expo)
def test_boxplus_monotone(x, y, dx, p):
    assert boxplus(x, y, p) <= boxplus(x + dx, y, p) * (1 + 1e-15)
