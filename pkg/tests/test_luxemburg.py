import math
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varlp.errors import ToleranceTooSmall
from varlp.luxemburg import luxemburg_raw, norm_mo, norm_nakano, norm_weighted
from varlp.modular import aligned, modular_mo, modular_nakano, nakano_weight_profile, nakano_weights
from varlp.scalars import constant_a
from varlp.stepfn import ExponentProfile, StepFunction, WeightProfile

from conftest import bisect_norm, instances

ONE = StepFunction.constant(1.0)


def test_nakano_golden(two_piece):
    f, p = two_piece
    assert norm_nakano(ONE, ExponentProfile.constant(2.0)).value == pytest.approx(2 ** -0.5, abs=1e-12)
    res = norm_nakano(f, p)
    assert abs(res.value - (1 + math.sqrt(5)) / 4) <= 1e-10
    assert res.method == "nakano" and res.bracket_width <= 1e-12
    assert norm_nakano(StepFunction.constant(0.0), p).value == 0.0


def test_nakano_closed_form_constant_exponent():
    # (1/p) lam^-p = 1 gives lam = p^(-1/p)
    for p0 in (1.0, 1.5, 3.0, 40.0):
        v = norm_nakano(ONE, ExponentProfile.constant(p0)).value
        assert v == pytest.approx(p0 ** (-1 / p0), abs=1e-12)


def test_mo_examples(two_piece):
    f, p = two_piece
    assert norm_mo(f, p).value == pytest.approx(1.0, abs=1e-12)
    assert norm_mo(StepFunction.constant(3.5), ExponentProfile.constant(4.0)).value == pytest.approx(3.5, rel=1e-12)
    nak, mo = norm_nakano(f, p).value, norm_mo(f, p).value
    assert mo / constant_a() <= nak <= mo


def test_weighted_examples(two_piece):
    f, p = two_piece
    w, n = norm_weighted(f, p, nakano_weight_profile(p)), norm_nakano(f, p)
    assert (w.value, w.bracket_width, w.iterations) == (n.value, n.bracket_width, n.iterations)
    assert norm_weighted(f, p, WeightProfile.constant(1.0)).value == norm_mo(f, p).value
    v = norm_weighted(ONE, ExponentProfile.constant(2.0), WeightProfile.constant(4.0)).value
    assert v == pytest.approx(2.0, abs=1e-12)


def test_tolerance_floor():
    with pytest.raises(ToleranceTooSmall):
        norm_nakano(ONE, ExponentProfile.constant(2.0), tol=1e-15)


def test_float_conversion():
    assert float(norm_mo(ONE, ExponentProfile.constant(3.0))) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(instances(max_pieces=4, p_max=30.0))
def test_nakano_matches_bisection_oracle(fp):
    f, p = fp
    lengths, fv, pv, _ = aligned(f, p)
    want = bisect_norm(lengths, fv, pv, nakano_weights(pv))
    assert norm_nakano(f, p).value == pytest.approx(want, rel=1e-11, abs=1e-12)


@given(instances())
def test_unit_modular_at_root(fp):
    f, p = fp
    if f.is_zero():
        return
    tol = 1e-12
    for norm, mod in ((norm_nakano, modular_nakano), (norm_mo, modular_mo)):
        lam = norm(f, p, tol).value
        m = mod(f, p, lam)
        if lam >= sys.float_info.min:
            assert 1 - 10 * tol <= m <= 1.0
        else:
            # subnormal norms carry too few bits to pin the modular near 1
            assert lam > 0 and m <= 1.0


def test_subnormal_norm_stays_positive_upper_bound():
    f = StepFunction.from_pieces([0.5, 0.5], [0.0, 5e-324])
    p = ExponentProfile.constant(1.0)
    lam = norm_mo(f, p).value
    # true norm 2.5e-324 is not representable; either neighbour above it is acceptable
    assert 0 < lam <= 1e-323 and modular_mo(f, p, lam) <= 1.0


@given(instances(signed=True), st.floats(-1e3, 1e3))
def test_absolute_homogeneity(fp, c):
    f, p = fp
    for norm in (norm_nakano, norm_mo):
        a = norm(f.scale(c), p).value
        assert a == pytest.approx(abs(c) * norm(f, p).value, rel=1e-10, abs=1e-300)


@given(instances(signed=True), st.data())
def test_triangle_inequality(fp, data):
    f, p = fp
    g = f.with_values(data.draw(st.lists(st.floats(-10, 10), min_size=f.n, max_size=f.n)))
    for norm in (norm_nakano, norm_mo):
        assert norm(f + g, p).value <= norm(f, p).value + norm(g, p).value + 1e-9


@given(instances())
def test_upper_bound_from_modular(fp):
    f, p = fp
    m = modular_nakano(f, p, 1.0)
    if 0 < m <= 1.0:
        assert norm_nakano(f, p).value <= m ** (1.0 / p.ess_sup) * (1 + 1e-12)


def test_luxemburg_raw_unnormalised_lengths():
    # total length 4: 4 * (1/lam)^2 = 1 gives lam = 2
    res = luxemburg_raw([1.0, 3.0], [1.0, 1.0], [2.0, 2.0], [1.0, 1.0])
    assert res.value == pytest.approx(2.0, abs=1e-12)


def test_huge_exponent_stays_finite():
    f = StepFunction([0.0, 0.5, 1.0], [3.0, 1.0])
    p = ExponentProfile([0.0, 0.5, 1.0], [1e6, 1.0])
    v = norm_nakano(f, p).value
    assert 0.5 < v <= 3.0 * (1 + 1e-5)
