import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varlp.errors import ExponentBelowOne, InstanceFormatError, NonPositiveWeight
from varlp.halfline import (
    HalfLineInstance,
    discrepancies,
    h,
    image_norm,
    load_halfline,
    source_modular,
    source_norm,
    to_unit_interval,
    verify_isometry,
)
from varlp.modular import modular_weighted

REF = HalfLineInstance([1.0], [1.0], [2.0], [1.0])


def quad_modular(inst, n=20000):
    """Midpoint quadrature of the image modular in the source variable t."""
    total = 0.0
    for k, (a, b) in enumerate(zip(inst.breakpoints(), inst.breakpoints()[1:])):
        r, w, fv = inst.r[k], inst.w[k], inst.f[k]
        dt = (b - a) / n
        for j in range(n):
            t = a + (j + 0.5) * dt
            # value (1+t)^(2/r) f, measure ds = dt / (1+t)^2
            total += w * abs((1 + t) ** (2 / r) * fv) ** r * dt / (1 + t) ** 2
    return total


def test_image_layout():
    f, p, w = to_unit_interval(REF, 4)
    assert f.n == 5
    assert f.breakpoints[-2] == pytest.approx(0.5, abs=1e-15)
    assert f.values[-1] == 0.0
    assert f.values[0] == pytest.approx(1.125, rel=1e-15)
    assert list(f.values[:4]) == sorted(f.values[:4])
    assert set(p.values[:4]) == {2.0} and set(w.values[:4]) == {1.0}


def test_image_modular_converges():
    prev = None
    for n in (8, 64, 512):
        f, p, w = to_unit_interval(REF, n)
        err = abs(modular_weighted(f, p, w, 1.0) - 1.0)
        if prev is not None:
            assert err < prev
        prev = err
    assert prev < 1e-5
    assert quad_modular(REF, 2000) == pytest.approx(1.0, rel=1e-12)


def test_zero_instance():
    z = HalfLineInstance([2.0], [0.0], [3.0], [1.0])
    f, _, _ = to_unit_interval(z, 8)
    assert f.is_zero()
    rep = verify_isometry(z, 16)
    assert rep.notes["final_discrepancy"] == 0.0 and rep.passed


def test_reference_isometry():
    rep = verify_isometry(REF, 512)
    assert rep.passed
    disc = rep.notes["discrepancies"]
    assert rep.notes["refines"][0] == 8 and rep.notes["refines"][-1] == 512
    assert all(b < a for a, b in zip(disc, disc[1:]))
    assert disc[-1] < 1e-4
    assert max(rep.notes["ratios"]) <= 0.6


def test_far_tiny_piece():
    inst = HalfLineInstance([100.0, 0.001], [0.0, 1.0], [2.0, 2.0], [1.0, 1.0])
    assert verify_isometry(inst, 8).notes["final_discrepancy"] < 1e-8


def test_measure_correspondence():
    inst = HalfLineInstance([0.3, 2.0, 5.0], [1.0, 2.0, 0.5], [1.0, 3.0, 2.0], [1.0, 2.0, 0.5])
    f, p, w = to_unit_interval(inst, 16)
    image = math.fsum(f.lengths[:-1])
    assert abs(image - h(inst.t_max)) <= 1e-14
    assert p.values[:16] == (1.0,) * 16 and w.values[16:32] == (2.0,) * 16


def test_source_norm_unnormalised():
    # 4 * (1/lam)^2 = 1 on a source of length 4
    inst = HalfLineInstance([4.0], [1.0], [2.0], [1.0])
    assert source_norm(inst) == pytest.approx(2.0, abs=1e-12)
    assert source_modular(inst, 2.0) == pytest.approx(1.0, rel=1e-15)


def test_validation(tmp_path):
    with pytest.raises(ExponentBelowOne):
        HalfLineInstance([1.0], [1.0], [0.5], [1.0])
    with pytest.raises(NonPositiveWeight):
        HalfLineInstance([1.0], [1.0], [2.0], [0.0])
    with pytest.raises(ValueError):
        HalfLineInstance([0.0], [1.0], [2.0], [1.0])
    with pytest.raises(ValueError):
        to_unit_interval(REF, 0)
    path = tmp_path / "h.json"
    path.write_text(json.dumps({"pieces": [{"len": 3.0, "f": 1.0, "r": 2.0, "w": 0.5}]}))
    inst = load_halfline(str(path))
    assert inst.lengths == (3.0,) and inst.r == (2.0,) and inst.w == (0.5,)
    with pytest.raises(InstanceFormatError):
        load_halfline({"pieces": []})
    with pytest.raises(InstanceFormatError):
        load_halfline({"pieces": [{"f": 1.0}]})


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.1, 5.0), st.floats(1.0, 6.0), st.floats(0.2, 3.0))
def test_discrepancy_shrinks(length, fv, r, w):
    inst = HalfLineInstance([length], [fv], [r], [w])
    d = discrepancies(inst, [8, 16, 32])
    assert d[2] <= d[0] or d[0] < 1e-11
