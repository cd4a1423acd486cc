"""Luxemburg norms ``inf{lam > 0 : modular(f / lam) <= 1}`` by bracketed bisection."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .errors import BracketError, ToleranceTooSmall
from .modular import aligned, evaluate, nakano_weights, prepare
from .stepfn import StepFunction, WeightProfile

DEFAULT_TOL = 1e-12
MIN_TOL = 1e-14
MAX_DOUBLINGS = 60
_SCALE_LO, _SCALE_HI = 1e-100, 1e100


@dataclass(frozen=True)
class NormResult:
    value: float
    method: str
    bracket_width: float
    iterations: int

    def __float__(self):
        return self.value


def luxemburg_raw(lengths, fvals, pvals, wvals, tol: float = DEFAULT_TOL, method: str = "weighted") -> NormResult:
    """Solve ``modular(lam) = 1`` on raw piece data.

    Bisection stops once the bracket is below ``tol`` in both absolute and
    relative terms and the modular at the upper end is within ``10 tol`` of
    one, or when the bracket can no longer be split in double precision.
    The upper end is returned, so ``modular(value) <= 1`` always holds.
    """
    if not tol >= MIN_TOL:
        raise ToleranceTooSmall(f"tol={tol} is below {MIN_TOL}")
    support = [abs(f) for f, ln in zip(fvals, lengths) if f != 0.0 and ln > 0.0]
    if not support:
        return NormResult(0.0, method, 0.0, 0)

    m = max(support)
    if not _SCALE_LO <= m <= _SCALE_HI:
        # homogeneity: solve for f / m so the bracket stays inside the normal range
        res = luxemburg_raw(lengths, [f / m for f in fvals], pvals, wvals, tol, method)
        value = m * res.value
        if value < sys.float_info.min:
            # subnormal product: round up so the value stays an upper bound
            value = math.nextafter(value, math.inf)
        return NormResult(value, method, m * res.bracket_width, res.iterations)

    prepared = prepare(lengths, fvals, pvals, wvals)

    def mod(lam):
        return evaluate(prepared, lam)

    lo, hi = m / (2.0 * math.e), 2.0 * math.e * m
    m_hi = mod(hi)
    k = 0
    while m_hi > 1.0:
        lo, hi = hi, 2.0 * hi
        m_hi = mod(hi)
        k += 1
        if k > MAX_DOUBLINGS:
            raise BracketError("could not find lambda with modular <= 1")
    k = 0
    while mod(lo) < 1.0:
        hi, m_hi = lo, mod(lo)
        lo = 0.5 * lo
        k += 1
        if k > MAX_DOUBLINGS:
            raise BracketError("could not find lambda with modular >= 1")

    iterations = 0
    floor = 1.0 - 10.0 * tol
    while True:
        if hi - lo <= tol * min(1.0, hi) and m_hi >= floor:
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        iterations += 1
        m_mid = mod(mid)
        if m_mid <= 1.0:
            hi, m_hi = mid, m_mid
        else:
            lo = mid
    return NormResult(hi, method, hi - lo, iterations)


def norm_weighted(f: StepFunction, p: StepFunction, w: WeightProfile, tol: float = DEFAULT_TOL) -> NormResult:
    if not isinstance(w, WeightProfile):
        w = WeightProfile(w.breakpoints, w.values)
    lengths, fv, pv, wv = aligned(f, p, w)
    return luxemburg_raw(lengths, fv, pv, wv, tol, "weighted")


def norm_nakano(f: StepFunction, p: StepFunction, tol: float = DEFAULT_TOL) -> NormResult:
    lengths, fv, pv, _ = aligned(f, p)
    return luxemburg_raw(lengths, fv, pv, nakano_weights(pv), tol, "nakano")


def norm_mo(f: StepFunction, p: StepFunction, tol: float = DEFAULT_TOL) -> NormResult:
    lengths, fv, pv, _ = aligned(f, p)
    return luxemburg_raw(lengths, fv, pv, [1.0] * len(pv), tol, "mo")
