"""Power modulars ``sum_i len_i * w_i * (|f_i| / lam)^{p_i}`` and their lambda-derivative.

The Nakano modular uses ``w = 1/p``, the Musielak-Orlicz one ``w = 1``.  All
sums go through ``math.fsum``, which makes them independent of piece order.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import ModularOverflow, NonFinite, NonPositiveLambda
from .stepfn import StepFunction, WeightProfile, common_refinement

_LOG_SWITCH = 700.0
_EXP_MAX = 709.0


def prepare(lengths, fvals, pvals, wvals, scale_by_p=False):
    """Precompute per-piece constants; zero pieces drop out (``0^p = 0``)."""
    out = []
    for ln, f, p, w in zip(lengths, fvals, pvals, wvals):
        af = abs(f)
        if af == 0.0 or ln == 0.0:
            continue
        c = ln * (w * p if scale_by_p else w)
        out.append((af, math.log(af), c, math.log(c), p))
    return out


def evaluate(prepared, lam: float) -> float:
    """Sum of prepared terms at ``lam``; ``inf`` when it leaves the double range."""
    log_lam = math.log(lam)
    terms = []
    for af, log_af, c, log_c, p in prepared:
        plx = p * (log_af - log_lam)
        e = log_c + plx
        if abs(plx) > _LOG_SWITCH or abs(e) > _LOG_SWITCH:
            # log domain only where the direct power would leave the double range
            if e > _EXP_MAX:
                return math.inf
            terms.append(math.exp(e))
        else:
            terms.append(c * (af / lam) ** p)
    try:
        return math.fsum(terms)
    except OverflowError:
        return math.inf


def modular_raw(lengths: Sequence[float], fvals, pvals, wvals, lam: float) -> float:
    """Weighted modular on raw piece data; ``inf`` when it leaves the double range."""
    return evaluate(prepare(lengths, fvals, pvals, wvals), lam)


def derivative_raw(lengths, fvals, pvals, wvals, lam: float) -> float:
    return -evaluate(prepare(lengths, fvals, pvals, wvals, scale_by_p=True), lam) / lam


def aligned(f: StepFunction, p: StepFunction, w: StepFunction | None = None):
    """Refine ``f``, ``p`` (and ``w``) to one grid; return lengths and value lists."""
    f, p = common_refinement(f, p)
    if w is None:
        return list(f.lengths), list(f.values), list(p.values), None
    f, w = common_refinement(f, w)
    p, _ = common_refinement(p, w)
    return list(f.lengths), list(f.values), list(p.values), list(w.values)


def nakano_weights(pvals):
    return [1.0 / p for p in pvals]


def _check_lambda(lam):
    if math.isnan(lam) or lam <= 0:
        raise NonPositiveLambda(f"lambda must be > 0, got {lam}")
    if math.isinf(lam):
        raise NonFinite("lambda must be finite")


def _checked(value, what):
    if math.isinf(value):
        raise ModularOverflow(f"{what} exceeds the double range; rescale lambda")
    return value


def modular_weighted(f: StepFunction, p: StepFunction, w: WeightProfile, lam: float) -> float:
    _check_lambda(lam)
    if not isinstance(w, WeightProfile):
        w = WeightProfile(w.breakpoints, w.values)
    lengths, fv, pv, wv = aligned(f, p, w)
    return _checked(modular_raw(lengths, fv, pv, wv, lam), "modular")


def modular_nakano(f: StepFunction, p: StepFunction, lam: float) -> float:
    _check_lambda(lam)
    lengths, fv, pv, _ = aligned(f, p)
    return _checked(modular_raw(lengths, fv, pv, nakano_weights(pv), lam), "modular")


def modular_mo(f: StepFunction, p: StepFunction, lam: float) -> float:
    _check_lambda(lam)
    lengths, fv, pv, _ = aligned(f, p)
    return _checked(modular_raw(lengths, fv, pv, [1.0] * len(pv), lam), "modular")


def modular_lambda_derivative(f: StepFunction, p: StepFunction, w: WeightProfile, lam: float) -> float:
    """Analytic ``d/dlam`` of the weighted modular: ``-(1/lam) sum len w p (|f|/lam)^p``."""
    _check_lambda(lam)
    if not isinstance(w, WeightProfile):
        w = WeightProfile(w.breakpoints, w.values)
    lengths, fv, pv, wv = aligned(f, p, w)
    d = derivative_raw(lengths, fv, pv, wv, lam)
    if math.isinf(d):
        raise ModularOverflow("derivative exceeds the double range")
    return d


def nakano_weight_profile(p: StepFunction) -> WeightProfile:
    return WeightProfile(p.breakpoints, nakano_weights(p.values))
