"""Weighted instances on [0, inf) carried to [0, 1) by ``h(t) = 1 - 1/(1+t)``.

The image of ``f`` is ``(Sf)(h(t)) = (1+t)^(2/r(t)) f(t)`` with exponent
``r(t)`` and weight ``w'(t)`` transported unchanged.  Since the factor varies
inside a source piece, each piece is split into ``refine`` subpieces and the
factor is sampled at subpiece midpoints; the isometry holds in the limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ExponentAboveCap, ExponentBelowOne, InstanceFormatError, NonPositiveWeight
from .instances import read_json
from .luxemburg import DEFAULT_TOL, luxemburg_raw, norm_weighted
from .modular import modular_raw
from .report import CheckReport
from .stepfn import P_MAX, ExponentProfile, StepFunction, WeightProfile

RATIO_LIMIT = 0.6
NOISE_FLOOR = 1e-11


@dataclass(frozen=True)
class HalfLineInstance:
    lengths: tuple[float, ...]
    f: tuple[float, ...]
    r: tuple[float, ...]
    w: tuple[float, ...]

    def __post_init__(self):
        for name in ("lengths", "f", "r", "w"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        n = len(self.lengths)
        if n == 0 or not len(self.f) == len(self.r) == len(self.w) == n:
            raise ValueError("lengths, f, r and w must be non-empty and of equal length")
        if any(not (ln > 0 and math.isfinite(ln)) for ln in self.lengths):
            raise ValueError("half-line piece lengths must be positive and finite")
        if min(self.r) < 1:
            raise ExponentBelowOne("exponents must be >= 1")
        if max(self.r) > P_MAX:
            raise ExponentAboveCap(f"exponents must be <= {P_MAX:g}")
        if min(self.w) <= 0:
            raise NonPositiveWeight("weights must be > 0")

    @property
    def t_max(self) -> float:
        return math.fsum(self.lengths)

    def breakpoints(self) -> list[float]:
        out = [0.0]
        for ln in self.lengths:
            out.append(out[-1] + ln)
        return out


def h(t: float) -> float:
    # t/(1+t) equals 1 - 1/(1+t) without the cancellation near t = 0
    return t / (1.0 + t)


def load_halfline(src) -> HalfLineInstance:
    data = read_json(src)
    pieces = data.get("pieces") if isinstance(data, dict) else None
    if not pieces:
        raise InstanceFormatError('half-line instance needs a non-empty "pieces" list')
    try:
        return HalfLineInstance(
            [pc["len"] for pc in pieces],
            [pc["f"] for pc in pieces],
            [pc.get("p", pc.get("r", 1.0)) for pc in pieces],
            [pc.get("w", 1.0) for pc in pieces],
        )
    except (KeyError, TypeError) as exc:
        raise InstanceFormatError(f"bad half-line piece: {exc}") from None


def to_unit_interval(inst: HalfLineInstance, refine: int):
    """Image ``(f, p, w)`` on [0, 1]; beyond ``h(T_max)`` the image is zero."""
    if refine < 1:
        raise ValueError("refine must be >= 1")
    bp = [0.0]
    fv, pv, wv = [], [], []
    src = inst.breakpoints()
    for k in range(len(inst.lengths)):
        a, b = src[k], src[k + 1]
        for j in range(refine):
            ta = a + (b - a) * j / refine
            tb = b if j == refine - 1 else a + (b - a) * (j + 1) / refine
            tm = 0.5 * (ta + tb)
            bp.append(h(tb))
            fv.append((1.0 + tm) ** (2.0 / inst.r[k]) * inst.f[k])
            pv.append(inst.r[k])
            wv.append(inst.w[k])
    if bp[-1] < 1.0:
        bp.append(1.0)
        fv.append(0.0)
        pv.append(1.0)
        wv.append(1.0)
    else:
        bp[-1] = 1.0
    return StepFunction(bp, fv), ExponentProfile(bp, pv), WeightProfile(bp, wv)


def source_modular(inst: HalfLineInstance, lam: float) -> float:
    return modular_raw(inst.lengths, inst.f, inst.r, inst.w, lam)


def source_norm(inst: HalfLineInstance, tol: float = DEFAULT_TOL) -> float:
    """Weighted Luxemburg norm on the source grid with the true piece lengths."""
    return luxemburg_raw(inst.lengths, inst.f, inst.r, inst.w, tol, "weighted").value


def image_norm(inst: HalfLineInstance, refine: int, tol: float = DEFAULT_TOL) -> float:
    f, p, w = to_unit_interval(inst, refine)
    return norm_weighted(f, p, w, tol).value


def discrepancies(inst: HalfLineInstance, refines: Sequence[int], tol: float = DEFAULT_TOL) -> list[float]:
    src = source_norm(inst, tol)
    return [abs(image_norm(inst, n, tol) - src) for n in refines]


def verify_isometry(inst: HalfLineInstance, refine: int, start: int = 8,
                    ratio_limit: float = RATIO_LIMIT) -> CheckReport:
    """Compare source and image norms while doubling refinement from ``start`` up to ``refine``.

    Each doubling must cut the discrepancy by ``ratio_limit`` unless it is
    already below the bisection noise floor.
    """
    if refine < 1:
        raise ValueError("refine must be >= 1")
    refines = [refine]
    n = refine
    while n // 2 >= start and n % 2 == 0:
        n //= 2
        refines.insert(0, n)
    src = source_norm(inst)
    disc = [abs(image_norm(inst, k) - src) for k in refines]
    report = CheckReport("P52", slack=0.0, trials=len(refines))
    report.notes.update({
        "source_norm": src,
        "refines": refines,
        "discrepancies": disc,
        "final_discrepancy": disc[-1],
    })
    ratios = []
    for k in range(1, len(disc)):
        if disc[k - 1] <= NOISE_FLOOR:
            continue
        ratio = disc[k] / disc[k - 1]
        ratios.append(ratio)
        report.record(ratio, ratio_limit, k, f"ratio {refines[k - 1]}->{refines[k]}")
    report.notes["ratios"] = ratios
    return report
