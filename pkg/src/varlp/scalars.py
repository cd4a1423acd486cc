"""The l^p folding operation ``x [+]_p y = (x^p + y^p)^(1/p)`` and the constants a, b_p."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ExponentBelowOne, ExponentOrderViolation, LengthMismatch, NegativeInput

INF = math.inf
_LOG_DOMAIN_P = 50.0


def boxplus(x: float, y: float, p: float) -> float:
    """l^p combination of two non-negative numbers; ``p = inf`` gives ``max``."""
    if x < 0 or y < 0:
        raise NegativeInput(f"boxplus needs non-negative arguments, got {x}, {y}")
    if p < 1:
        raise ExponentBelowOne(f"exponent {p} < 1")
    return _boxplus(x, y, p)


def _boxplus(x: float, y: float, p: float) -> float:
    # unchecked kernel, called in the hot loops
    if p == 1.0:
        return x + y
    m = x if x >= y else y
    if m == 0.0:
        return 0.0
    if p == INF:
        return m
    ratio = (y if x >= y else x) / m
    if ratio == 0.0:
        return m
    if p >= _LOG_DOMAIN_P:
        # c^p overflows once p*ln(c) > 709; only the ratio is raised to p here
        return m * math.exp(math.log1p(math.exp(p * math.log(ratio))) / p)
    return m * (1.0 + ratio**p) ** (1.0 / p)


@dataclass(frozen=True)
class FoldOrder:
    """Summand permutation and the exponent used at each left-fold step."""

    permutation: tuple[int, ...]
    exponents: tuple[float, ...]

    def __post_init__(self):
        perm = tuple(int(i) for i in self.permutation)
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "exponents", tuple(float(e) for e in self.exponents))
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"{perm} is not a permutation")
        if len(self.exponents) != max(len(perm) - 1, 0):
            raise LengthMismatch("need one exponent per fold step")
        if any(e < 1 for e in self.exponents):
            raise ExponentBelowOne("fold exponents must be >= 1")


def fold(values: Sequence[float], exponents: Sequence[float], order: Sequence[int] | None = None) -> float:
    """Left fold ``((v1 [+]_{e1} v2) [+]_{e2} v3) ...``, optionally after permuting ``values``."""
    if len(values) == 0:
        return 0.0
    if len(exponents) != len(values) - 1:
        raise LengthMismatch(
            f"{len(values)} values need {len(values) - 1} exponents, got {len(exponents)}"
        )
    if order is not None:
        if sorted(order) != list(range(len(values))):
            raise ValueError(f"{list(order)} is not a permutation of the summands")
        values = [values[i] for i in order]
    if any(v < 0 for v in values):
        raise NegativeInput("fold needs non-negative summands")
    if any(e < 1 for e in exponents):
        raise ExponentBelowOne("fold exponents must be >= 1")
    acc = float(values[0])
    for v, e in zip(values[1:], exponents):
        acc = _boxplus(acc, float(v), float(e))
    return acc


def fold_with(values: Sequence[float], order: FoldOrder) -> float:
    return fold(values, order.exponents, order.permutation)


def lp_reduce(x: np.ndarray, p: float, axis: int = 0) -> np.ndarray:
    """l^p norm along ``axis``, scaled by the axis maximum so large p cannot overflow."""
    x = np.asarray(x, dtype=float)
    m = np.max(x, axis=axis, keepdims=True)
    if p == INF:
        return np.squeeze(m, axis=axis)
    safe = np.where(m > 0, m, 1.0)
    s = np.sum((x / safe) ** p, axis=axis, keepdims=True)
    out = np.where(m > 0, safe * s ** (1.0 / p), 0.0)
    return np.squeeze(out, axis=axis)


def iterated_reduce(tensor, axis_exponents: Sequence[float], order: Sequence[int]) -> float:
    """Reduce every axis of ``tensor``, innermost first in ``order``, each with its own exponent."""
    t = np.asarray(tensor, dtype=float)
    if t.ndim != len(axis_exponents):
        raise LengthMismatch(f"tensor has {t.ndim} axes, got {len(axis_exponents)} exponents")
    t = np.transpose(t, axes=list(order))
    for ax in order:
        t = lp_reduce(t, axis_exponents[ax], axis=0)
    return float(t)


def nested_fold_compare(tensor, axis_exponents: Sequence[float], k: int) -> tuple[float, float]:
    """Fold ``tensor`` with axis ``k`` reduced before axis ``k+1`` (lhs) and after it (rhs).

    With ``r = axis_exponents[k] <= s = axis_exponents[k+1]`` the lhs never exceeds the rhs.
    """
    t = np.asarray(tensor, dtype=float)
    if np.any(t < 0):
        raise NegativeInput("tensor entries must be non-negative")
    if not 0 <= k < t.ndim - 1:
        raise IndexError(f"axis pair ({k}, {k + 1}) outside a {t.ndim}-axis tensor")
    r, s = axis_exponents[k], axis_exponents[k + 1]
    if r > s:
        raise ExponentOrderViolation(f"need r <= s, got r={r}, s={s}")
    if any(e < 1 for e in axis_exponents):
        raise ExponentBelowOne("axis exponents must be >= 1")
    natural = list(range(t.ndim))
    swapped = natural[:k] + [k + 1, k] + natural[k + 2 :]
    return iterated_reduce(t, axis_exponents, natural), iterated_reduce(t, axis_exponents, swapped)


def _bisect(g: Callable[[float], float], lo: float, hi: float, width: float) -> float:
    """Root of ``g`` on ``[lo, hi]`` where ``g(lo) <= 0 <= g(hi)``."""
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _polish(g, dg, x: float, lo: float, hi: float, steps: int = 2) -> float:
    for _ in range(steps):
        d = dg(x)
        if d == 0.0:
            break
        y = x - g(x) / d
        if not lo <= y <= hi or abs(g(y)) > abs(g(x)):
            break
        x = y
    return x


_lock = threading.Lock()
_cache: dict[str, float] = {}


def constant_a() -> float:
    """The root of ``a ln a = 1`` (equivalently ``a^a = e``), about 1.763."""
    with _lock:
        if "a" not in _cache:
            g = lambda a: a * math.log(a) - 1.0
            dg = lambda a: math.log(a) + 1.0
            a = _bisect(g, 1.0, 2.0, 1e-15)
            _cache["a"] = _polish(g, dg, a, 1.0, 2.0)
        return _cache["a"]


def constant_bp(p: float) -> float:
    """The root in (1, 2) of ``b + b^(-p) = 2``; 1 at ``p = 1`` and 2 at ``p = inf``."""
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ExponentBelowOne(f"exponent {p} < 1")
    if p == 1.0:
        return 1.0
    if p == INF:
        return 2.0
    g = lambda b: b + b ** (-p) - 2.0
    dg = lambda b: 1.0 - p * b ** (-p - 1.0)
    # g(1) = 0 is the trivial root; g is negative just right of its minimiser
    lo = p ** (1.0 / (p + 1.0))
    b = _bisect(g, lo, 2.0, 1e-15)
    return _polish(g, dg, b, lo, 2.0)


def equivalence_constant() -> float:
    """``2 (1 + a e)``, the projection-band decomposition constant."""
    return 2.0 * (1.0 + constant_a() * math.e)
