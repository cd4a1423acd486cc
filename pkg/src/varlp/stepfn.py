"""Piecewise-constant functions on [0, 1].

A step function is a breakpoint list ``0 = t_0 <= t_1 <= ... <= t_n = 1`` and
one value per piece ``[t_{i-1}, t_i)``.  All norm routines in this package take
absolute values internally, so values are stored signed.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from itertools import accumulate
from typing import Callable, Iterable, Sequence

from .errors import (
    EmptySet,
    ExponentAboveCap,
    ExponentBelowOne,
    IndexOutOfRange,
    NonFinite,
    NonPositiveWeight,
    NonUnitDomain,
)

MIN_PIECE = 1e-12
P_MAX = 1e6

PieceSet = frozenset  # set of piece indices on a shared grid


@dataclass(frozen=True)
class StepFunction:
    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(t) for t in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if len(vals) < 1 or len(bp) != len(vals) + 1:
            raise ValueError(
                f"need n >= 1 values and n + 1 breakpoints, got {len(vals)} and {len(bp)}"
            )
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise NonUnitDomain(f"breakpoints must run from 0 to 1, got {bp[0]} .. {bp[-1]}")
        if any(b < a for a, b in zip(bp, bp[1:])):
            raise NonUnitDomain("breakpoints must be non-decreasing")
        if not all(math.isfinite(v) for v in vals):
            raise NonFinite("step function values must be finite")
        self._check_values()

    def _check_values(self):
        pass

    @classmethod
    def from_pieces(cls, lengths: Sequence[float], values: Sequence[float]):
        """Build from piece lengths (rescaled to sum exactly to 1), dropping empty pieces."""
        lengths = [float(x) for x in lengths]
        if any(x < 0 or not math.isfinite(x) for x in lengths):
            raise NonUnitDomain("piece lengths must be finite and non-negative")
        total = math.fsum(lengths)
        if total <= 0:
            raise NonUnitDomain("piece lengths sum to zero")
        bp = [0.0] + [min(1.0, s / total) for s in accumulate(lengths)]
        bp[-1] = 1.0
        return normalize(cls(bp, values), merge=False)

    @classmethod
    def constant(cls, value: float):
        return cls((0.0, 1.0), (value,))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def lengths(self) -> tuple[float, ...]:
        bp = self.breakpoints
        return tuple(b - a for a, b in zip(bp, bp[1:]))

    def __call__(self, t: float) -> float:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t={t} outside [0, 1]")
        i = bisect.bisect_right(self.breakpoints, t) - 1
        return self.values[min(i, self.n - 1)]

    def with_values(self, values: Sequence[float]):
        return type(self)(self.breakpoints, values)

    def integral(self) -> float:
        return math.fsum(ln * v for ln, v in zip(self.lengths, self.values))

    def sup_abs(self) -> float:
        return max(abs(v) for v in self.values)

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)

    def scale(self, c: float) -> StepFunction:
        return StepFunction(self.breakpoints, [c * v for v in self.values])

    def __add__(self, other: StepFunction) -> StepFunction:
        a, b = common_refinement(self, other)
        return StepFunction(a.breakpoints, [x + y for x, y in zip(a.values, b.values)])


@dataclass(frozen=True)
class ExponentProfile(StepFunction):
    """Exponent p(.) with values in [1, P_MAX]."""

    def _check_values(self):
        lo, hi = min(self.values), max(self.values)
        if lo < 1.0:
            raise ExponentBelowOne(f"exponent {lo} < 1")
        if hi > P_MAX:
            raise ExponentAboveCap(f"exponent {hi} > P_MAX={P_MAX:g}")

    @property
    def ess_sup(self) -> float:
        return max(self.values)


@dataclass(frozen=True)
class WeightProfile(StepFunction):
    def _check_values(self):
        if min(self.values) <= 0.0:
            raise NonPositiveWeight("weights must be strictly positive")


def normalize(sf: StepFunction, merge: bool = True) -> StepFunction:
    """Drop pieces shorter than MIN_PIECE, then merge equal neighbours."""
    bp = list(sf.breakpoints)
    vals = list(sf.values)
    keep_bp = [0.0]
    keep_vals = []
    for i, v in enumerate(vals):
        if bp[i + 1] - keep_bp[-1] < MIN_PIECE:
            continue  # absorbed by the next kept piece
        keep_bp.append(bp[i + 1])
        keep_vals.append(v)
    if not keep_vals:
        # the whole interval is shorter than MIN_PIECE only if it's degenerate
        raise NonUnitDomain("no piece of positive length")
    keep_bp[-1] = 1.0
    if merge:
        mbp, mvals = [0.0], [keep_vals[0]]
        for t, v in zip(keep_bp[1:-1], keep_vals[1:]):
            if v == mvals[-1]:
                continue
            mbp.append(t)
            mvals.append(v)
        mbp.append(1.0)
        keep_bp, keep_vals = mbp, mvals
    return type(sf)(keep_bp, keep_vals)


def common_refinement(a: StepFunction, b: StepFunction):
    """Put ``a`` and ``b`` on the sorted union of their breakpoints."""
    if a.breakpoints == b.breakpoints:
        return a, b
    union = sorted(set(a.breakpoints) | set(b.breakpoints))
    grid = [0.0]
    for t in union[1:]:
        if t - grid[-1] >= MIN_PIECE:
            grid.append(t)
    grid[-1] = 1.0
    mids = [(s + t) / 2 for s, t in zip(grid, grid[1:])]
    return (
        type(a)(grid, [a(m) for m in mids]),
        type(b)(grid, [b(m) for m in mids]),
    )


def _check_indices(sf: StepFunction, delta: Iterable[int]) -> frozenset:
    delta = frozenset(int(i) for i in delta)
    bad = [i for i in delta if not 0 <= i < sf.n]
    if bad:
        raise IndexOutOfRange(f"piece indices {sorted(bad)} outside 0..{sf.n - 1}")
    return delta


def restrict(f: StepFunction, delta: Iterable[int]) -> StepFunction:
    """Return ``1_delta * f`` on the same grid."""
    delta = _check_indices(f, delta)
    return type(f)(f.breakpoints, [v if i in delta else 0.0 for i, v in enumerate(f.values)])


def complement(sf: StepFunction, delta: Iterable[int]) -> frozenset:
    delta = _check_indices(sf, delta)
    return frozenset(range(sf.n)) - delta


def ess_bounds(p: StepFunction, delta: Iterable[int]) -> tuple[float, float]:
    delta = _check_indices(p, delta)
    if not delta:
        raise EmptySet("ess bounds over an empty piece set")
    vals = [p.values[i] for i in delta]
    return min(vals), max(vals)


def from_samples(sampler: Callable[[float], float], n: int, cls=StepFunction) -> StepFunction:
    """Midpoint sampling on ``n`` equal pieces."""
    if n < 1:
        raise ValueError("n must be >= 1")
    vals = [float(sampler((i + 0.5) / n)) for i in range(n)]
    if not all(math.isfinite(v) for v in vals):
        raise NonFinite("sampler produced a non-finite value")
    return cls([i / n for i in range(n + 1)], vals)
