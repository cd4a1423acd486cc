"""The ODE-determined norm ``phi_f(1)`` where ``phi' = (|f|^p / p) phi^(1-p)``, ``phi(0) = 0+``.

On a piece with constant ``f_i``, ``p_i`` the equation is separable,
``d(phi^p_i)/dt = |f_i|^p_i``, so the solution advances exactly by

    phi(t_i) = phi(t_{i-1}) [+]_{p_i} |f_i| len_i^(1/p_i).

Starting from ``phi = 0`` this is already the ``0+`` limit; ``phi_numeric``
reproduces the limiting procedure from a positive seed to validate that.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .errors import NonPositiveEps, OutOfDomain
from .luxemburg import NormResult
from .modular import aligned
from .scalars import _boxplus
from .stepfn import StepFunction, WeightProfile, common_refinement


@dataclass(frozen=True)
class AccumulationCurve:
    breakpoints: tuple[float, ...]
    phi: tuple[float, ...]

    @property
    def final(self) -> float:
        return self.phi[-1]


def phi_recursion(lengths, fvals, pvals, seed: float = 0.0, steps: int = 1) -> list[float]:
    """Closed-form piece recursion on raw data; returns phi at every breakpoint."""
    phi = seed
    out = [phi]
    for ln, f, p in zip(lengths, fvals, pvals):
        af = abs(f)
        # phi' = 0 where f = 0; skipping avoids 0^(1-p)
        if af != 0.0 and ln > 0.0:
            if steps == 1:
                phi = _boxplus(phi, af * ln ** (1.0 / p), p)
            else:
                inc = af * (ln / steps) ** (1.0 / p)
                for _ in range(steps):
                    phi = _boxplus(phi, inc, p)
        out.append(phi)
    return out


def _refined(f, p):
    f, p = common_refinement(f, p)
    return f, p


def phi_exact_step(f: StepFunction, p: StepFunction) -> AccumulationCurve:
    f, p = _refined(f, p)
    return AccumulationCurve(f.breakpoints, tuple(phi_recursion(f.lengths, f.values, p.values)))


def norm_ode(f: StepFunction, p: StepFunction) -> NormResult:
    lengths, fv, pv, _ = aligned(f, p)
    return NormResult(phi_recursion(lengths, fv, pv)[-1], "ode", 0.0, 0)


def ode_value(f: StepFunction, p: StepFunction) -> float:
    lengths, fv, pv, _ = aligned(f, p)
    return phi_recursion(lengths, fv, pv)[-1]


def accumulation(f: StepFunction, p: StepFunction, t: float) -> float:
    """``phi(t) = ||1_[0,t] f||``, exact inside pieces as well."""
    if not 0.0 <= t <= 1.0:
        raise OutOfDomain(f"t={t} outside [0, 1]")
    f, p = _refined(f, p)
    curve = phi_recursion(f.lengths, f.values, p.values)
    bp = f.breakpoints
    i = bisect.bisect_right(bp, t) - 1
    if i >= f.n or bp[i] == t:
        return curve[min(i, f.n)]
    af, pi = abs(f.values[i]), p.values[i]
    if af == 0.0:
        return curve[i]
    return _boxplus(curve[i], af * (t - bp[i]) ** (1.0 / pi), pi)


def phi_numeric(f: StepFunction, p: StepFunction, steps: int, eps0: float) -> AccumulationCurve:
    """Integrate from the positive seed ``eps0`` with ``steps`` closed-form substeps per piece."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not eps0 > 0:
        raise NonPositiveEps(f"eps0 must be > 0, got {eps0}")
    f, p = _refined(f, p)
    phi = phi_recursion(f.lengths, f.values, p.values, seed=eps0, steps=steps)
    return AccumulationCurve(f.breakpoints, tuple(phi))


def varying_lambda_curve(f: StepFunction, p: StepFunction, w: WeightProfile) -> AccumulationCurve:
    """Solve ``lam' = w |f|^p lam^(1-p)``, ``lam(0) = 0+``, piece by piece.

    Per piece ``d(lam^p)/dt = p w |f|^p``, i.e. the same recursion as ``phi``
    with ``|f|`` scaled by ``(p w)^(1/p)``.  With ``w = 1/p`` it is ``phi``.
    """
    lengths, fv, pv, wv = aligned(f, p, w)
    lam = 0.0
    out = [lam]
    for ln, fi, pi, wi in zip(lengths, fv, pv, wv):
        af = abs(fi)
        if af != 0.0 and ln > 0.0:
            lam = _boxplus(lam, af * (pi * wi * ln) ** (1.0 / pi), pi)
        out.append(lam)
    grid = aligned_grid(f, p, w)
    return AccumulationCurve(grid, tuple(out))


def aligned_grid(*fns: StepFunction) -> tuple[float, ...]:
    g = fns[0]
    for h in fns[1:]:
        g, _ = common_refinement(g, h)
    return g.breakpoints


def classical_lp(f: StepFunction, r: float) -> float:
    """``(int |f|^r)^(1/r)`` for a constant exponent, scaled by ``max|f|`` against overflow."""
    m = f.sup_abs()
    if m == 0.0:
        return 0.0
    if math.isinf(r):
        return m
    s = math.fsum(ln * (abs(v) / m) ** r for ln, v in zip(f.lengths, f.values))
    return m * s ** (1.0 / r)
