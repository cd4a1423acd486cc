"""Simultaneous rearrangements of ``(f, p)`` and the extremal role of monotone exponents.

Rearrangements act on whole pieces of the common grid of ``f`` and ``p``;
a piece permutation is measure preserving, and sorting pieces by exponent
realises the monotone rearrangement exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidPermutation, NotMonotone, ZeroPiece
from .luxemburg import norm_nakano
from .ode_norm import AccumulationCurve, phi_recursion
from .report import CheckReport
from .scalars import constant_bp
from .stepfn import ExponentProfile, StepFunction, common_refinement

RELATIVE_SLACK = 1e-9
STRICT_GAP = 1e-12


def permute(f: StepFunction, p: ExponentProfile, sigma: Sequence[int]):
    """Reorder pieces: output piece ``j`` is input piece ``sigma[j]``."""
    f, p = common_refinement(f, p)
    sigma = [int(s) for s in sigma]
    if sorted(sigma) != list(range(f.n)):
        raise InvalidPermutation(f"{sigma} is not a permutation of 0..{f.n - 1}")
    if sigma == list(range(f.n)):
        return f, p
    lens = f.lengths
    new_lens = [lens[s] for s in sigma]
    return (
        type(f).from_pieces(new_lens, [f.values[s] for s in sigma]),
        type(p).from_pieces(new_lens, [p.values[s] for s in sigma]),
    )


def exponent_order(p: StepFunction, direction: str) -> list[int]:
    if direction not in ("inc", "dec"):
        raise ValueError(f"direction must be 'inc' or 'dec', got {direction!r}")
    sign = 1.0 if direction == "inc" else -1.0
    # sorted() is stable: ties keep their original order
    return sorted(range(p.n), key=lambda i: sign * p.values[i])


def sort_by_exponent(f: StepFunction, p: ExponentProfile, direction: str = "inc"):
    f, p = common_refinement(f, p)
    return permute(f, p, exponent_order(p, direction))


def random_permutation(n: int, rng: np.random.Generator) -> list[int]:
    """Fisher-Yates shuffle driven by ``rng``."""
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def _ode_of_order(lens, fv, pv, order) -> float:
    return phi_recursion([lens[i] for i in order], [fv[i] for i in order], [pv[i] for i in order])[-1]


def rearrangement_comparisons(f: StepFunction, p: ExponentProfile, count: int, seed: int,
                              trial: int = 0) -> tuple[list[tuple[str, float, float]], dict]:
    """Comparisons for ``count`` seeded random permutations of ``(f, p)``.

    Labels ``inc<=perm`` and ``perm<=dec`` are the monotone extremes,
    ``perm<=b*orig`` and ``orig<=b*perm`` the ``b_pbar`` factor.  Permuted
    norms are evaluated on permuted piece lists, so lengths carry over bit
    for bit.
    """
    f, p = common_refinement(f, p)
    lens, fv, pv = f.lengths, f.values, p.values
    b = constant_bp(p.ess_sup)
    base = _ode_of_order(lens, fv, pv, range(f.n))
    lo = _ode_of_order(lens, fv, pv, exponent_order(p, "inc"))
    hi = _ode_of_order(lens, fv, pv, exponent_order(p, "dec"))
    rng = np.random.default_rng([seed, trial])
    out = []
    worst_ratio = 1.0
    for _ in range(count):
        val = _ode_of_order(lens, fv, pv, random_permutation(f.n, rng))
        out += [("inc<=perm", lo, val), ("perm<=dec", val, hi),
                ("perm<=b*orig", val, b * base), ("orig<=b*perm", base, b * val)]
        if base > 0 and val > 0:
            worst_ratio = max(worst_ratio, val / base, base / val)
    stats = {"min_increasing": lo, "max_decreasing": hi, "max_ratio_observed": worst_ratio,
             "max_extreme_ratio": hi / lo if lo > 0 else 1.0}
    return out, stats


def certify_rearrangement(f: StepFunction, p: ExponentProfile, trials: int = 100,
                          seed: int = 0) -> CheckReport:
    """Random permutations stay between the monotone arrangements and within ``b_pbar`` of ``f``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    report = CheckReport("T31", slack=RELATIVE_SLACK, seed=seed, trials=trials)
    comparisons, stats = rearrangement_comparisons(f, p, trials, seed)
    for label, lhs, rhs in comparisons:
        report.record(lhs, rhs, 0, label, params={"seed": seed, "permutations": trials})
    report.notes.update(stats)
    return report


def constant_one_comparisons(p: ExponentProfile) -> tuple[list[tuple[str, float, float]], float, str]:
    """Comparisons, ``||1||`` and shape label for a monotone exponent profile."""
    vals = p.values
    inc = all(a <= b for a, b in zip(vals, vals[1:]))
    dec = all(a >= b for a, b in zip(vals, vals[1:]))
    if not (inc or dec):
        raise NotMonotone("exponent profile is neither non-decreasing nor non-increasing")
    value = phi_recursion(p.lengths, [1.0] * p.n, vals)[-1]
    if min(vals) == max(vals):
        return [("|norm-1|<=1e-12", abs(value - 1.0), STRICT_GAP)], value, "constant"
    if inc:
        return [("norm<1", value, 1.0 - STRICT_GAP)], value, "increasing"
    return [("norm>1", 1.0 + STRICT_GAP, value)], value, "decreasing"


def constant_one_monotone_check(p: ExponentProfile) -> CheckReport:
    """``||1||`` is <= 1 for increasing and >= 1 for decreasing exponents, strictly unless constant."""
    items, value, shape = constant_one_comparisons(p)
    report = CheckReport("P32", slack=0.0, trials=1)
    report.notes.update({"norm_of_one": value, "shape": shape})
    for label, lhs, rhs in items:
        report.record(lhs, rhs, label=label)
    return report


@dataclass(frozen=True)
class AuxTransform:
    alpha: float
    p_hat: ExponentProfile  # on [0, 1], i.e. the image [0, alpha] rescaled by 1/alpha
    curve_hat: AccumulationCurve  # breakpoints are the image points T(t_i) in [0, alpha]
    dtau: tuple[float, ...] = ()  # per-piece image lengths, free of cancellation in T(t_i)

    def slopes(self) -> list[float]:
        """Per piece ``(phi^p(tau_i) - phi^p(tau_{i-1})) / (tau_i - tau_{i-1})``; equals ``p`` exactly."""
        tau, phi = self.curve_hat.breakpoints, self.curve_hat.phi
        dtau = self.dtau or tuple(b - a for a, b in zip(tau, tau[1:]))
        return [(phi[i + 1] ** pv - phi[i] ** pv) / dtau[i] for i, pv in enumerate(self.p_hat.values)]


def aux_transform(f: StepFunction, p: ExponentProfile) -> AuxTransform:
    """Change variables by ``T(t) = int_0^t |f|^p / p``; the curve then solves ``phi' = phi^(1-p)``."""
    f, p = common_refinement(f, p)
    if any(v == 0.0 for v in f.values):
        raise ZeroPiece("the transform needs f != 0 on every piece")
    dtau = [ln * abs(fv) ** pv / pv for ln, fv, pv in zip(f.lengths, f.values, p.values)]
    tau = [0.0]
    for d in dtau:
        tau.append(tau[-1] + d)
    alpha = tau[-1]
    if not math.isfinite(alpha):
        raise OverflowError("T(1) exceeds the double range")
    scaled = [t / alpha for t in tau]
    scaled[-1] = 1.0
    p_hat = ExponentProfile(scaled, p.values)
    curve = AccumulationCurve(tuple(tau), tuple(phi_recursion(f.lengths, f.values, p.values)))
    return AuxTransform(alpha, p_hat, curve, tuple(dtau))


def limit_example(p: float, order: str = "p_first") -> float:
    """``||1||`` for exponent ``p`` on ``[0, 1/ln p)`` and 1 elsewhere (``order='one_first'`` swaps).

    Runs the exact recursion on raw piece data so ``p`` may exceed P_MAX.
    """
    if p <= math.e:
        raise ValueError("need p > e so that 1/ln p < 1")
    short = 1.0 / math.log(p)
    if order == "p_first":
        return phi_recursion([short, 1.0 - short], [1.0, 1.0], [p, 1.0])[-1]
    if order == "one_first":
        return phi_recursion([short, 1.0 - short], [1.0, 1.0], [1.0, p])[-1]
    raise ValueError(f"unknown order {order!r}")


def limit_example_formula(p: float) -> float:
    """Hand formula for ``limit_example(p, 'p_first')``: ``(1/ln p)^(1/p) + 1 - 1/ln p``."""
    short = 1.0 / math.log(p)
    return short ** (1.0 / p) + 1.0 - short


def nakano_invariance(f: StepFunction, p: ExponentProfile, sigma: Sequence[int]) -> tuple[float, float]:
    """Nakano norm before and after a simultaneous permutation."""
    g, q = permute(f, p, sigma)
    return norm_nakano(f, p).value, norm_nakano(g, q).value
