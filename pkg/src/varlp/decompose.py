"""Projection-band decompositions: fold block norms with [+] and compare with the full norm.

A partition is an ordered list of disjoint piece sets covering the common grid
of ``f`` and ``p``.  A chain assigns each block a norm exponent (a constant
exponent, or ``None`` for the block's own ``p``) and joins block ``k`` to
the running value with ``[+]_{e_k}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BadCuts, SpecMismatch
from .luxemburg import norm_nakano
from .ode_norm import ode_value
from .report import CheckReport
from .scalars import constant_bp, equivalence_constant, fold
from .stepfn import ExponentProfile, StepFunction, common_refinement, ess_bounds, restrict

RELATIVE_SLACK = 1e-9
ILLUSTRATION_CONSTANT = 12.0


@dataclass(frozen=True)
class Partition:
    blocks: tuple[frozenset, ...]
    bounds: tuple[tuple[float, float], ...]  # (ess inf, ess sup) of p per block
    levels: tuple[int, ...] = ()  # bracket index per block for level partitions

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def r(self) -> list[float]:
        return [b[0] for b in self.bounds]

    @property
    def s(self) -> list[float]:
        return [b[1] for b in self.bounds]


def make_partition(p: ExponentProfile, blocks: Iterable[Iterable[int]], levels: Sequence[int] = ()) -> Partition:
    blocks = tuple(frozenset(int(i) for i in b) for b in blocks)
    seen: set[int] = set()
    for b in blocks:
        if not b:
            raise ValueError("partition blocks must be non-empty")
        if seen & b:
            raise ValueError(f"blocks overlap at pieces {sorted(seen & b)}")
        seen |= b
    if seen != set(range(p.n)):
        raise ValueError(f"blocks must cover pieces 0..{p.n - 1}")
    return Partition(blocks, tuple(ess_bounds(p, b) for b in blocks), tuple(levels))


@dataclass(frozen=True)
class ChainSpec:
    block_exponents: tuple[float | None, ...]
    fold_exponents: tuple[float, ...]

    def __post_init__(self):
        if len(self.fold_exponents) != max(len(self.block_exponents) - 1, 0):
            raise SpecMismatch("fold sequence must have one exponent fewer than the blocks")
        exps = [e for e in self.block_exponents if e is not None] + list(self.fold_exponents)
        if any(not 1.0 <= e < math.inf for e in exps):
            raise SpecMismatch("chain exponents must lie in [1, inf)")


def _check_cuts(p: ExponentProfile, cuts: Sequence[float]) -> list[float]:
    cuts = [float(c) for c in cuts]
    if len(cuts) < 2:
        raise BadCuts("need at least two cuts 1 = r_1 < r_2")
    if cuts[0] != 1.0:
        raise BadCuts(f"first cut must be 1, got {cuts[0]}")
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise BadCuts(f"cuts must be strictly increasing: {cuts}")
    if cuts[-1] < p.ess_sup:
        raise BadCuts(f"last cut {cuts[-1]} is below ess sup p = {p.ess_sup}")
    return cuts


def _bracket(v: float, cuts: list[float], chain: str) -> int:
    """0-based bracket index of exponent value ``v``."""
    n = len(cuts) - 1
    if chain == "lower":
        # (r_i, r_{i+1}], lowest bracket closed: [r_1, r_2]
        for i in range(n):
            if v <= cuts[i + 1]:
                return i
    else:
        # [r_i, r_{i+1}), highest bracket closed: [r_{n-1}, r_n]
        for i in range(n):
            if v < cuts[i + 1] or i == n - 1:
                return i
    return n - 1


def partition_by_levels(p: ExponentProfile, cuts: Sequence[float], chain: str = "lower") -> Partition:
    """Group pieces by exponent brackets between consecutive cuts; empty brackets are dropped.

    ``chain='lower'`` orders brackets top-down with ``(r_i, r_{i+1}]``;
    ``chain='upper'`` orders them bottom-up with ``[r_i, r_{i+1})``.
    """
    if chain not in ("lower", "upper"):
        raise ValueError(f"chain must be 'lower' or 'upper', got {chain!r}")
    cuts = _check_cuts(p, cuts)
    groups: dict[int, list[int]] = {}
    for i, v in enumerate(p.values):
        groups.setdefault(_bracket(v, cuts, chain), []).append(i)
    order = sorted(groups, reverse=(chain == "lower"))
    return make_partition(p, [groups[k] for k in order], order)


def level_chain_spec(partition: Partition, cuts: Sequence[float], chain: str = "lower",
                     top_exponent: str = "printed") -> ChainSpec:
    """Exponents of the cut-level chains.

    Lower: bracket ``(r_i, r_{i+1}]`` uses ``r_i``.  With ``top_exponent='r_n'``
    the top bracket uses ``r_n`` instead of ``r_{n-1}``.  Upper: bracket
    ``[r_i, r_{i+1})`` uses ``r_{i+1}``.  Each block joins with its own exponent.
    """
    cuts = [float(c) for c in cuts]
    top = len(cuts) - 2
    exps = []
    for lv in partition.levels:
        if chain == "lower":
            e = cuts[lv + 1] if (top_exponent == "r_n" and lv == top) else cuts[lv]
        else:
            e = cuts[lv + 1]
        exps.append(e)
    return ChainSpec(tuple(exps), tuple(exps[1:]))


def general_chain_spec(partition: Partition, which: str, own_norm: bool = False) -> ChainSpec:
    """Chain over a general partition using the blocks' ess inf (``'r'``) or ess sup (``'s'``)."""
    exps = partition.r if which == "r" else partition.s
    blocks = tuple(None for _ in exps) if own_norm else tuple(exps)
    return ChainSpec(blocks, tuple(exps[1:]))


def block_norms(f: StepFunction, p: ExponentProfile, partition: Partition, spec: ChainSpec,
                norm: str = "nakano") -> list[float]:
    if len(spec.block_exponents) != partition.n:
        raise SpecMismatch(f"spec has {len(spec.block_exponents)} blocks, partition {partition.n}")
    f, p = common_refinement(f, p)
    if max(max(b) for b in partition.blocks) >= f.n:
        raise SpecMismatch("partition does not match the piece grid")
    out = []
    for block, e in zip(partition.blocks, spec.block_exponents):
        g = restrict(f, block)
        q = p if e is None else ExponentProfile.constant(e)
        out.append(norm_nakano(g, q).value if norm == "nakano" else ode_value(g, q))
    return out


def chain_value(f: StepFunction, p: ExponentProfile, partition: Partition, spec: ChainSpec,
                norm: str = "nakano") -> float:
    if norm not in ("nakano", "ode"):
        raise ValueError(f"norm must be 'nakano' or 'ode', got {norm!r}")
    return fold(block_norms(f, p, partition, spec, norm), spec.fold_exponents)


def decomposition_comparisons(f: StepFunction, p: ExponentProfile, partition: Partition) -> dict:
    """All four decomposition chains as ``(label, lhs, rhs)`` lists, keyed by chain."""
    c1 = equivalence_constant()
    b = constant_bp(p.ess_sup)
    nak = norm_nakano(f, p).value
    ode = ode_value(f, p)
    spec_r = general_chain_spec(partition, "r")
    spec_s = general_chain_spec(partition, "s")
    own = general_chain_spec(partition, "r", own_norm=True)
    fold_r, fold_s = spec_r.fold_exponents, spec_s.fold_exponents
    lower_r = fold(block_norms(f, p, partition, spec_r, "nakano"), fold_r)
    upper_s = fold(block_norms(f, p, partition, spec_s, "nakano"), fold_s)
    # the p(.)-norm blocks are shared by both directions of chains 3 and 4
    own_ode = block_norms(f, p, partition, own, "ode")
    own_nak = block_norms(f, p, partition, own, "nakano")
    return {
        "chain1": [("chain_r/C1<=nakano", lower_r / c1, nak)],
        "chain2": [("nakano<=C1*chain_s", nak, c1 * upper_s)],
        "chain3": [("ode_chain_s/b<=ode", fold(own_ode, fold_s) / b, ode),
                   ("ode<=b*ode_chain_r", ode, b * fold(own_ode, fold_r))],
        "chain4": [("nak_chain_s/b<=nakano", fold(own_nak, fold_s) / b, nak),
                   ("nakano<=b*nak_chain_r", nak, b * fold(own_nak, fold_r))],
    }


def certify_decomposition(f: StepFunction, p: ExponentProfile, partition: Partition,
                          slack: float = RELATIVE_SLACK) -> CheckReport:
    report = CheckReport("T41", slack=slack, trials=1)
    comps = decomposition_comparisons(f, p, partition)
    for chain, items in comps.items():
        for label, lhs, rhs in items:
            report.record(lhs, rhs, 0, f"{chain}:{label}")
        report.notes[chain] = {label: {"lhs": lhs, "rhs": rhs, "margin": rhs / lhs if lhs > 0 else None}
                               for label, lhs, rhs in items}
    report.notes["C1"] = equivalence_constant()
    report.notes["b_pbar"] = constant_bp(p.ess_sup)
    return report


def level_comparisons(f: StepFunction, p: ExponentProfile, cuts: Sequence[float], norm: str = "nakano") -> dict:
    """The cut-level chains.  The ``r_n`` top-exponent variant is returned but not certified."""
    c1 = equivalence_constant()
    whole = norm_nakano(f, p).value if norm == "nakano" else ode_value(f, p)
    low = partition_by_levels(p, cuts, "lower")
    up = partition_by_levels(p, cuts, "upper")
    lower = chain_value(f, p, low, level_chain_spec(low, cuts, "lower"), norm)
    variant = chain_value(f, p, low, level_chain_spec(low, cuts, "lower", "r_n"), norm)
    upper = chain_value(f, p, up, level_chain_spec(up, cuts, "upper"), norm)
    return {
        "whole": whole,
        "lower_chain": lower,
        "lower_chain_rn_variant": variant,
        "upper_chain": upper,
        "comparisons": [
            ("lower/C1<=norm", lower / c1, whole),
            ("norm<=C1*upper", whole, c1 * upper),
        ],
        "lower_partition": low,
        "upper_partition": up,
    }


def illustration_comparisons(f: StepFunction, p: ExponentProfile, r: float) -> list[tuple[str, float, float]]:
    """Two-block bounds with the rounded constant 12, split at exponent level ``r``."""
    f, p = common_refinement(f, p)
    high = [i for i, v in enumerate(p.values) if v >= r]
    low = [i for i, v in enumerate(p.values) if v < r]
    pbar = p.ess_sup

    def nk(block, e):
        return norm_nakano(restrict(f, block), ExponentProfile.constant(e)).value

    whole = norm_nakano(f, p).value
    lower = (nk(high, r) + nk(low, 1.0)) / ILLUSTRATION_CONSTANT
    upper = ILLUSTRATION_CONSTANT * fold([nk(low, r), nk(high, pbar)], [pbar])
    return [("(hi_r + lo_1)/12<=nakano", lower, whole), ("nakano<=12*(lo_r [+]pbar hi_pbar)", whole, upper)]
