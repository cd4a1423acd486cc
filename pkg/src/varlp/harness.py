"""Seeded instance generation and the inequality certification suite.

Every check draws its data from ``default_rng([seed, trial, salt])`` where
``salt`` depends only on the check, so a trial can be regenerated in
isolation and adding checks never shifts the draws of others.  A check
returns ``(report, label, lhs, rhs)`` comparisons; each one is recorded as
``lhs <= rhs`` in the report of that name.  Witnesses carry the instance and
parameters inline, so ``replay`` recomputes them without the generator.
"""

from __future__ import annotations

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .decompose import (
    decomposition_comparisons,
    illustration_comparisons,
    level_comparisons,
    make_partition,
)
from .errors import VarLpError
from .instances import load_instance
from .luxemburg import norm_mo, norm_nakano
from .modular import modular_lambda_derivative, modular_nakano, nakano_weight_profile
from .ode_norm import classical_lp, ode_value, phi_exact_step, varying_lambda_curve
from .rearrange import (
    constant_one_comparisons,
    limit_example,
    limit_example_formula,
    permute,
    random_permutation,
    rearrangement_comparisons,
)
from .report import CheckReport, Witness, margin_of, violates
from .scalars import constant_a, constant_bp, equivalence_constant, nested_fold_compare
from .stepfn import P_MAX, ExponentProfile, StepFunction, restrict

SCHEMA = "varlp-fuzz-report/1"
SLACK = 1e-9
CONST_P_VALUES = (1.0, 1.5, 2.0, 7.0, 64.0)

Item = tuple[str, str, float, float]


@dataclass(frozen=True)
class GenConfig:
    max_pieces: int = 8
    f_range: tuple[float, float] = (0.0, 10.0)
    p_range: tuple[float, float] = (1.0, 64.0)
    zero_piece_prob: float = 0.1
    seed: int = 0
    permutations: int = 20

    def __post_init__(self):
        object.__setattr__(self, "f_range", tuple(float(x) for x in self.f_range))
        object.__setattr__(self, "p_range", tuple(float(x) for x in self.p_range))
        lo, hi = self.f_range
        if not 0.0 <= lo <= hi < math.inf:
            raise ValueError(f"f_range must satisfy 0 <= lo <= hi, got {self.f_range}")
        lo, hi = self.p_range
        if not 1.0 <= lo <= hi <= P_MAX:
            raise ValueError(f"p_range must satisfy 1 <= lo <= hi <= {P_MAX:g}, got {self.p_range}")
        if self.max_pieces < 1:
            raise ValueError("max_pieces must be >= 1")
        if not 0.0 <= self.zero_piece_prob <= 1.0:
            raise ValueError("zero_piece_prob must lie in [0, 1]")
        if self.permutations < 1:
            raise ValueError("permutations must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["f_range"] = list(self.f_range)
        d["p_range"] = list(self.p_range)
        return d

    @classmethod
    def extreme(cls, **kw) -> "GenConfig":
        kw.setdefault("p_range", (1.0, 1e4))
        return cls(**kw)


def trial_rng(seed: int, trial: int, salt: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed % 2**64, trial, salt])


def _log_uniform(rng, lo: float, hi: float, size=None):
    if lo == hi:
        return np.full(size, lo) if size is not None else lo
    x = np.exp(rng.uniform(math.log(lo), math.log(hi), size))
    return np.clip(x, lo, hi)


def draw_instance_dict(cfg: GenConfig, rng: np.random.Generator, min_pieces: int = 1) -> dict:
    n = int(rng.integers(min_pieces, max(cfg.max_pieces, min_pieces) + 1))
    raw = rng.uniform(0.05, 1.0, n)
    lens = raw / raw.sum()
    fv = rng.uniform(cfg.f_range[0], cfg.f_range[1], n)
    fv[rng.random(n) < cfg.zero_piece_prob] = 0.0
    pv = _log_uniform(rng, *cfg.p_range, size=n)
    return {"pieces": [{"len": float(a), "f": float(b), "p": float(c)} for a, b, c in zip(lens, fv, pv)]}


def generate_instance(cfg: GenConfig, trial: int) -> tuple[StepFunction, ExponentProfile]:
    """Deterministic in ``(cfg, trial)``."""
    return load_instance(draw_instance_dict(cfg, trial_rng(cfg.seed, trial)))


@dataclass(frozen=True)
class Check:
    """A family of comparisons sharing one draw; ``reports`` are the names it feeds."""

    name: str
    reports: tuple[str, ...]
    draw: Callable[[GenConfig, np.random.Generator, int], tuple[dict | None, dict] | None]
    evaluate: Callable[[dict | None, dict], tuple[list[Item], dict]]
    slack: dict[str, float] = field(default_factory=dict)

    @property
    def salt(self) -> int:
        return zlib.crc32(self.name.encode())

    def slack_for(self, report: str) -> float:
        return self.slack.get(report, SLACK)


REGISTRY: dict[str, Check] = {}
ALIASES = {
    "prop21_1": "P21a",
    "prop21_2": "P21b",
    "prop21_3": "P21c",
    "nakano_mo_sandwich": "P22",
    "nakano_ode_sandwich": "P23",
    "fold_order": "P25",
    "constant_one": "P32",
    "rearrangement": "T31",
    "decomposition": "T41",
    "limit": "LIMIT-2",
    "derivative": "DERIV-1",
    "coincidence": "COINCIDE-5.3",
    "axioms": "AXIOMS",
    "constant_p": "CONST-P",
}


def register(check: Check) -> Check:
    REGISTRY[check.name] = check
    return check


def report_names() -> list[str]:
    return [r for c in REGISTRY.values() for r in c.reports]


def check_for_report(report: str) -> Check:
    for c in REGISTRY.values():
        if report in c.reports:
            return c
    raise KeyError(report)


def resolve(names: Iterable[str] | None) -> list[str]:
    """Expand check names, group names and aliases into report names, in registry order."""
    if names is None:
        return report_names()
    wanted: set[str] = set()
    for raw in names:
        name = ALIASES.get(raw.strip(), raw.strip())
        if not name:
            continue
        hits = [r for r in report_names() if r == name or r.startswith(name + "-")]
        if name in REGISTRY:
            hits += list(REGISTRY[name].reports)
        if not hits:
            raise KeyError(f"unknown check {raw!r}")
        wanted.update(hits)
    return [r for r in report_names() if r in wanted]


# --- checks -----------------------------------------------------------------


def _instance(cfg, rng, min_pieces=1):
    return draw_instance_dict(cfg, rng, min_pieces)


def _draw_plain(cfg, rng, trial):
    return _instance(cfg, rng), {}


def _eval_sandwich(inst, params):
    f, p = load_instance(inst)
    nak = norm_nakano(f, p).value
    mo = norm_mo(f, p).value
    ode = ode_value(f, p)
    a, b = constant_a(), constant_bp(p.ess_sup)
    items = [
        ("P21c", "ode<e*sup|f|", ode, math.e * f.sup_abs()),
        ("P22", "MO/a<=nakano", mo / a, nak),
        ("P22", "nakano<=MO", nak, mo),
        ("P23", "nakano<=ode", nak, ode),
        ("P23", "ode<=b*nakano", ode, b * nak),
    ]
    return items, {}


register(Check("SANDWICH", ("P21c", "P22", "P23"), _draw_plain, _eval_sandwich))


def _draw_p21a(cfg, rng, trial):
    inst = _instance(cfg, rng)
    top = max(pc["p"] for pc in inst["pieces"])
    r = float(_log_uniform(rng, 1.0, max(top, 1.5)))
    return inst, {"r": max(r, 1.0 + 1e-9)}


def _eval_p21a(inst, params):
    f, p = load_instance(inst)
    r = params["r"]
    g = restrict(f, [i for i, v in enumerate(p.values) if v >= r])
    return [("P21a", "L^r/(1+a)<=ode", classical_lp(g, r) / (1.0 + constant_a()), ode_value(g, p))], {}


register(Check("P21a", ("P21a",), _draw_p21a, _eval_p21a))


def _draw_p21b(cfg, rng, trial):
    inst = _instance(cfg, rng)
    hi = cfg.p_range[1]
    p2 = [float(min(hi, pc["p"] * _log_uniform(rng, 1.0, max(hi / pc["p"], 1.0)))) for pc in inst["pieces"]]
    return inst, {"p2": p2}


def _eval_p21b(inst, params):
    f, p = load_instance(inst)
    q = ExponentProfile(p.breakpoints, params["p2"])
    c = 1.0 + constant_a() * math.e
    return [("P21b", "ode_p1/(1+ae)<=ode_p2", ode_value(f, p) / c, ode_value(f, q))], {}


register(Check("P21b", ("P21b",), _draw_p21b, _eval_p21b))


def _draw_p25(cfg, rng, trial):
    ndim = int(rng.integers(2, 5))
    shape = [int(rng.integers(1, 4)) for _ in range(ndim)]
    t = rng.uniform(cfg.f_range[0], cfg.f_range[1], shape)
    t[rng.random(shape) < cfg.zero_piece_prob] = 0.0
    exps = sorted(float(x) for x in _log_uniform(rng, *cfg.p_range, size=ndim))
    return None, {"tensor": t.tolist(), "exponents": exps}


def _eval_p25(inst, params):
    t, exps = np.asarray(params["tensor"], dtype=float), params["exponents"]
    items = []
    for k in range(len(exps) - 1):
        lhs, rhs = nested_fold_compare(t, exps, k)
        items.append(("P25", f"swap{k}", lhs, rhs))
    return items, {}


register(Check("P25", ("P25",), _draw_p25, _eval_p25, {"P25": 1e-12}))


def _draw_p32(cfg, rng, trial):
    inst = _instance(cfg, rng, min_pieces=2)
    ps = sorted(pc["p"] for pc in inst["pieces"])
    if rng.random() < 0.5:
        ps.reverse()
    for pc, v in zip(inst["pieces"], ps):
        pc["f"], pc["p"] = 1.0, v
    return inst, {}


def _eval_p32(inst, params):
    _, p = load_instance(inst)
    items, value, shape = constant_one_comparisons(p)
    return [("P32", label, lhs, rhs) for label, lhs, rhs in items], {"P32": {"sum_shapes": {shape: 1}}}


register(Check("P32", ("P32",), _draw_p32, _eval_p32, {"P32": 0.0}))


def _draw_t31(cfg, rng, trial):
    return _instance(cfg, rng), {"seed": cfg.seed, "trial": trial, "permutations": cfg.permutations}


def _eval_t31(inst, params):
    f, p = load_instance(inst)
    comps, stats = rearrangement_comparisons(f, p, params["permutations"], params["seed"], params["trial"])
    items = [("T31-sandwich" if label in ("inc<=perm", "perm<=dec") else "T31-factor", label, lhs, rhs)
             for label, lhs, rhs in comps]
    # one extra permutation for the Nakano invariance, from its own stream
    sigma = random_permutation(f.n, trial_rng(params["seed"], params["trial"], 1))
    before = norm_nakano(f, p).value
    after = norm_nakano(*permute(f, p, sigma)).value
    items.append(("T31-nakano", "|nak(perm)-nak|<=1e-12*nak", abs(after - before), 1e-12 * before))
    notes = {"T31-factor": {"max_ratio_observed": stats["max_ratio_observed"]},
             "T31-sandwich": {"max_extreme_ratio": stats["max_extreme_ratio"]}}
    return items, notes


register(Check("T31", ("T31-sandwich", "T31-factor", "T31-nakano"), _draw_t31, _eval_t31,
               {"T31-nakano": 0.0}))


def _draw_t41(cfg, rng, trial):
    inst = _instance(cfg, rng, min_pieces=2)
    n = len(inst["pieces"])
    k = int(rng.integers(2, min(8, n) + 1))
    labels = rng.permutation(np.concatenate([np.arange(k), rng.integers(0, k, n - k)]))
    return inst, {"blocks": [[i for i in range(n) if labels[i] == b] for b in range(k)]}


def _eval_t41(inst, params):
    f, p = load_instance(inst)
    part = make_partition(p, params["blocks"])
    k = str(part.n)
    consts = {"chain1": equivalence_constant(), "chain2": equivalence_constant(),
              "chain3": constant_bp(p.ess_sup), "chain4": constant_bp(p.ess_sup)}
    items, notes = [], {}
    for chain, comps in decomposition_comparisons(f, p, part).items():
        name = f"T41-{chain}"
        worst = 0.0
        for label, lhs, rhs in comps:
            items.append((name, label, lhs, rhs))
            if rhs > 0:
                worst = max(worst, lhs / rhs)
        # smallest constant that would have sufficed on this instance
        notes[name] = {"max_constant_by_blocks": {k: worst * consts[chain]}}
    return items, notes


register(Check("T41", tuple(f"T41-chain{i}" for i in range(1, 5)), _draw_t41, _eval_t41))


def _draw_levels(cfg, rng, trial):
    inst = _instance(cfg, rng)
    top = max(pc["p"] for pc in inst["pieces"])
    if top <= 1.0:
        return None
    inner = sorted(float(x) for x in rng.uniform(1.0, top, int(rng.integers(0, 4))))
    cuts = [1.0] + [c for c in inner if 1.0 < c < top] + [top]
    return inst, {"cuts": sorted(set(cuts))}


def _eval_levels(inst, params):
    f, p = load_instance(inst)
    res = level_comparisons(f, p, params["cuts"])
    items = [("T41-levels", label, lhs, rhs) for label, lhs, rhs in res["comparisons"]]
    v = res["lower_chain_rn_variant"] / equivalence_constant()
    usage = v / res["whole"] if res["whole"] > 0 else 0.0
    return items, {"T41-levels": {"max_rn_variant_usage": usage}}


register(Check("T41-levels", ("T41-levels",), _draw_levels, _eval_levels))


def _draw_t41_12(cfg, rng, trial):
    inst = _instance(cfg, rng)
    top = max(pc["p"] for pc in inst["pieces"])
    if top <= 1.0:
        return None
    return inst, {"r": float(_log_uniform(rng, 1.0, top))}


def _eval_t41_12(inst, params):
    f, p = load_instance(inst)
    return [("T41-12", label, lhs, rhs) for label, lhs, rhs in illustration_comparisons(f, p, params["r"])], {}


register(Check("T41-12", ("T41-12",), _draw_t41_12, _eval_t41_12))


def _draw_limit(cfg, rng, trial):
    e = float(rng.uniform(3.0, 12.0))
    return None, {"p": 10.0 ** e, "q": 10.0 ** (e + float(rng.uniform(0.5, 1.0)))}


def _eval_limit(inst, params):
    p, q = params["p"], params["q"]
    vp, vq = limit_example(p), limit_example(q)
    formula = limit_example_formula(p)
    items = [
        ("LIMIT-2", "value(p)<=value(q)", vp, vq),
        ("LIMIT-2", "|recursion-formula|<=1e-12", abs(vp - formula), 1e-12 * formula),
        ("LIMIT-2", "one_first<=p_first", limit_example(p, "one_first"), vp),
    ]
    return items, {"LIMIT-2": {"max_value": vq}}


register(Check("LIMIT-2", ("LIMIT-2",), _draw_limit, _eval_limit, {"LIMIT-2": 0.0}))


def _draw_deriv(cfg, rng, trial):
    n = int(rng.integers(1, cfg.max_pieces + 1))
    raw = rng.uniform(0.05, 1.0, n)
    lens = raw / raw.sum()
    c = rng.dirichlet(np.ones(n))
    pv = _log_uniform(rng, *cfg.p_range, size=n)
    # |f_i|^p_i len_i = c_i, so the modular of |f|^p integrates to one
    fv = (c / lens) ** (1.0 / pv)
    return {"pieces": [{"len": float(a), "f": float(b), "p": float(q)} for a, b, q in zip(lens, fv, pv)]}, {}


def _eval_deriv(inst, params):
    f, p = load_instance(inst)
    d = modular_lambda_derivative(f, p, nakano_weight_profile(p), 1.0)
    h = 5e-6 / p.ess_sup
    fd = (modular_nakano(f, p, 1.0 + h) - modular_nakano(f, p, 1.0 - h)) / (2.0 * h)
    items = [
        ("DERIV-1", "|d+1|<=1e-10", abs(d + 1.0), 1e-10),
        ("DERIV-1", "|d-fd|<=1e-6", abs(d - fd), 1e-6),
    ]
    return items, {}


register(Check("DERIV-1", ("DERIV-1",), _draw_deriv, _eval_deriv, {"DERIV-1": 0.0}))


def _eval_coincide(inst, params):
    f, p = load_instance(inst)
    lam = varying_lambda_curve(f, p, nakano_weight_profile(p)).phi
    phi = phi_exact_step(f, p).phi
    scale = max(max(phi), 1e-300)
    gap = max(abs(x - y) for x, y in zip(lam, phi)) / scale
    return [("COINCIDE-5.3", "curve gap<=1e-13", gap, 1e-13)], {}


register(Check("COINCIDE-5.3", ("COINCIDE-5.3",), _draw_plain, _eval_coincide, {"COINCIDE-5.3": 0.0}))


def _draw_axioms(cfg, rng, trial):
    inst = _instance(cfg, rng)
    n = len(inst["pieces"])
    g = rng.uniform(cfg.f_range[0], cfg.f_range[1], n) * rng.choice([-1.0, 1.0], n)
    g[rng.random(n) < cfg.zero_piece_prob] = 0.0
    c = float(10.0 ** rng.uniform(-3.0, 3.0)) * float(rng.choice([-1.0, 1.0]))
    return inst, {"c": c, "g": [float(x) for x in g]}


def _eval_axioms(inst, params):
    f, p = load_instance(inst)
    c = params["c"]
    g = StepFunction(f.breakpoints, params["g"])
    cf = f.scale(c)
    nak, ode = norm_nakano(f, p).value, ode_value(f, p)
    items = [
        ("AXIOMS-homogeneity", "nakano", abs(norm_nakano(cf, p).value - abs(c) * nak), 1e-10 * abs(c) * nak),
        ("AXIOMS-homogeneity", "ode", abs(ode_value(cf, p) - abs(c) * ode), 1e-12 * abs(c) * ode),
        ("AXIOMS-triangle", "nakano", norm_nakano(f + g, p).value, nak + norm_nakano(g, p).value),
        ("AXIOMS-triangle", "mo", norm_mo(f + g, p).value, norm_mo(f, p).value + norm_mo(g, p).value),
        ("AXIOMS-triangle", "ode", ode_value(f + g, p), ode + ode_value(g, p)),
    ]
    return items, {}


register(Check("AXIOMS", ("AXIOMS-homogeneity", "AXIOMS-triangle"), _draw_axioms, _eval_axioms,
               {"AXIOMS-homogeneity": 0.0}))


def _draw_const_p(cfg, rng, trial):
    inst = _instance(cfg, rng)
    p0 = CONST_P_VALUES[trial % len(CONST_P_VALUES)]
    for pc in inst["pieces"]:
        pc["p"] = p0
    return inst, {"p0": p0}


def _eval_const_p(inst, params):
    f, p = load_instance(inst)
    ref = classical_lp(f, params["p0"])
    return [("CONST-P", "|ode-Lp|<=1e-12*Lp", abs(ode_value(f, p) - ref), 1e-12 * ref)], {}


register(Check("CONST-P", ("CONST-P",), _draw_const_p, _eval_const_p, {"CONST-P": 0.0}))


# --- running ----------------------------------------------------------------


def run_trial(check: Check, cfg: GenConfig, trial: int):
    """Draw and evaluate one trial; returns ``None`` when the draw does not apply."""
    drawn = check.draw(cfg, trial_rng(cfg.seed, trial, check.salt), trial)
    if drawn is None:
        return None
    inst, params = drawn
    try:
        items, notes = check.evaluate(inst, params)
    except (VarLpError, ArithmeticError) as exc:
        # failures are data: an evaluation error becomes a violation of every report
        items = [(r, f"error: {type(exc).__name__}: {exc}", math.inf, 0.0) for r in check.reports]
        notes = {}
    return inst, params, _unique_labels(items), notes


def _unique_labels(items: list[Item]) -> list[Item]:
    seen: dict[tuple[str, str], int] = {}
    out = []
    for rep, label, lhs, rhs in items:
        k = seen.get((rep, label), 0)
        seen[(rep, label)] = k + 1
        out.append((rep, label if k == 0 else f"{label}#{k}", lhs, rhs))
    return out


def _empty_reports(selected: Sequence[str], cfg: GenConfig) -> dict[str, CheckReport]:
    return {r: CheckReport(r, slack=check_for_report(r).slack_for(r), seed=cfg.seed) for r in selected}


def _run_range(cfg: GenConfig, selected: Sequence[str], start: int, stop: int) -> dict[str, CheckReport]:
    reports = _empty_reports(selected, cfg)
    checks = [c for c in REGISTRY.values() if any(r in reports for r in c.reports)]
    for trial in range(start, stop):
        for check in checks:
            mine = [r for r in check.reports if r in reports]
            for r in mine:
                reports[r].trials += 1
            out = run_trial(check, cfg, trial)
            if out is None:
                continue
            inst, params, items, notes = out
            for rep, label, lhs, rhs in items:
                if rep in reports:
                    reports[rep].record(lhs, rhs, trial, label, inst, params)
            for rep, n in notes.items():
                if rep in reports:
                    reports[rep].merge_notes(n)
    return reports


def _chunks(trials: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, trials))
    edges = [trials * i // parts for i in range(parts + 1)]
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def _run_chunk(args):
    return _run_range(*args)


def run_suite(cfg: GenConfig, trials: int, checks: Iterable[str] | None = None,
              jobs: int = 1) -> list[CheckReport]:
    """Run the selected checks over ``trials`` seeded trials; ``jobs > 1`` splits trials over processes.

    Partial reports merge order-independently, so the result does not depend on ``jobs``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    selected = resolve(checks)
    if jobs <= 1:
        parts = [_run_range(cfg, selected, 0, trials)]
    else:
        args = [(cfg, selected, a, b) for a, b in _chunks(trials, 4 * jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_run_chunk, args))
    out = []
    for name in selected:
        rep = parts[0][name]
        for part in parts[1:]:
            rep = rep.merge(part[name])
        rep.failures.sort(key=lambda w: (w.trial, w.label))
        out.append(rep)
    return out


def build_report(cfg: GenConfig, trials: int, reports: Sequence[CheckReport]) -> dict:
    witnesses = [w.to_dict() for r in reports for w in r.failures]
    witnesses += [r.worst.to_dict() for r in reports if r.worst is not None]
    return {
        "schema": SCHEMA,
        "config": {**cfg.to_dict(), "trials": trials, "checks": [r.name for r in reports]},
        "passed": all(r.passed for r in reports),
        "checks": [r.to_dict() for r in reports],
        "witnesses": witnesses,
    }


@dataclass(frozen=True)
class ReplayResult:
    witness: Witness
    lhs: float
    rhs: float
    margin: float
    violated: bool

    @property
    def reproduced(self) -> bool:
        w = self.witness
        return _same(self.lhs, w.lhs) and _same(self.rhs, w.rhs)


def _same(x: float, y: float) -> bool:
    return x == y or (math.isnan(x) and math.isnan(y)) or (math.isinf(x) and math.isinf(y))


def replay(report: dict, index: int) -> ReplayResult:
    if report.get("schema") != SCHEMA:
        raise ValueError(f"unsupported report schema {report.get('schema')!r}")
    ws = report.get("witnesses", [])
    if not 0 <= index < len(ws):
        raise IndexError(f"witness index {index} outside 0..{len(ws) - 1}")
    w = Witness.from_dict(ws[index])
    check = check_for_report(w.check)
    _, _, items, _ = _evaluate_witness(check, w)
    for rep, label, lhs, rhs in items:
        if rep == w.check and label == w.label:
            return ReplayResult(w, lhs, rhs, margin_of(lhs, rhs), violates(lhs, rhs, check.slack_for(rep)))
    raise KeyError(f"comparison {w.label!r} not produced on replay")


def _evaluate_witness(check: Check, w: Witness):
    items, notes = check.evaluate(w.instance, w.params)
    return w.instance, w.params, _unique_labels(items), notes
