"""Command-line entry point ``varlp``.  Exit codes: 0 pass, 1 violation, 2 usage or input error."""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import decompose, halfline, harness, rearrange
from .errors import VarLpError
from .instances import instance_dict, load_instance, read_json, write_json
from .luxemburg import DEFAULT_TOL, norm_mo, norm_nakano
from .modular import modular_mo, modular_nakano
from .ode_norm import norm_ode, phi_exact_step
from .scalars import constant_a, constant_bp, equivalence_constant

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def fmt(x: float) -> str:
    return f"{x:.15g}"


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two numbers lo,hi, got {text!r}")
    return vals[0], vals[1]


def cmd_norm(args) -> int:
    f, p = load_instance(args.input)
    if args.curve and args.method != "ode":
        raise UsageError("--curve is only available with --method ode")
    if args.method == "ode":
        res = norm_ode(f, p)
        if args.curve:
            curve = phi_exact_step(f, p)
            with open(args.curve, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["t", "phi"])
                for t, v in zip(curve.breakpoints, curve.phi):
                    w.writerow([fmt(t), fmt(v)])
    elif args.method == "nakano":
        res = norm_nakano(f, p, args.tol)
    else:
        res = norm_mo(f, p, args.tol)
    print(f"value={fmt(res.value)} iterations={res.iterations}")
    return EXIT_OK


def cmd_modular(args) -> int:
    f, p = load_instance(args.input)
    fn = modular_nakano if args.method == "nakano" else modular_mo
    print(fmt(fn(f, p, args.lam)))
    return EXIT_OK


def cmd_constants(args) -> int:
    print(f"a={fmt(constant_a())}")
    print(f"C1={fmt(equivalence_constant())}")
    if args.bp is not None:
        print(f"b_p={fmt(constant_bp(args.bp))}")
    return EXIT_OK


def cmd_rearrange(args) -> int:
    f, p = load_instance(args.input)
    if args.order == "random":
        sigma = rearrange.random_permutation(f.n, np.random.default_rng(args.seed))
        g, q = rearrange.permute(f, p, sigma)
    else:
        g, q = rearrange.sort_by_exponent(f, p, args.order)
    text = json.dumps(instance_dict(g, q), indent=2, sort_keys=True)
    if args.out:
        write_json(instance_dict(g, q), args.out)
    else:
        print(text)
    return EXIT_OK


def cmd_certify(args) -> int:
    f, p = load_instance(args.input)
    report = rearrange.certify_rearrangement(f, p, args.trials, args.seed)
    print(report.summary())
    for k in sorted(report.notes):
        print(f"  {k}={fmt(report.notes[k])}")
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _print_blocks(tag, f, p, part, spec, norm):
    vals = decompose.block_norms(f, p, part, spec, norm)
    for block, lv, e, v in zip(part.blocks, part.levels, spec.block_exponents, vals):
        print(f"{tag} block level={lv} pieces={sorted(block)} exponent={fmt(e)} norm={fmt(v)}")


def cmd_decompose(args) -> int:
    f, p = load_instance(args.input)
    res = decompose.level_comparisons(f, p, args.cuts, args.norm)
    c1 = equivalence_constant()
    low, up = res["lower_partition"], res["upper_partition"]
    _print_blocks("lower", f, p, low, decompose.level_chain_spec(low, args.cuts, "lower"), args.norm)
    _print_blocks("upper", f, p, up, decompose.level_chain_spec(up, args.cuts, "upper"), args.norm)
    print(f"norm={fmt(res['whole'])}")
    print(f"lower_chain={fmt(res['lower_chain'])}")
    print(f"upper_chain={fmt(res['upper_chain'])}")
    print(f"lower_chain_rn_variant={fmt(res['lower_chain_rn_variant'])} (reported, not certified)")
    ok = True
    for (label, lhs, rhs), chain in zip(res["comparisons"], ("lower", "upper")):
        good = not harness.violates(lhs, rhs, harness.SLACK)
        ok &= good
        print(f"{'PASS' if good else 'FAIL'} {chain}: {label} lhs={fmt(lhs)} rhs={fmt(rhs)} C1={fmt(c1)}")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_transform(args) -> int:
    if args.kind == "aux":
        f, p = load_instance(args.input)
        aux = rearrange.aux_transform(f, p)
        print(f"alpha={fmt(aux.alpha)}")
        print("tau,p_hat,phi_hat,slope")
        tau, phi = aux.curve_hat.breakpoints, aux.curve_hat.phi
        slopes = aux.slopes()
        for i, pv in enumerate(aux.p_hat.values):
            print(f"{fmt(tau[i + 1])},{fmt(pv)},{fmt(phi[i + 1])},{fmt(slopes[i])}")
        return EXIT_OK
    inst = halfline.load_halfline(args.input)
    report = halfline.verify_isometry(inst, args.refine)
    print(f"source_norm={fmt(report.notes['source_norm'])}")
    print("refine,discrepancy")
    for n, d in zip(report.notes["refines"], report.notes["discrepancies"]):
        print(f"{n},{fmt(d)}")
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_fuzz(args) -> int:
    kw = {"seed": args.seed, "max_pieces": args.max_pieces, "permutations": args.permutations}
    if args.p_range is not None:
        kw["p_range"] = args.p_range
    cfg = harness.GenConfig.extreme(**kw) if args.suite == "extreme" else harness.GenConfig(**kw)
    checks = [c for c in args.checks.split(",") if c.strip()] if args.checks else None
    try:
        reports = harness.run_suite(cfg, args.trials, checks, jobs=args.jobs)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    for r in reports:
        print(r.summary())
    doc = harness.build_report(cfg, args.trials, reports)
    if args.report:
        write_json(doc, args.report)
    print(f"{'PASS' if doc['passed'] else 'FAIL'} overall: checks={len(reports)} witnesses={len(doc['witnesses'])}")
    return EXIT_OK if doc["passed"] else EXIT_VIOLATION


def cmd_replay(args) -> int:
    try:
        res = harness.replay(read_json(args.report), args.index)
    except (IndexError, KeyError) as exc:
        raise UsageError(str(exc)) from None
    w = res.witness
    print(f"check={w.check} trial={w.trial} label={w.label}")
    print(f"lhs={fmt(res.lhs)} rhs={fmt(res.rhs)} margin={fmt(res.margin)}")
    print(f"stored_margin={fmt(w.margin)} reproduced={'yes' if res.reproduced else 'no'}")
    print("VIOLATION" if res.violated else "HOLDS")
    return EXIT_VIOLATION if res.violated else EXIT_OK


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="varlp", description="Variable-exponent Lebesgue norms on step functions.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("norm", help="Nakano, MO or ODE-determined norm of an instance")
    s.add_argument("--method", choices=["nakano", "mo", "ode"], required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--curve", help="write the accumulation curve as CSV (ode only)")
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("modular", help="modular value at a given lambda")
    s.add_argument("--method", choices=["nakano", "mo"], required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.set_defaults(func=cmd_modular)

    s = sub.add_parser("constants", help="print the constants a, 2(1+ae) and optionally b_p")
    s.add_argument("--bp", type=float)
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("rearrange", help="sort or randomly permute the pieces of an instance")
    s.add_argument("--input", required=True)
    s.add_argument("--order", choices=["inc", "dec", "random"], required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_rearrange)

    s = sub.add_parser("certify", help="certify rearrangement bounds on one instance")
    s.add_argument("kind", choices=["rearrange"])
    s.add_argument("--input", required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("decompose", help="cut-level decomposition chains")
    s.add_argument("--input", required=True)
    s.add_argument("--cuts", type=_floats, required=True)
    s.add_argument("--norm", choices=["nakano", "ode"], default="nakano")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("transform", help="auxiliary change of variables or half-line transform")
    s.add_argument("--kind", choices=["aux", "halfline"], required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--refine", type=int, default=64)
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("fuzz", help="run the certification suite")
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--checks", help="comma-separated check names (default: all)")
    s.add_argument("--report", help="write the JSON report here")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--suite", choices=["default", "extreme"], default="default")
    s.add_argument("--p-range", type=_pair)
    s.add_argument("--max-pieces", type=int, default=8)
    s.add_argument("--permutations", type=int, default=20)
    s.set_defaults(func=cmd_fuzz)

    s = sub.add_parser("replay", help="recompute one witness from a fuzz report")
    s.add_argument("--report", required=True)
    s.add_argument("--index", type=int, required=True)
    s.set_defaults(func=cmd_replay)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, VarLpError, ValueError, OSError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
