import math
from decimal import Decimal, getcontext

import pytest
from hypothesis import strategies as st

from varlp.stepfn import ExponentProfile, StepFunction, common_refinement

getcontext().prec = 50


@st.composite
def instances(draw, max_pieces=6, p_max=64.0, f_max=10.0, allow_zero=True, signed=False):
    n = draw(st.integers(1, max_pieces))
    lens = draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n))
    lo = -f_max if signed else 0.0
    vals = st.floats(lo, f_max) if allow_zero else st.floats(0.01, f_max)
    fv = draw(st.lists(vals, min_size=n, max_size=n))
    pv = draw(st.lists(st.floats(1.0, p_max), min_size=n, max_size=n))
    f = StepFunction.from_pieces(lens, fv)
    p = ExponentProfile.from_pieces(lens, pv)
    return common_refinement(f, p)


def dec_pow(x, y):
    """``x ** y`` in 50-digit decimal arithmetic."""
    x, y = Decimal(repr(float(x))), Decimal(repr(float(y)))
    if x == 0:
        return Decimal(0)
    return (y * x.ln()).exp()


def ode_oracle(lengths, fvals, pvals):
    """Per-piece closed form ``(phi^p + |f|^p len)^(1/p)`` in decimal arithmetic."""
    phi = Decimal(0)
    for ln, fv, pv in zip(lengths, fvals, pvals):
        if fv == 0:
            continue
        pd = Decimal(repr(float(pv)))
        acc = (pd * phi.ln()).exp() if phi != 0 else Decimal(0)
        acc += dec_pow(abs(fv), pv) * Decimal(repr(float(ln)))
        phi = (acc.ln() / pd).exp()
    return float(phi)


def bisect_norm(lengths, fvals, pvals, weights, iters=200):
    """Luxemburg norm by plain bisection on a decimal modular."""
    if all(v == 0 for v in fvals):
        return 0.0

    def mod(lam):
        lam = Decimal(repr(lam))
        s = Decimal(0)
        for ln, fv, pv, w in zip(lengths, fvals, pvals, weights):
            if fv:
                s += Decimal(repr(float(ln))) * Decimal(repr(float(w))) * dec_pow(abs(fv) / float(lam), pv)
        return s

    m = max(abs(v) for v in fvals)
    lo, hi = m * 1e-3, m * 10.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if mod(mid) <= 1:
            hi = mid
        else:
            lo = mid
    return hi


@pytest.fixture
def two_piece():
    f = StepFunction.from_pieces([0.5, 0.5], [1.0, 1.0])
    p = ExponentProfile.from_pieces([0.5, 0.5], [1.0, 2.0])
    return common_refinement(f, p)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion; lines are echoed in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
