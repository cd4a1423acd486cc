"""Certification reports: each check records ``lhs <= rhs`` comparisons.

The margin of a comparison is ``rhs / lhs`` (``inf`` when ``lhs == 0``); a
comparison fails when ``lhs > rhs * (1 + slack)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


def margin_of(lhs: float, rhs: float) -> float:
    if lhs <= 0.0:
        return math.inf
    return rhs / lhs


def violates(lhs: float, rhs: float, slack: float) -> bool:
    return lhs > rhs * (1.0 + slack) if rhs >= 0 else lhs > rhs * (1.0 - slack)


def _num(x: float):
    # JSON has no inf/nan
    return x if math.isfinite(x) else None


@dataclass
class Witness:
    check: str
    trial: int
    lhs: float
    rhs: float
    margin: float
    label: str = ""
    instance: dict | None = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "trial": self.trial,
            "label": self.label,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "margin": _num(self.margin),
            "instance": self.instance,
            "params": self.params,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Witness":
        def back(x):
            return math.inf if x is None else x

        return cls(d["check"], d["trial"], back(d["lhs"]), back(d["rhs"]), back(d["margin"]),
                   d.get("label", ""), d.get("instance"), d.get("params", {}))


@dataclass
class CheckReport:
    name: str
    slack: float = 1e-9
    seed: int | None = None
    trials: int = 0
    comparisons: int = 0
    failures: list[Witness] = field(default_factory=list)
    worst: Witness | None = None
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def worst_margin(self) -> float:
        return self.worst.margin if self.worst is not None else math.inf

    def record(self, lhs: float, rhs: float, trial: int = 0, label: str = "",
               instance: dict | None = None, params: dict | None = None) -> bool:
        """Add one comparison; returns True when it holds."""
        self.comparisons += 1
        m = margin_of(lhs, rhs)
        bad = violates(lhs, rhs, self.slack)
        if bad or self.worst is None or (m, trial) < (self.worst.margin, self.worst.trial):
            w = Witness(self.name, trial, lhs, rhs, m, label, instance, dict(params or {}))
            if bad:
                self.failures.append(w)
            if self.worst is None or (m, trial) < (self.worst.margin, self.worst.trial):
                self.worst = w
        return not bad

    def merge(self, other: "CheckReport") -> "CheckReport":
        """Order-independent union of two partial reports of the same check."""
        out = CheckReport(self.name, self.slack, self.seed, self.trials + other.trials,
                          self.comparisons + other.comparisons)
        out.failures = sorted(self.failures + other.failures, key=lambda w: (w.trial, w.label))
        cands = [w for w in (self.worst, other.worst) if w is not None]
        out.worst = min(cands, key=lambda w: (w.margin, w.trial)) if cands else None
        out.notes = _merge_notes(self.notes, other.notes)
        return out

    def merge_notes(self, notes: dict) -> None:
        self.notes = _merge_notes(self.notes, notes)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "trials": self.trials,
            "comparisons": self.comparisons,
            "slack": self.slack,
            "seed": self.seed,
            "worst_margin": _num(self.worst_margin),
            "worst": self.worst.to_dict() if self.worst else None,
            "failures": [w.to_dict() for w in self.failures],
            "notes": self.notes,
        }

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        wm = self.worst_margin
        wm_s = "inf" if math.isinf(wm) else f"{wm:.6g}"
        return (f"{status} {self.name}: trials={self.trials} comparisons={self.comparisons} "
                f"failures={len(self.failures)} worst_margin={wm_s}")


def _merge_notes(a: dict, b: dict, mode: str | None = None) -> dict:
    """Combine note dicts; ``max_*``, ``min_*`` and ``sum_*`` keys (and their sub-dicts) reduce."""
    out = dict(a)
    for k, v in b.items():
        m = next((t for t in ("max", "min", "sum") if k.startswith(t + "_")), mode)
        if k not in out:
            out[k] = v
        elif isinstance(v, dict) and isinstance(out[k], dict):
            out[k] = _merge_notes(out[k], v, m)
        elif m == "max":
            out[k] = max(out[k], v)
        elif m == "min":
            out[k] = min(out[k], v)
        elif m == "sum":
            out[k] = out[k] + v
        else:
            out[k] = v
    return out
