"""Instance files: ``{"pieces": [{"len": .., "f": .., "p": ..}, ...]}``.

Lengths must sum to 1 within 1e-9 and are rescaled to sum exactly to 1;
``p`` defaults to 1.  ``f`` and ``p`` come back on one shared grid, one
piece per (non-empty) file entry, so piece indices match the file.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import InstanceFormatError
from .stepfn import ExponentProfile, StepFunction, common_refinement

UNIT_SUM_TOL = 1e-9


def _pieces(data) -> list[dict]:
    if not isinstance(data, dict) or not isinstance(data.get("pieces"), list) or not data["pieces"]:
        raise InstanceFormatError('instance must be an object with a non-empty "pieces" list')
    return data["pieces"]


def read_json(src) -> dict:
    if isinstance(src, (dict, list)):
        return src
    with open(src, encoding="utf-8") as fh:
        return json.load(fh)


def load_instance(src) -> tuple[StepFunction, ExponentProfile]:
    """Parse an instance (path or already-decoded dict)."""
    pieces = _pieces(read_json(src))
    try:
        lens = [float(pc["len"]) for pc in pieces]
        fvals = [float(pc["f"]) for pc in pieces]
        pvals = [float(pc.get("p", 1.0)) for pc in pieces]
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"bad piece entry: {exc}") from None
    total = math.fsum(lens)
    if abs(total - 1.0) > UNIT_SUM_TOL:
        raise InstanceFormatError(f"piece lengths sum to {total!r}, not 1")
    keep = [i for i, ln in enumerate(lens) if ln > 0]
    if any(ln < 0 for ln in lens):
        raise InstanceFormatError("negative piece length")
    lens = [lens[i] for i in keep]
    f = StepFunction.from_pieces(lens, [fvals[i] for i in keep])
    p = ExponentProfile.from_pieces(lens, [pvals[i] for i in keep])
    return common_refinement(f, p)


def instance_dict(f: StepFunction, p: StepFunction) -> dict:
    f, p = common_refinement(f, p)
    return {
        "pieces": [
            {"len": ln, "f": fv, "p": pv} for ln, fv, pv in zip(f.lengths, f.values, p.values)
        ]
    }


def write_json(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
