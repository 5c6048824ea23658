"""JSON and CSV serialization.

Evolution files look like::

    {"kind": "piecewise_linear",
     "breakpoints": [0.0, 0.5, 1.0],
     "matrices": [[[...], ...], ...]}

``breakpoints`` may be omitted for ``"convex"`` (it is then [0, 1]).
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import InputError
from .evolution import KINDS, Evolution, make_convex, make_piecewise_linear, make_sampled_grid

__all__ = [
    "evolution_from_dict",
    "evolution_to_dict",
    "load_evolution",
    "save_evolution",
    "to_jsonable",
    "dumps_json",
    "format_csv",
]


class ParseError(InputError):
    pass


def evolution_from_dict(d) -> Evolution:
    if not isinstance(d, dict):
        raise ParseError("evolution must be a JSON object")
    kind = d.get("kind")
    if kind not in KINDS:
        raise ParseError(f"'kind' must be one of {KINDS}, got {kind!r}")
    mats = d.get("matrices")
    if not isinstance(mats, list) or not mats:
        raise ParseError("'matrices' must be a non-empty list of matrices")
    try:
        mats = [np.array(m, dtype=np.float64) for m in mats]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad matrix data: {exc}") from None
    bp = d.get("breakpoints")
    if kind == "convex":
        if len(mats) != 2:
            raise ParseError("a convex evolution has exactly two matrices")
        if bp is not None and list(map(float, bp)) != [0.0, 1.0]:
            raise ParseError("convex breakpoints are implicitly [0, 1]")
        return make_convex(*mats)
    if bp is None:
        raise ParseError(f"'breakpoints' is required for kind {kind!r}")
    if kind == "piecewise_linear":
        return make_piecewise_linear(zip(bp, mats))
    return make_sampled_grid(bp, mats)


def evolution_to_dict(E: Evolution) -> dict:
    d = {"kind": E.kind}
    if E.kind != "convex":
        d["breakpoints"] = E.breakpoints.tolist()
    d["matrices"] = E.stack.tolist()
    return d


def load_evolution(path) -> Evolution:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    return evolution_from_dict(d)


def save_evolution(E: Evolution, path) -> None:
    Path(path).write_text(json.dumps(evolution_to_dict(E)) + "\n")


def to_jsonable(x):
    """Recursively convert numpy values; non-finite floats become None."""
    if hasattr(x, "to_dict"):
        return to_jsonable(x.to_dict())
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def format_csv(rows) -> str:
    """CSV text; floats with 17 significant digits, ``None`` as an empty cell."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()
