"""Deterministic JSON/CSV emission and the on-disk formats of fields and pairings."""

from __future__ import annotations

import json
import math
import os
import tempfile
from fractions import Fraction

import numpy as np
import sympy as sp

from .fields import FieldError, HiggsChart
from .hitchin import antidiagonal_pairing
from .linalg import LinalgError, SymmetricPairing


def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    # keep floats recognizable as floats
    if "." not in s and "e" not in s:
        s += ".0"
    return s


def _enc(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _enc({"re": obj.real, "im": obj.imag}, indent, level)
    if isinstance(obj, (str, Fraction, sp.Basic)):
        return json.dumps(str(obj))
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + _enc(v, indent, level + 1) for k, v in obj.items()]
        return "{" + pad + (sep + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # rows of scalars stay on one line
        if all(v is None or isinstance(v, (int, float, str, Fraction, np.number)) for v in obj):
            return "[" + ", ".join(_enc(v, 0, 0) for v in obj) + "]"
        items = [_enc(v, indent, level + 1) for v in obj]
        return "[" + pad + (sep + pad).join(items) + end + "]"
    if hasattr(obj, "to_json"):
        return _enc(obj.to_json(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 1) -> str:
    """JSON text with floats at 17 significant digits; key order is preserved."""
    return _enc(obj, indent, 0) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(columns: list[str], rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_num(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def pairing_to_json(C: SymmetricPairing) -> dict:
    return {"dim": C.dim, "re": C.gram.real.tolist(), "im": C.gram.imag.tolist()}


def pairing_from_json(d: dict) -> SymmetricPairing:
    try:
        g = np.array(d["re"], dtype=float) + 1j * np.array(d["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FieldError(f"malformed pairing record: {exc}") from exc
    if "dim" in d and g.shape != (d["dim"], d["dim"]):
        raise FieldError("pairing dimension does not match its matrix")
    try:
        return SymmetricPairing(g)
    except LinalgError as exc:
        raise FieldError(str(exc)) from exc


def field_to_json(H: HiggsChart, C: SymmetricPairing | None) -> dict:
    d = H.to_json()
    if C is not None:
        d["pairing"] = pairing_to_json(C)
    return d


def field_from_json(d: dict) -> tuple[HiggsChart, SymmetricPairing]:
    """A Higgs chart record; the pairing defaults to the anti-diagonal one."""
    H = HiggsChart.from_json(d)
    C = pairing_from_json(d["pairing"]) if "pairing" in d else antidiagonal_pairing(H.rank)
    if C.dim != H.rank:
        raise FieldError("pairing and field have different rank")
    return H, C
