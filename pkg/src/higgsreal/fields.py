"""Matrix-valued Higgs fields on a planar chart.

Entries are one-variable functions in the chart coordinate ``z``. Polynomial and
Laurent entries are exact sympy expressions; ``sampled`` entries are arbitrary
entire expressions (``sin``, ``cos`` ...) that are only ever evaluated numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import sympy as sp

z = sp.Symbol("z")

KINDS = ("polynomial", "laurent", "sampled")
CHARTS = ("plane", "puncture-0", "puncture-inf")


class FieldError(ValueError):
    pass


def _laurent_terms(expr: sp.Expr) -> dict[int, sp.Expr] | None:
    """Exponent -> coefficient map, or None if ``expr`` is not a Laurent polynomial in z."""
    expr = sp.expand(expr)
    if expr == 0:
        return {}
    out: dict[int, sp.Expr] = {}
    for term in sp.Add.make_args(expr):
        c, m = term.as_coeff_exponent(z)
        if c.has(z) or not m.is_Integer or not c.is_number:
            return None
        out[int(m)] = out.get(int(m), 0) + c
    return {k: v for k, v in out.items() if v != 0}


@dataclass(frozen=True)
class CoefficientFunction:
    kind: str
    expr: sp.Expr

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FieldError(f"unknown coefficient kind {self.kind!r}")
        e = sp.sympify(self.expr)
        if e.free_symbols - {z}:
            raise FieldError(f"coefficient depends on symbols other than z: {e}")
        if self.kind != "sampled":
            terms = _laurent_terms(e)
            if terms is None:
                raise FieldError(f"not a Laurent polynomial: {e}")
            if self.kind == "polynomial" and terms and min(terms) < 0:
                raise FieldError(f"negative power in polynomial entry: {e}")
            e = sp.expand(e)
        object.__setattr__(self, "expr", e)

    @classmethod
    def poly(cls, coeffs: Sequence) -> "CoefficientFunction":
        """Polynomial from ascending coefficients."""
        return cls("polynomial", sum(sp.nsimplify(c) * z**k for k, c in enumerate(coeffs)))

    @classmethod
    def of(cls, value) -> "CoefficientFunction":
        """Coerce numbers, strings and expressions into a coefficient function."""
        if isinstance(value, CoefficientFunction):
            return value
        e = sp.sympify(value, locals={"z": z})
        terms = _laurent_terms(e)
        if terms is None:
            return cls("sampled", e)
        kind = "laurent" if terms and min(terms) < 0 else "polynomial"
        return cls(kind, e)

    @property
    def exact(self) -> bool:
        return self.kind != "sampled"

    def terms(self) -> dict[int, sp.Expr]:
        if not self.exact:
            raise FieldError("sampled entries have no exact terms")
        return _laurent_terms(self.expr) or {}

    @cached_property
    def _fn(self):
        return sp.lambdify(z, self.expr, modules="numpy")

    def __call__(self, zz) -> np.ndarray:
        zz = np.asarray(zz, dtype=complex)
        return np.broadcast_to(np.asarray(self._fn(zz), dtype=complex), zz.shape).copy()

    def is_zero(self) -> bool:
        return sp.simplify(self.expr) == 0

    def to_json(self) -> dict:
        if self.exact:
            coeffs = []
            for k, c in sorted(self.terms().items()):
                coeffs.append([k, str(sp.re(c)), str(sp.im(c))])
            return {"kind": self.kind, "coeffs": coeffs}
        return {"kind": self.kind, "expr": str(self.expr)}

    @classmethod
    def from_json(cls, d: dict) -> "CoefficientFunction":
        kind = d.get("kind")
        if kind in ("polynomial", "laurent"):
            e = sum((sp.Rational(re) + sp.I * sp.Rational(im)) * z**int(k)
                    for k, re, im in d["coeffs"])
            return cls(kind, sp.sympify(e))
        if kind == "sampled":
            return cls("sampled", sp.sympify(d["expr"], locals={"z": z}))
        raise FieldError(f"bad coefficient record {d!r}")


@dataclass(frozen=True)
class HiggsChart:
    """``theta = f dz`` on a chart; ``entries[i][j]`` is ``f[i, j]``.

    For puncture charts the coordinate ``z`` vanishes at the puncture and the
    stored matrix is ``g`` with ``theta = g dz / z``.
    """

    entries: tuple[tuple[CoefficientFunction, ...], ...]
    chart: str = "plane"

    def __post_init__(self):
        ent = tuple(tuple(CoefficientFunction.of(e) for e in row) for row in self.entries)
        r = len(ent)
        if r == 0 or any(len(row) != r for row in ent):
            raise FieldError("Higgs field must be a non-empty square matrix")
        if self.chart not in CHARTS:
            raise FieldError(f"unknown chart {self.chart!r}")
        if self.chart != "plane" and not all(e.exact for row in ent for e in row):
            raise FieldError("puncture charts need Laurent entries")
        object.__setattr__(self, "entries", ent)

    @classmethod
    def from_matrix(cls, m, chart: str = "plane") -> "HiggsChart":
        if isinstance(m, sp.MatrixBase):
            rows = m.tolist()
        else:
            rows = [list(r) for r in m]
        return cls(tuple(tuple(CoefficientFunction.of(e) for e in row) for row in rows), chart)

    @property
    def rank(self) -> int:
        return len(self.entries)

    @property
    def exact(self) -> bool:
        return all(e.exact for row in self.entries for e in row)

    def sympy_matrix(self) -> sp.Matrix:
        return sp.Matrix([[e.expr for e in row] for row in self.entries])

    def __call__(self, zz) -> np.ndarray:
        """Evaluate the matrix at points; returns shape ``zz.shape + (r, r)``."""
        zz = np.asarray(zz, dtype=complex)
        r = self.rank
        out = np.empty(zz.shape + (r, r), dtype=complex)
        for i in range(r):
            for j in range(r):
                out[..., i, j] = self.entries[i][j](zz)
        return out

    def derivative(self) -> "HiggsChart":
        return HiggsChart.from_matrix(
            [[CoefficientFunction("sampled" if not e.exact else e.kind, sp.diff(e.expr, z))
              for e in row] for row in self.entries], self.chart)

    def is_constant(self) -> bool:
        return all(not e.expr.has(z) for row in self.entries for e in row)

    def to_json(self) -> dict:
        return {"rank": self.rank, "chart": self.chart,
                "entries": [[e.to_json() for e in row] for row in self.entries]}

    @classmethod
    def from_json(cls, d: dict) -> "HiggsChart":
        try:
            rows = d["entries"]
            chart = d.get("chart", "plane")
            out = cls(tuple(tuple(CoefficientFunction.from_json(e) for e in row) for row in rows), chart)
        except (KeyError, TypeError) as exc:
            raise FieldError(f"malformed Higgs chart: {exc}") from exc
        if "rank" in d and d["rank"] != out.rank:
            raise FieldError("declared rank does not match entries")
        return out


def to_puncture_chart(H: HiggsChart, at: complex | str) -> HiggsChart:
    """Rewrite ``theta = f dz`` near a puncture as ``g dw/w``.

    ``at='inf'`` uses ``w = 1/z`` so ``g(w) = -f(1/w)/w``; a finite point ``z0``
    uses ``w = z - z0`` so ``g(w) = w f(w + z0)``. The frame is kept; only
    eigenvalue data is used downstream, which is frame independent.
    """
    if H.chart != "plane":
        raise FieldError("expected a plane chart")
    if not H.exact:
        raise FieldError("puncture analysis needs exact entries")
    M = H.sympy_matrix()
    if at == "inf":
        g = (-M.subs(z, 1 / z) / z).applyfunc(sp.expand)
        chart = "puncture-inf"
    else:
        z0 = sp.nsimplify(at)
        g = (M.subs(z, z + z0) * z).applyfunc(sp.expand)
        chart = "puncture-0"
    return HiggsChart.from_matrix(g, chart)


def sample_points(n: int, rng: np.random.Generator, radius: float = 1.0) -> np.ndarray:
    return radius * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n))


def coefficient_list(values: Iterable) -> list[CoefficientFunction]:
    return [CoefficientFunction.of(v) for v in values]
