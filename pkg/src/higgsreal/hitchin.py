"""Higgs fields of the Hitchin section and cyclic Higgs fields on the plane.

Matrix convention (columns are images of basis vectors, ``f[a, b]`` is the
``e_a`` component of ``f(e_b)``, 1-based in the comments):

* ``f[i+1, i] = i (r - i) / 2`` for ``i = 1 .. r-1``;
* ``f[i-j+1, i] = q_j`` for ``j = 2 .. r`` and ``i = j .. r``.

For ``r = 3`` this is ``[[0, q2, q3], [1, 0, q2], [0, 1, 0]]`` whose
characteristic polynomial is ``T^3 - 2 q2 T - q3``. The reversed-identity
pairing makes every such matrix symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
import sympy as sp

from .fields import CoefficientFunction, FieldError, HiggsChart, z
from .linalg import SymmetricPairing


class BuilderError(ValueError):
    pass


@dataclass(frozen=True)
class DifferentialTuple:
    r: int
    q: Mapping[int, CoefficientFunction]

    def __post_init__(self):
        if self.r < 2:
            raise BuilderError("rank must be at least 2")
        keys = set(self.q)
        if keys != set(range(2, self.r + 1)):
            raise BuilderError(f"differentials must be indexed by 2..{self.r}, got {sorted(keys)}")
        object.__setattr__(self, "q", {j: CoefficientFunction.of(v) for j, v in self.q.items()})


def antidiagonal_pairing(r: int) -> SymmetricPairing:
    return SymmetricPairing(np.fliplr(np.eye(r)).astype(complex))


def hitchin_matrix(q: DifferentialTuple) -> sp.Matrix:
    r = q.r
    f = sp.zeros(r, r)
    for i in range(1, r):
        f[i, i - 1] = sp.Rational(i * (r - i), 2)
    for j in range(2, r + 1):
        for i in range(j, r + 1):
            f[i - j, i - 1] = q.q[j].expr
    return f


def build_hitchin(q: DifferentialTuple | Mapping[int, object], r: int | None = None
                  ) -> tuple[HiggsChart, SymmetricPairing]:
    if not isinstance(q, DifferentialTuple):
        if r is None:
            r = max(q) if q else 2
        q = DifferentialTuple(r, dict(q))
    for c in q.q.values():
        if c.kind == "laurent":
            raise BuilderError("Hitchin differentials must be holomorphic on the plane")
    H = HiggsChart.from_matrix(hitchin_matrix(q))
    C = antidiagonal_pairing(q.r)
    _assert_self_adjoint(H, C)
    return H, C


def build_cyclic(q_r, r: int) -> tuple[HiggsChart, SymmetricPairing]:
    """Cyclic field ``e_k -> e_{k+1}`` closed by ``e_r -> q_r e_1``."""
    if r < 2:
        raise BuilderError("rank must be at least 2")
    q = CoefficientFunction.of(q_r)
    f = sp.zeros(r, r)
    for k in range(r - 1):
        f[k + 1, k] = 1
    f[0, r - 1] = q.expr
    H = HiggsChart.from_matrix(f)
    C = antidiagonal_pairing(r)
    _assert_self_adjoint(H, C)
    return H, C


def cyclic_det_nonzero(H: HiggsChart) -> bool:
    """``det theta`` is ``(-1)^(r-1) q_r``; generic regular semisimplicity needs it nonzero."""
    if H.exact:
        return sp.simplify(H.sympy_matrix().det()) != 0
    pts = np.linspace(-1, 1, 17) + 0.3j
    return bool(np.any(np.abs(np.linalg.det(H(pts))) > 1e-12))


def _assert_self_adjoint(H: HiggsChart, C: SymmetricPairing) -> None:
    J = sp.Matrix(np.real(C.gram).astype(int).tolist())
    f = H.sympy_matrix()
    d = (f.T * J - J * f).applyfunc(sp.expand)
    if not d.is_zero_matrix:
        raise BuilderError("field is not self-adjoint for the pairing")


def example1(alpha1, alpha2) -> HiggsChart:
    """Rank-3 field whose eigenvalues are ``alpha1``, ``alpha2``, ``-alpha1-alpha2``."""
    a1 = CoefficientFunction.of(alpha1).expr
    a2 = CoefficientFunction.of(alpha2).expr
    for a in (a1, a2):
        if _laurent_min(a) < 0:
            raise BuilderError("alphas must be polynomials")
    a3 = -a1 - a2
    for x, y in ((a1, a2), (a2, a3), (a3, a1)):
        if sp.expand(x - y) == 0:
            raise BuilderError("alpha_i - alpha_j must not vanish identically")
    q2 = sp.expand(-sp.Rational(1, 2) * (a1 * a2 + a2 * a3 + a3 * a1))
    q3 = sp.expand(a1 * a2 * a3)
    return build_hitchin({2: q2, 3: q3})[0]


def example1_alphas(alpha1, alpha2) -> tuple[sp.Expr, sp.Expr, sp.Expr]:
    a1 = CoefficientFunction.of(alpha1).expr
    a2 = CoefficientFunction.of(alpha2).expr
    return a1, a2, sp.expand(-a1 - a2)


def _laurent_min(e: sp.Expr) -> int:
    terms = CoefficientFunction.of(e)
    if not terms.exact:
        raise BuilderError("expected a polynomial")
    t = terms.terms()
    return min(t) if t else 0


def example2(beta) -> HiggsChart:
    b = CoefficientFunction.of(beta)
    if not b.exact or _laurent_min(b.expr) < 0:
        raise BuilderError("beta must be a polynomial")
    if not b.expr.has(z):
        raise BuilderError("beta must be non-constant")
    e = b.expr
    q2 = -sp.Rational(1, 2) * (1 - sp.Rational(4, 3) * e**2)
    q3 = -(sp.Rational(2, 3) * e - sp.Rational(16, 27) * e**3)
    return build_hitchin({2: sp.expand(q2), 3: sp.expand(q3)})[0]


def example3(a: complex) -> HiggsChart:
    a = sp.nsimplify(a)
    q2 = CoefficientFunction("sampled", a * z**2 * sp.sin(z))
    q3 = CoefficientFunction("sampled", (z + 1) ** 4 * sp.cos(z))
    return build_hitchin({2: q2, 3: q3})[0]


def parse_differentials(r: int, values: Mapping[int, str]) -> DifferentialTuple:
    try:
        return DifferentialTuple(r, {j: CoefficientFunction.of(v) for j, v in values.items()})
    except (sp.SympifyError, FieldError, TypeError) as exc:
        raise BuilderError(str(exc)) from exc
