"""Rank-2 local model of filtered extensions at a puncture.

The model is ``V = O(*0) e1 + O(*0) e2`` with ``theta = diag(1, -1) dz`` and the
pairing ``C_m(e_i, e_i) = z^{m_i}``. Logarithmic lattices are

    V^(n)       = O z^{-n1} e1 + O z^{-n2} e2
    V^(n,alpha) = z V^(n) + O (alpha1 z^{-n1} e1 + alpha2 z^{-n2} e2)

and the filtered bundles built from them come in three families:

    typeN    (n; b)            P_c = z^{-[c-b]} V^(n)
    typeNA   (n, alpha; b)     P_c = z^{-[c-b]} V^(n,alpha)
    typeNAB  (n, alpha; b1, b2) with b1 - 1 < b2 < b1:
             P_c = z^{-k} V^(n,alpha) for k + b2 <= c < k + b1
             P_c = z^{-k} V^(n)       for k + b1 <= c < k + 1 + b2

Arithmetic is exact: ``b`` is a ``Fraction`` and ``alpha`` a pair of Gaussian
rationals (sympy numbers). Besides the closed-form compatibility conditions
this module carries an independent lattice-level oracle
(:func:`lattice_compatible`) that tests ``Psi_C(P_c) = (P^dual)_c`` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import sympy as sp

FAMILIES = ("typeN", "typeNA", "typeNAB")


class FilteredError(ValueError):
    pass


# ---------------------------------------------------------------- scalars

def gaussian(x) -> sp.Expr:
    """Exact Gaussian rational from a number or string; raises on anything else."""
    if isinstance(x, Fraction):
        return sp.Rational(x.numerator, x.denominator)
    e = sp.nsimplify(x) if isinstance(x, float) else sp.sympify(x)
    e = sp.expand(e)
    re, im = e.as_real_imag()
    if not (re.is_Rational and im.is_Rational):
        raise FilteredError(f"{x!r} is not a Gaussian rational")
    return re + sp.I * im


def rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise FilteredError("jumps must be given exactly (int, Fraction or 'p/q' string)")
    try:
        return Fraction(str(x).replace(" ", ""))
    except ValueError as exc:
        raise FilteredError(f"{x!r} is not a rational number") from exc


def _ceil(q: Fraction) -> int:
    return -math.floor(-q)


def normalize_alpha(alpha) -> tuple[sp.Expr, sp.Expr]:
    a1, a2 = (gaussian(a) for a in alpha)
    if a1 == 0 and a2 == 0:
        raise FilteredError("alpha must not be (0, 0)")
    if a1 != 0:
        return sp.Integer(1), sp.expand(a2 / a1)
    return sp.Integer(0), sp.Integer(1)


def _is_zero(x: sp.Expr) -> bool:
    return sp.expand(x) == 0


# ---------------------------------------------------------------- descriptors

@dataclass(frozen=True)
class FilteredLattice:
    family: str
    n: tuple[int, int]
    b: tuple[Fraction, ...]
    alpha: tuple[sp.Expr, sp.Expr] | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise FilteredError(f"unknown family {self.family!r}")
        n = tuple(int(v) for v in self.n)
        if len(n) != 2:
            raise FilteredError("n must be an integer pair")
        b = tuple(rational(v) for v in (self.b if isinstance(self.b, (tuple, list)) else (self.b,)))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "b", b)
        if self.family == "typeN":
            if self.alpha is not None:
                raise FilteredError("typeN carries no alpha")
            if len(b) != 1:
                raise FilteredError("typeN needs a single jump b")
        else:
            if self.alpha is None:
                raise FilteredError(f"{self.family} needs alpha")
            object.__setattr__(self, "alpha", normalize_alpha(self.alpha))
            if self.family == "typeNA" and len(b) != 1:
                raise FilteredError("typeNA needs a single jump b")
            if self.family == "typeNAB":
                if len(b) != 2:
                    raise FilteredError("typeNAB needs a jump pair (b1, b2)")
                if not (b[0] - 1 < b[1] < b[0]):
                    raise FilteredError("typeNAB needs b1 - 1 < b2 < b1")

    @classmethod
    def typeN(cls, n, b) -> "FilteredLattice":
        return cls("typeN", tuple(n), (rational(b),))

    @classmethod
    def typeNA(cls, n, alpha, b) -> "FilteredLattice":
        return cls("typeNA", tuple(n), (rational(b),), tuple(alpha))

    @classmethod
    def typeNAB(cls, n, alpha, b) -> "FilteredLattice":
        return cls("typeNAB", tuple(n), tuple(rational(v) for v in b), tuple(alpha))

    @property
    def jumps(self) -> tuple[Fraction, ...]:
        return self.b

    def to_json(self) -> dict:
        d = {"family": self.family, "n": list(self.n), "b": [str(v) for v in self.b]}
        if self.alpha is not None:
            d["alpha"] = [str(a) for a in self.alpha]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "FilteredLattice":
        try:
            fam = d["family"]
            b = d["b"]
            b = tuple(b) if isinstance(b, list) else (b,)
            alpha = d.get("alpha")
            return cls(fam, tuple(d["n"]), tuple(rational(v) for v in b),
                       None if alpha is None else tuple(alpha))
        except (KeyError, TypeError) as exc:
            raise FilteredError(f"malformed lattice description: {exc}") from exc


@dataclass(frozen=True)
class ModelPairing:
    m: tuple[int, int]

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        if len(m) != 2 or any(v not in (0, 1) for v in m):
            raise FilteredError("m must be a pair in {0, 1}^2")
        object.__setattr__(self, "m", m)

    @classmethod
    def parse(cls, text: str) -> "ModelPairing":
        try:
            return cls(tuple(int(v) for v in text.split(",")))
        except ValueError as exc:
            raise FilteredError(f"bad pairing spec {text!r}") from exc


def normalize(L: FilteredLattice) -> FilteredLattice:
    """Canonical representative.

    Degenerate ``alpha`` is removed (typeNA becomes typeN; typeNAB is rewritten
    so that ``alpha = (0, 1)``). Then the representative is shifted by a multiple
    of ``(1, 1)`` so that ``b`` lies in ``(-1, 0]``; for typeNAB the lower jump
    ``b2`` is the one placed in ``(-1, 0]``.
    """
    fam, (n1, n2), b, a = L.family, L.n, L.b, L.alpha
    if fam == "typeNA":
        if a[1] == 0:
            fam, n2, a = "typeN", n2 - 1, None
        elif a[0] == 0:
            fam, n1, a = "typeN", n1 - 1, None
    if fam == "typeNAB" and a[1] == 0:
        # P^{((n1,n2),(a1,0);(b1,b2))} = P^{((n1,n2-1),(0,a2);(b2,b1-1))}
        n2 -= 1
        a = (sp.Integer(0), sp.Integer(1))
        b = (b[1], b[0] - 1)
    key = b[-1]
    k = _ceil(key)
    b = tuple(v - k for v in b)
    n = (n1 - k, n2 - k)
    return FilteredLattice(fam, n, b, a)


def equal(L1: FilteredLattice, L2: FilteredLattice) -> bool:
    A, B = normalize(L1), normalize(L2)
    if A.family != B.family or A.n != B.n or A.b != B.b:
        return False
    if A.alpha is None:
        return True
    return all(_is_zero(x - y) for x, y in zip(A.alpha, B.alpha))


def dual_lattice(n, alpha) -> tuple[tuple[int, int], tuple[sp.Expr, sp.Expr]]:
    """``(V^(n,alpha))^dual = (V^dual)^(-n + (1,1), beta)`` with ``alpha . beta = 0``."""
    a1, a2 = normalize_alpha(alpha)
    beta = normalize_alpha((-a2, a1))
    return (1 - int(n[0]), 1 - int(n[1])), beta


# ---------------------------------------------------------------- lattice oracle
#
# A lattice is stored by a basis matrix whose entries are Laurent polynomials
# (dicts exponent -> coefficient); columns are the basis vectors in the frame
# (e1, e2) or the dual frame. Since V^(n,alpha) only depends on alpha up to
# scale, alpha is rescaled to Gaussian integers and every coefficient is a
# pair of Python ints (re, im), which keeps the arithmetic exact and cheap.

_ZERO = (0, 0)
_ONE = (1, 0)


def _gmul(p, q):
    return (p[0] * q[0] - p[1] * q[1], p[0] * q[1] + p[1] * q[0])


def _gadd(p, q):
    return (p[0] + q[0], p[1] + q[1])


def _gneg(p):
    return (-p[0], -p[1])


def _add(p: dict, q: dict) -> dict:
    out = dict(p)
    for k, v in q.items():
        s = _gadd(out.get(k, _ZERO), v)
        if s == _ZERO:
            out.pop(k, None)
        else:
            out[k] = s
    return out


def _mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for k1, v1 in p.items():
        for k2, v2 in q.items():
            k = k1 + k2
            s = _gadd(out.get(k, _ZERO), _gmul(v1, v2))
            if s == _ZERO:
                out.pop(k, None)
            else:
                out[k] = s
    return out


def _neg(p: dict) -> dict:
    return {k: _gneg(v) for k, v in p.items()}


def _matmul(A, B):
    r, s, t = len(A), len(B), len(B[0])
    out = []
    for i in range(r):
        row = []
        for j in range(t):
            acc: dict = {}
            for k in range(s):
                if A[i][k] and B[k][j]:
                    acc = _add(acc, _mul(A[i][k], B[k][j]))
            row.append(acc)
        out.append(row)
    return out


def _transpose(A):
    return [list(col) for col in zip(*A)]


def _shift(A, k: int):
    """Multiply every entry by ``z^k``."""
    return [[{e + k: v for e, v in p.items()} for p in row] for row in A]


def _val(p: dict) -> float:
    return min(p) if p else math.inf


def _alpha_int(alpha):
    """Projectively normalized alpha rescaled to a pair of Gaussian integers."""
    if alpha is None:
        return None
    parts = []
    for a in normalize_alpha(alpha):
        re, im = sp.Rational(sp.re(a)), sp.Rational(sp.im(a))
        parts.append((re, im))
    den = math.lcm(*(int(x.q) for pr in parts for x in pr))
    return tuple((int(re * den), int(im * den)) for re, im in parts)


def base_lattice(n) -> list:
    return [[{-n[0]: _ONE}, {}], [{}, {-n[1]: _ONE}]]


def alpha_lattice(n, ag) -> list:
    """Basis of ``V^(n,alpha)`` for alpha given as Gaussian-integer pairs."""
    a1, a2 = ag
    n1, n2 = n
    if a1 != _ZERO:
        v = [{-n1: a1}, {-n2: a2} if a2 != _ZERO else {}]
        w = [{}, {1 - n2: _ONE}]
    else:
        v = [{}, {-n2: a2}]
        w = [{1 - n1: _ONE}, {}]
    return [[v[0], w[0]], [v[1], w[1]]]


def _scale(values) -> tuple[list[int], int]:
    """Rationals as integers over a common denominator ``D``."""
    values = [rational(v) for v in values]
    D = math.lcm(*(v.denominator for v in values))
    return [int(v * D) for v in values], D


def _basis_fn(family: str, n, ag, b: list[int], D: int):
    """``c -> basis of P_c`` with ``c`` and the jumps ``b`` in units of ``1/D``."""
    if family == "typeN":
        B = base_lattice(n)
        return lambda c: _shift(B, -((c - b[0]) // D))
    A = alpha_lattice(n, ag)
    if family == "typeNA":
        return lambda c: _shift(A, -((c - b[0]) // D))
    B = base_lattice(n)
    b1, b2 = b

    def at(c):
        k = (c - b2) // D
        return _shift(A, -k) if c < k * D + b1 else _shift(B, -k)
    return at


def lattice_at(L: FilteredLattice, c) -> list:
    """Basis matrix of ``P_c`` (exact ``c``)."""
    vals, D = _scale(list(L.b) + [c])
    return _basis_fn(L.family, L.n, _alpha_int(L.alpha), vals[:-1], D)(vals[-1])


def _nullspace_nonzero(rows: list[list]) -> bool:
    """Whether the linear conditions ``sum_i x_i rows[j][i] = 0`` have a nonzero solution."""
    if not rows:
        return True
    width = len(rows[0])
    if width == 1:
        return all(r[0] == _ZERO for r in rows)
    if width == 2:
        return all(_gadd(_gmul(p[0], q[1]), _gneg(_gmul(p[1], q[0]))) == _ZERO
                   for p in rows for q in rows)
    M = sp.Matrix([[v[0] + sp.I * v[1] for v in r] for r in rows])
    return M.rank() < width


def _pairing_matrix(m, r: int = 2) -> list:
    return [[{m[i]: _ONE} if i == j else {} for j in range(r)] for i in range(r)]


def lattice_compatible(jumps: list[int], D: int, basis_at, m) -> tuple[bool, str]:
    """Exact test that ``Psi_C`` maps the filtration onto its dual filtration.

    Values are integers in units of ``1/D``. ``basis_at(c)`` returns the basis
    matrix of ``P_c``; ``jumps`` are the jump values within one period; ``m`` gives ``C(e_i, e_i) = z^{m_i}``. The dual is
    ``(P^dual)_c = {phi : phi(P_a) in z^{-[a+c]} O for all a}``. For every
    breakpoint ``c`` of either side the test checks

    1. ``C(P_c, P_a) in z^{-[a+c]} O`` at every jump ``a`` (image inside the dual);
    2. no ``phi`` in ``z^{-1} Psi(P_c)`` outside ``Psi(P_c)`` lies in the dual,
       which for lattices ``M`` inside ``N`` is equivalent to ``M = N``.
    """
    jumps = sorted(set(jumps))
    cache: dict = {}

    def basis(c):
        if c not in cache:
            cache[c] = basis_at(c)
        return cache[c]

    r = len(basis(jumps[0]))
    Cm = _pairing_matrix(m, r)
    cs = sorted({j % D for j in jumps} | {(-j) % D for j in jumps})
    for c in cs:
        Bc = basis(c)
        left = _transpose(_matmul(Cm, Bc))          # rows: Psi(basis vectors) as row functionals
        conditions = []
        for a in jumps:
            Ba = basis(a)
            G = _matmul(left, Ba)                   # G[i][j] = C(Bc_i, Ba_j)
            bound = -((a + c) // D)
            for i in range(r):
                for j in range(r):
                    if _val(G[i][j]) < bound:
                        return False, (f"C(P_{Fraction(c, D)}, P_{Fraction(a, D)}) "
                                       f"not inside z^{bound} O")
            # phi = z^{-1} x^T Psi(Bc): the z^{bound} coefficients of x^T G must vanish
            for j in range(r):
                conditions.append([G[i][j].get(bound, _ZERO) for i in range(r)])
        if _nullspace_nonzero(conditions):
            return False, f"dual filtration strictly larger than the image at c = {Fraction(c, D)}"
    return True, "image equals dual at every breakpoint"


def brute_force_compatible(L: FilteredLattice, P: ModelPairing) -> bool:
    ok, _ = lattice_certificate(L, P)
    return ok


def lattice_certificate(L: FilteredLattice, P: ModelPairing) -> tuple[bool, str]:
    b, D = _scale(L.b)
    return lattice_compatible(b, D, _basis_fn(L.family, L.n, _alpha_int(L.alpha), b, D), P.m)


def lattices_equal(A: list, B: list) -> bool:
    """Whether two basis matrices (rank 2) span the same lattice."""
    return _contains(A, B) and _contains(B, A)


def _contains(A: list, B: list) -> bool:
    """``span(B) in span(A)`` via ``adj(A) B / det(A)``; model lattices have monomial determinants."""
    det = _add(_mul(A[0][0], A[1][1]), _neg(_mul(A[0][1], A[1][0])))
    if len(det) != 1:
        raise FilteredError("basis determinant is not a monomial")
    adj = [[A[1][1], _neg(A[0][1])], [_neg(A[1][0]), A[0][0]]]
    X = _matmul(adj, B)
    dv = _val(det)
    return all(_val(x) >= dv for row in X for x in row)


def filtrations_equal(L1: FilteredLattice, L2: FilteredLattice) -> bool:
    """Lattice-level equality of two filtered bundles at all breakpoints of one period."""
    cs = sorted({j - math.floor(j) for j in L1.jumps + L2.jumps})
    cs = sorted(set(cs) | {c + 1 for c in cs} | {c - 1 for c in cs})
    return all(lattices_equal(lattice_at(L1, c), lattice_at(L2, c)) for c in cs)


# ---------------------------------------------------------------- classification

@dataclass
class Certificate:
    case: str
    compatible: bool
    checks: list[dict] = field(default_factory=list)

    def add(self, what: str, lhs, rhs, ok: bool):
        self.checks.append({"check": what, "lhs": str(lhs), "rhs": str(rhs), "ok": bool(ok)})

    def to_json(self) -> dict:
        return {"case": self.case, "compatible": self.compatible, "checks": self.checks}


def _half(m: int) -> Fraction:
    return Fraction(m, 2)


def is_compatible_with(L: FilteredLattice, P: ModelPairing) -> tuple[bool, Certificate]:
    """Closed-form compatibility conditions, evaluated exactly, with the checks recorded."""
    L = normalize(L)
    (n1, n2), (m1, m2) = L.n, P.m
    s1, s2 = n1 - _half(m1), n2 - _half(m2)
    if L.family == "typeN":
        cert = Certificate("I", False)
        b = L.b[0]
        cert.add("n1 - m1/2 = b", s1, b, s1 == b)
        cert.add("n2 - m2/2 = b", s2, b, s2 == b)
    elif L.family == "typeNA":
        cert = Certificate("II", False)
        b = L.b[0]
        a1, a2 = L.alpha
        q = sp.expand(a1**2 + a2**2)
        cert.add("n1 - m1/2 = b + 1/2", s1, b + Fraction(1, 2), s1 == b + Fraction(1, 2))
        cert.add("n2 - m2/2 = b + 1/2", s2, b + Fraction(1, 2), s2 == b + Fraction(1, 2))
        cert.add("alpha1^2 + alpha2^2 = 0", q, 0, q == 0)
    elif L.alpha[0] != 0:
        cert = Certificate("III-1", False)
        b1, b2 = L.b
        a1, a2 = L.alpha
        q = sp.expand(a1**2 + a2**2)
        mid = (b1 + b2) / 2
        cert.add("n1 - m1/2 = (b1 + b2)/2", s1, mid, s1 == mid)
        cert.add("n2 - m2/2 = (b1 + b2)/2", s2, mid, s2 == mid)
        cert.add("alpha1^2 + alpha2^2 = 0", q, 0, q == 0)
    else:
        cert = Certificate("III-2", False)
        b1, b2 = L.b
        cert.add("n1 - m1/2 = b1", s1, b1, s1 == b1)
        cert.add("n2 - m2/2 = b2", s2, b2, s2 == b2)
    cert.compatible = all(c["ok"] for c in cert.checks)
    return cert.compatible, cert


@dataclass
class ParameterFamily:
    """typeNAB lattices ``(n, alpha; (-t - m, t))`` for ``t`` in an open interval."""

    n: tuple[int, int]
    alpha: tuple[sp.Expr, sp.Expr]
    m: int
    lower: Fraction
    upper: Fraction

    def member(self, t) -> FilteredLattice:
        t = rational(t)
        if not (self.lower < t < self.upper):
            raise FilteredError(f"parameter {t} outside ({self.lower}, {self.upper})")
        return FilteredLattice.typeNAB(self.n, self.alpha, (-t - self.m, t))

    def contains(self, L: FilteredLattice) -> bool:
        L = normalize(L)
        if L.family != "typeNAB" or L.n != self.n:
            return False
        if not all(_is_zero(x - y) for x, y in zip(L.alpha, self.alpha)):
            return False
        b1, b2 = L.b
        return self.lower < b2 < self.upper and b1 == -b2 - self.m

    def to_json(self) -> dict:
        return {"n": list(self.n), "alpha": [str(a) for a in self.alpha],
                "parameter": "b2", "interval": [str(self.lower), str(self.upper)],
                "interval_open": True, "b1": f"-b2 - {self.m}"}


@dataclass
class CompatibleFamilies:
    m: tuple[int, int]
    type_I: list[FilteredLattice]
    type_II: list[FilteredLattice]
    type_III_1: list[ParameterFamily]
    type_III_2: list[FilteredLattice]

    def contains(self, L: FilteredLattice) -> bool:
        singles = self.type_I + self.type_II + self.type_III_2
        return any(equal(L, S) for S in singles) or any(F.contains(L) for F in self.type_III_1)

    def to_json(self) -> dict:
        return {"m": list(self.m),
                "type_I": [normalize(L).to_json() for L in self.type_I],
                "type_II": [normalize(L).to_json() for L in self.type_II],
                "type_III_1": [F.to_json() for F in self.type_III_1],
                "type_III_2": [normalize(L).to_json() for L in self.type_III_2]}


def enumerate_compatible(P: ModelPairing) -> CompatibleFamilies:
    """All filtered bundles of the local model compatible with ``C_m``, up to equality."""
    m1, m2 = P.m
    I = sp.I
    if m1 == m2:
        m = m1
        t1 = [normalize(FilteredLattice.typeN((0, 0), Fraction(-m, 2)))]
        t2 = [normalize(FilteredLattice.typeNA((0, 0), (1, s * I), Fraction(-(1 + m), 2)))
              for s in (1, -1)]
        t31 = [ParameterFamily((0, 0), (sp.Integer(1), s * I), m,
                               Fraction(-(m + 1), 2), Fraction(-m, 2)) for s in (1, -1)]
        return CompatibleFamilies(P.m, t1, t2, t31, [])
    # n_i - m_i/2 = b_i together with b1 - 1 < b2 < b1 fixes n up to the diagonal shift
    for n2 in range(-2, 3):
        for n1 in range(-2, 3):
            b1, b2 = n1 - _half(m1), n2 - _half(m2)
            if b1 - 1 < b2 < b1:
                L = normalize(FilteredLattice.typeNAB((n1, n2), (0, 1), (b1, b2)))
                return CompatibleFamilies(P.m, [], [], [], [L])
    raise AssertionError("unreachable: m1 != m2 always admits a type III-2 solution")


def classify_intermediate(n, alpha=None) -> dict:
    """Logarithmic lattices strictly between ``zV^(n)`` and ``V^(n)``, or between
    ``zV^(n,alpha)`` and ``V^(n,alpha)`` when ``alpha`` is given.

    For the second sandwich the candidates are the lines of ``V^(n,alpha)/z`` that
    the residue of ``theta`` preserves; they are computed, not tabulated.
    """
    n = (int(n[0]), int(n[1]))
    if alpha is None:
        return {"outer": {"family": "V^(n)", "n": list(n)},
                "inner": {"family": "zV^(n)", "n": [n[0] - 1, n[1] - 1]},
                "intermediate": {"family": "V^(n,alpha)", "n": list(n),
                                 "alpha": "any point of P^1"}}
    a1, a2 = normalize_alpha(alpha)
    if a1 == 0 or a2 == 0:
        p = (n[0] - 1, n[1]) if a1 == 0 else (n[0], n[1] - 1)
        out = classify_intermediate(p)
        out["note"] = f"V^(n,alpha) equals V^{p} for this alpha"
        return out
    # basis of V^(n,alpha)/z: v = alpha-vector, w = z^{1-n2} e2
    # z diag(1,-1) v = z v - 2 alpha2 w,  z diag(1,-1) w = z w
    res = sp.Matrix([[0, 0], [-2 * a2, 0]])
    lines = []
    for vec in res.eigenvects():
        for v in vec[2]:
            lines.append([sp.simplify(x) for x in v])
    found = []
    for x, y in lines:
        if x == 0:
            found.append({"family": "zV^(n)", "n": [n[0] - 1, n[1] - 1]})
        else:
            found.append({"family": "line", "coords": [str(x), str(y)]})
    return {"outer": {"family": "V^(n,alpha)", "n": list(n), "alpha": [str(a1), str(a2)]},
            "inner": {"family": "zV^(n,alpha)"},
            "residue_nilpotent": bool((res * res).is_zero_matrix and not res.is_zero_matrix),
            "intermediate": found}


# ---------------------------------------------------------------- rank one

@dataclass
class RankOneReport:
    perfect: bool
    degree: Fraction             # local degree of P_* relative to the frame e
    normalized_degree: Fraction  # degree relative to a C-unit frame, 0 iff perfect

    def to_json(self) -> dict:
        return {"perfect": self.perfect, "degree": str(self.degree),
                "normalized_degree": str(self.normalized_degree)}


def rank1_perfectness(b, k: int) -> RankOneReport:
    """``P_c = z^{-[c-b]} e`` with ``C(e, e) = z^k``.

    The dual filtration is ``z^{-[c+b]} e^dual`` and ``Psi_C`` multiplies by
    ``z^k``, so ``C`` is perfect iff ``[c-b] - k = [c+b]`` for all ``c``,
    i.e. ``2b = -k``. The local degree is ``deg P_0 - sum a dim Gr_a`` over
    ``a`` in ``(-1, 0]``, which equals ``-b``.
    """
    b = rational(b)
    k = int(k)
    a0 = b - _ceil(b)                       # the jump in (-1, 0]
    deg = Fraction(math.floor(-b)) - a0     # P_0 = z^{-[-b]} O e has degree [-b]
    return RankOneReport(2 * b == -k, deg, deg - Fraction(k, 2))


def rank1_oracle(b, k: int) -> bool:
    b = rational(b)
    (bi,), D = _scale([b])
    return lattice_compatible([bi], D, lambda c: [[{-((c - bi) // D): _ONE}]], (k,))[0]


# ---------------------------------------------------------------- brute force

def brute_force_grid(n_range=range(-3, 4), max_den: int = 8, omegas=None):
    """Raw descriptors ``(family, n, alpha, b)`` of the search grid.

    Every family with ``b`` (typeNAB: ``b1``) in ``(-1, 0]`` with denominator at
    most ``max_den``, typeNAB ``b2`` on the same denominators in ``(b1 - 1, b1)``,
    and ``alpha`` in ``{(1, w)} + {(0, 1)}``.
    """
    if omegas is None:
        I = sp.I
        omegas = [0, 1, -1, I, -I, 2, 1 + I, I / 2, sp.Rational(1, 3) - I]
    alphas = [(sp.Integer(1), gaussian(w)) for w in omegas] + [(sp.Integer(0), sp.Integer(1))]
    bs = sorted({Fraction(p, q) for q in range(1, max_den + 1) for p in range(-q + 1, 1)})
    for n in product(n_range, n_range):
        for b in bs:
            yield "typeN", n, None, (b,)
            for a in alphas:
                yield "typeNA", n, a, (b,)
        for b1 in bs:
            for b2 in bs:
                cand = b2 if b2 < b1 else b2 - 1
                if b1 - 1 < cand < b1:
                    for a in alphas:
                        yield "typeNAB", n, a, (b1, cand)


def brute_force_search(P: ModelPairing, **grid_kw) -> list[FilteredLattice]:
    """Every grid descriptor that the lattice oracle declares compatible with ``P``."""
    found = []
    qq: dict = {}
    for fam, n, a, b in brute_force_grid(**grid_kw):
        if a is not None and a not in qq:
            qq[a] = _alpha_int(a)
        bi, D = _scale(b)
        ok, _ = lattice_compatible(bi, D, _basis_fn(fam, n, qq.get(a), bi, D), P.m)
        if ok:
            found.append(FilteredLattice(fam, n, b, a))
    return found
