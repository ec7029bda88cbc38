"""Spectral data of a one-variable Higgs field: characteristic polynomial,
discriminant, regular semisimplicity on the chart and at a puncture."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np
import sympy as sp

from .fields import CoefficientFunction, FieldError, HiggsChart, to_puncture_chart, z
from .puiseux import (PuiseuxBranch, PuiseuxError, puiseux_roots, ramification,
                      valuation_of_difference)

T = sp.Symbol("T")
CLUSTER_REL_TOL = 1e-6
N_SAMPLES = 64


class SpectralError(ValueError):
    pass


def char_poly(H: HiggsChart) -> list[CoefficientFunction]:
    """``(a_0, ..., a_{r-1})`` with ``det(T - f) = T^r + sum_j a_j T^j``."""
    if not H.exact:
        raise SpectralError("sampled entries: use char_poly_sampled")
    p = H.sympy_matrix().charpoly(T).all_coeffs()[::-1]
    return [CoefficientFunction.of(sp.expand(c)) for c in p[:-1]]


def char_poly_sampled(H: HiggsChart, zz) -> np.ndarray:
    """Numeric characteristic-polynomial coefficients ``(a_0..a_{r-1})`` at points."""
    F = H(np.atleast_1d(zz))
    return np.array([np.poly(f)[::-1][:-1] for f in F])


def char_poly_expr(H: HiggsChart) -> sp.Expr:
    coeffs = char_poly(H)
    return sp.expand(T ** H.rank + sum(c.expr * T**j for j, c in enumerate(coeffs)))


def discriminant(coeffs: list[CoefficientFunction]) -> CoefficientFunction:
    """Discriminant in ``T`` of the monic polynomial with these lower coefficients."""
    r = len(coeffs)
    p = T**r + sum(c.expr * T**j for j, c in enumerate(coeffs))
    if r == 1:
        return CoefficientFunction.of(1)
    d = sp.expand(sp.discriminant(sp.expand(p), T))
    return CoefficientFunction.of(d)


def _trace_powers(H: HiggsChart, zz=None) -> list:
    r = H.rank
    if H.exact and zz is None:
        f = H.sympy_matrix()
        out, g = [], sp.eye(r)
        for _ in range(r):
            g = (g * f).applyfunc(sp.expand)
            out.append(sp.expand(g.trace()))
        return out
    F = H(zz)
    out, g = [], np.broadcast_to(np.eye(r), F.shape).copy()
    for _ in range(r):
        g = g @ F
        out.append(np.trace(g, axis1=-2, axis2=-1))
    return out


def trace_criteria(H: HiggsChart, rng: np.random.Generator | None = None) -> str:
    """Which of the two trace conditions certifies generic regular semisimplicity."""
    r = H.rank
    if H.exact:
        tr = [t != 0 for t in _trace_powers(H)]
    else:
        rng = rng or np.random.default_rng(0)
        zz = rng.uniform(-1, 1, N_SAMPLES) + 1j * rng.uniform(-1, 1, N_SAMPLES)
        vals = _trace_powers(H, zz)
        scale = max(1.0, max(float(np.abs(v).max()) for v in vals))
        tr = [bool(np.abs(v).max() > 1e-10 * scale) for v in vals]
    nz = {k + 1 for k, t in enumerate(tr) if t}
    if nz == {r}:
        return "criterion-i"
    if nz == {r - 1} and r >= 2:
        return "criterion-ii"
    return "none"


@dataclass(frozen=True)
class GRSReport:
    grss: bool
    method: str            # "exact-discriminant" or "sampling"
    probabilistic: bool
    discriminant: CoefficientFunction | None = None


def is_generically_regular_semisimple(H: HiggsChart, rng: np.random.Generator | None = None,
                                      radius: float = 1.0) -> GRSReport:
    if H.exact:
        d = discriminant(char_poly(H))
        return GRSReport(not d.is_zero(), "exact-discriminant", False, d)
    rng = rng or np.random.default_rng(0)
    zz = radius * (rng.uniform(-1, 1, N_SAMPLES) + 1j * rng.uniform(-1, 1, N_SAMPLES))
    for f in H(zz):
        w = np.linalg.eigvals(f)
        spread = max(float(np.abs(w[:, None] - w[None, :]).max()), float(np.abs(w).max()), 1e-300)
        d = np.abs(w[:, None] - w[None, :])
        np.fill_diagonal(d, np.inf)
        if d.min() > 1e-6 * spread:
            return GRSReport(True, "sampling", True)
    return GRSReport(False, "sampling", True)


@dataclass(frozen=True)
class FiberReport:
    count: int
    multiplicities: list[int]
    eigenvalues: list[complex]
    ambiguous: bool
    method: str


def fiber_cardinality(H: HiggsChart, z0: complex, rel_tol: float = CLUSTER_REL_TOL,
                      exact: bool | None = None) -> FiberReport:
    """Distinct eigenvalues of ``f(z0)`` and their algebraic multiplicities.

    For exact fields at a rational point the multiplicities come from a
    square-free factorization of the characteristic polynomial. Otherwise
    eigenvalues are clustered relative to their spread; a gap that falls
    between ``rel_tol`` and ``100 * rel_tol`` is reported as ambiguous.
    """
    z0c = complex(z0)
    rational = _is_gaussian_rational(z0)
    if exact is None:
        exact = H.exact and rational
    if exact:
        zq = sp.nsimplify(z0)
        p = sp.Poly(char_poly_expr(H).subs(z, zq), T)
        mults: list[int] = []
        vals: list[complex] = []
        for fac, m in sp.sqf_list(p)[1]:
            for root in np.roots([complex(c) for c in sp.Poly(fac, T).all_coeffs()]):
                mults.append(m)
                vals.append(complex(root))
        order = np.lexsort((np.imag(vals), np.real(vals)))
        return FiberReport(len(vals), [mults[i] for i in order], [vals[i] for i in order],
                           False, "exact")
    w = np.linalg.eigvals(H(np.array([z0c]))[0])
    return _cluster(w, rel_tol)


def _is_gaussian_rational(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return True
    if isinstance(x, (sp.Rational, sp.Integer)):
        return True
    if isinstance(x, str):
        try:
            e = sp.nsimplify(x, rational=False)
            return all(a.is_Rational for a in (sp.re(e), sp.im(e)))
        except sp.SympifyError:
            return False
    if isinstance(x, sp.Expr):
        return all(a.is_Rational for a in (sp.re(x), sp.im(x)))
    return False


def _cluster(w: np.ndarray, rel_tol: float) -> FiberReport:
    r = len(w)
    spread = max(float(np.abs(w[:, None] - w[None, :]).max()), float(np.abs(w).max()), 1e-300)
    tol = rel_tol * spread
    # single-linkage clustering on the complete graph of close pairs
    parent = list(range(r))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    ambiguous = False
    for i in range(r):
        for j in range(i + 1, r):
            d = abs(w[i] - w[j])
            if d <= tol:
                parent[find(i)] = find(j)
            elif d <= 100 * tol:
                ambiguous = True
    groups: dict[int, list[int]] = {}
    for i in range(r):
        groups.setdefault(find(i), []).append(i)
    vals = [complex(np.mean(w[g])) for g in groups.values()]
    mults = [len(g) for g in groups.values()]
    order = np.lexsort((np.imag(vals), np.real(vals)))
    return FiberReport(len(vals), [mults[i] for i in order], [vals[i] for i in order],
                       ambiguous, "numeric")


@dataclass(frozen=True)
class PunctureSpectrum:
    e: int
    branches: list[PuiseuxBranch]
    gaps: list[list[int | None]]     # valuations in units of zeta = w^(1/e)
    order: int
    chart: str = "puncture-0"
    residual: float = field(default=0.0)

    def alpha_exponents(self, i: int) -> list[int]:
        return [int(x * self.e) for x in self.branches[i].exponents]


def _charpoly_series(H: HiggsChart) -> list[dict[Fraction, complex]]:
    coeffs = char_poly(H) + [CoefficientFunction.of(1)]
    out = []
    for c in coeffs:
        out.append({Fraction(k): complex(v) for k, v in c.terms().items()})
    return out


def puncture_spectrum(H: HiggsChart, series_order: int = 12, at: complex | str | None = None,
                      tol: float = 1e-9) -> PunctureSpectrum:
    """Puiseux expansions of the eigenvalues of ``g`` where ``theta = g dw/w``.

    ``H`` is either already a puncture chart, or a plane chart together with
    ``at`` (a finite point or ``'inf'``).
    """
    if H.chart == "plane":
        if at is None:
            raise SpectralError("plane chart needs the puncture location")
        H = to_puncture_chart(H, at)
    if not H.exact:
        raise SpectralError("puncture analysis needs Laurent entries")
    r = H.rank
    try:
        br = puiseux_roots(_charpoly_series(H), order=series_order, tol=tol)
    except PuiseuxError as exc:
        raise SpectralError(f"Newton-Puiseux failed: {exc}") from exc
    if len(br) != r:
        raise SpectralError(f"expected {r} branches, found {len(br)}")
    e = ramification(br)
    if factorial(r) % e:
        raise SpectralError(f"ramification {e} does not divide r!")
    gaps: list[list[int | None]] = [[None] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            v = valuation_of_difference(br[i], br[j])
            if v is None:
                raise SpectralError("branches indistinguishable at this order; raise series_order")
            gaps[i][j] = int(v * e)
    res = max(branch_residual(H, b, 1e-2) for b in br)
    return PunctureSpectrum(e, br, gaps, series_order, H.chart, res)


def branch_residual(H: HiggsChart, branch: PuiseuxBranch, w: float) -> float:
    """``|P(t, w)|`` divided by the sum of absolute values of its monomials at ``t = branch(w)``."""
    coeffs = char_poly(H) + [CoefficientFunction.of(1)]
    t = branch(w)
    vals = [complex(c(np.array(w))) * t**j for j, c in enumerate(coeffs)]
    return abs(sum(vals)) / max(sum(abs(v) for v in vals), 1e-300)


def is_regular_semisimple_at_puncture(ps: PunctureSpectrum) -> bool:
    r = len(ps.gaps)
    return all(ps.gaps[i][j] <= 0 for i in range(r) for j in range(r) if i != j)


@dataclass(frozen=True)
class MonodromyReport:
    transitive: bool
    generators: list[list[int]]
    loops: int


def monodromy_irreducibility(H: HiggsChart, radius: float | None = None, steps: int = 400,
                             rng: np.random.Generator | None = None) -> MonodromyReport:
    """Heuristic irreducibility test for the characteristic polynomial.

    Eigenvalues are tracked along small loops around each root of the
    discriminant; if the generated permutation group acts transitively on the
    sheets the spectral curve is irreducible. A negative answer is not a proof
    of reducibility.
    """
    rng = rng or np.random.default_rng(0)
    r = H.rank
    if H.exact:
        d = discriminant(char_poly(H))
        if d.is_zero():
            return MonodromyReport(False, [], 0)
        poly = sp.Poly(d.expr * z ** max(0, -min(d.terms(), default=0)), z)
        if poly.degree() < 1:
            return MonodromyReport(r == 1, [], 0)
        crit = np.roots([complex(c) for c in poly.all_coeffs()])
    else:
        raise SpectralError("monodromy check needs exact entries")
    crit = _unique_points(crit)
    base = complex(np.abs(crit).max() + 1.0 if len(crit) else 1.0) * (1 + 0.37j)
    sep = min([abs(a - b) for i, a in enumerate(crit) for b in crit[i + 1:]] + [1.0])
    rad = radius or 0.3 * sep
    gens = []
    w0 = _sorted_eigs(H, base)
    for c in crit:
        # path: base -> c + rad, loop, back
        start = c + rad
        path = np.concatenate([np.linspace(base, start, steps),
                               c + rad * np.exp(2j * np.pi * np.linspace(0, 1, steps)),
                               np.linspace(start, base, steps)])
        cur = w0.copy()
        for zz in path[1:]:
            cur = _match(cur, np.linalg.eigvals(H(np.array([zz]))[0]))
        perm = [int(np.argmin(np.abs(w0 - x))) for x in cur]
        gens.append(perm)
    return MonodromyReport(_transitive(gens, r), gens, len(crit))


def _unique_points(pts, tol=1e-6):
    out = []
    for p in pts:
        if all(abs(p - q) > tol for q in out):
            out.append(complex(p))
    return np.array(out)


def _sorted_eigs(H, zz):
    w = np.linalg.eigvals(H(np.array([zz]))[0])
    return w[np.lexsort((w.imag, w.real))]


def _match(prev, new):
    from scipy.optimize import linear_sum_assignment
    cost = np.abs(prev[:, None] - new[None, :])
    _, col = linear_sum_assignment(cost)
    return new[col]


def _transitive(gens: list[list[int]], r: int) -> bool:
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for g in gens:
            for j in (g[i], g.index(i)):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
    return len(seen) == r


def spectral_report(H: HiggsChart, at: complex | str | None = "inf", series_order: int = 12,
                    rng: np.random.Generator | None = None) -> dict:
    grs = is_generically_regular_semisimple(H, rng)
    out = {"grss": grs.grss, "grss_method": grs.method, "probabilistic": grs.probabilistic,
           "trace_criteria": trace_criteria(H, rng)}
    if grs.discriminant is not None:
        out["discriminant"] = str(grs.discriminant.expr)
    if at is not None and H.exact and grs.grss:
        try:
            ps = puncture_spectrum(H, series_order, at=at)
            out["puncture"] = {"at": str(at), "e": ps.e, "valuations": ps.gaps,
                               "rs_at_puncture": is_regular_semisimple_at_puncture(ps)}
        except (SpectralError, FieldError) as exc:
            out["puncture"] = {"at": str(at), "error": str(exc)}
    return out
