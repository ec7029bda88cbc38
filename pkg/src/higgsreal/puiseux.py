"""Numeric Newton-Puiseux expansion of the roots of ``P(T, w) = sum_j a_j(w) T^j``.

Coefficients ``a_j`` are finite Laurent series in ``w`` with complex float
coefficients; exponents are kept as exact fractions. Cancellation is decided
relative to the magnitude of the summands that produced each coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm

import numpy as np

Series = dict[Fraction, complex]


@dataclass(frozen=True)
class PuiseuxBranch:
    """``sum_k coeffs[k] * w**exponents[k]`` (exact if ``terminated``)."""

    exponents: tuple[Fraction, ...]
    coeffs: tuple[complex, ...]
    terminated: bool

    @property
    def denominator(self) -> int:
        d = 1
        for e in self.exponents:
            d = lcm(d, e.denominator)
        return d

    def __call__(self, w: complex) -> complex:
        # principal branch of w**(p/q); callers pick w on the positive real axis
        return sum(c * w ** float(e) for e, c in zip(self.exponents, self.coeffs))


class PuiseuxError(ValueError):
    pass


def _clean(s: dict[Fraction, tuple[complex, float]], tol: float) -> Series:
    return {e: v for e, (v, mag) in s.items() if abs(v) > tol * max(mag, 1e-300)}


def _substitute(coeffs: list[Series], gamma: Fraction, c: complex, tol: float
                ) -> list[Series]:
    """Coefficients in ``T1`` of ``P(w^gamma (c + T1))``."""
    r = len(coeffs) - 1
    acc: list[dict[Fraction, tuple[complex, float]]] = [dict() for _ in range(r + 1)]
    for j, a in enumerate(coeffs):
        for e, v in a.items():
            ee = e + j * gamma
            for k in range(j + 1):
                t = v * comb(j, k) * c ** (j - k)
                old, mag = acc[k].get(ee, (0j, 0.0))
                acc[k][ee] = (old + t, mag + abs(t))
    return [_clean(a, tol) for a in acc]


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    hull: list[tuple[int, Fraction]] = []
    for p in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _cluster_roots(roots: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    out: list[list[complex]] = []
    scale = max(1.0, float(np.abs(roots).max())) if len(roots) else 1.0
    for x in roots:
        for grp in out:
            if abs(x - np.mean(grp)) <= tol * scale:
                grp.append(x)
                break
        else:
            out.append([x])
    return [(complex(np.mean(g)), len(g)) for g in out]


def _min_exp(a: Series) -> Fraction | None:
    return min(a) if a else None


def puiseux_roots(coeffs: list[Series], order: int = 12, tol: float = 1e-9,
                  root_tol: float = 1e-5) -> list[PuiseuxBranch]:
    """All ``deg_T P`` branches, each with up to ``order`` terms."""
    coeffs = [dict(a) for a in coeffs]
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    if len(coeffs) < 2:
        raise PuiseuxError("polynomial has no roots in T")
    out: list[PuiseuxBranch] = []
    _expand(coeffs, len(coeffs) - 1, (), (), order, tol, root_tol, out, first=True)
    return out


def _expand(coeffs, m, exps, cs, order, tol, root_tol, out, first):
    """Expand the ``m`` roots governed by the polygon up to degree ``m``.

    After a substitution ``T = w^g (c + T1)`` with ``c`` a root of multiplicity
    ``m`` of the edge polynomial, the roots with positive valuation in ``T1``
    are exactly those of the polygon segments left of degree ``m``, where the
    polygon reaches its minimum.
    """
    before = len(out)
    low = 0
    while low <= m and not coeffs[low]:
        low += 1
    # exactly vanishing roots terminate the branch
    for _ in range(min(low, m)):
        out.append(PuiseuxBranch(exps, cs, True))
    if low < m:
        if len(exps) >= order:
            for _ in range(m - low):
                out.append(PuiseuxBranch(exps, cs, False))
            return
        pts = [(j, _min_exp(coeffs[j])) for j in range(low, m + 1) if coeffs[j]]
        hull = _lower_hull(pts)
        for (j0, v0), (j1, v1) in zip(hull, hull[1:]):
            gamma = -(v1 - v0) / (j1 - j0)
            if not first and gamma <= 0:
                # after the first step only higher-order corrections are admissible
                raise PuiseuxError("non-increasing exponent in Newton polygon")
            absolute = (exps[-1] if exps else Fraction(0)) + gamma
            edge = np.zeros(j1 - j0 + 1, dtype=complex)
            for j in range(j0, j1 + 1):
                a = coeffs[j]
                e = v0 + (j - j0) * (v1 - v0) / (j1 - j0)
                if a and _min_exp(a) == e:
                    edge[j - j0] = a[e]
            roots = np.roots(edge[::-1])
            for c, mult in _cluster_roots(roots, root_tol):
                sub = _substitute(coeffs, gamma, c, tol)
                _expand(sub, mult, exps + (absolute,), cs + (c,), order, tol, root_tol, out, False)
    if len(out) - before != m:
        raise PuiseuxError(f"lost track of branches ({len(out) - before} found, {m} expected)")


def ramification(branches: list[PuiseuxBranch]) -> int:
    e = 1
    for b in branches:
        e = lcm(e, b.denominator)
    return e


def valuation_of_difference(b1: PuiseuxBranch, b2: PuiseuxBranch, tol: float = 1e-7
                            ) -> Fraction | None:
    """Smallest exponent where the two series differ; ``None`` if indistinguishable."""
    t1 = dict(zip(b1.exponents, b1.coeffs))
    t2 = dict(zip(b2.exponents, b2.coeffs))
    horizon1 = None if b1.terminated else max(b1.exponents, default=None)
    horizon2 = None if b2.terminated else max(b2.exponents, default=None)
    horizons = [h for h in (horizon1, horizon2) if h is not None]
    limit = min(horizons) if horizons else None
    for e in sorted(set(t1) | set(t2)):
        if limit is not None and e > limit:
            break
        x, y = t1.get(e, 0j), t2.get(e, 0j)
        if abs(x - y) > tol * max(1.0, abs(x), abs(y)):
            return e
    return None
