"""Dirichlet problem for compatible harmonic metrics, solved by damped Newton.

The unknown at every free node is a real antisymmetric matrix ``Y``. In a
constant frame ``V0`` that is orthonormal for ``C`` the metric is
``P~ = exp(iY)``; every such metric is compatible with ``C`` and every
compatible metric has this form, so compatibility holds by construction.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from ..fields import HiggsChart
from ..linalg import HermitianMetric, SymmetricPairing, common_orthonormal_basis, is_compatible
from .discrete import (compat_defect_field, dagger, harmonic_extension, herm, hitchin_operator,
                       hlog)
from .grid import GridDomain, MetricField


class SolverError(RuntimeError):
    pass


class BoundaryError(ValueError):
    pass


@dataclass
class SolveReport:
    residual_sup: float
    compat_sup: float
    iterations: int
    converged: bool
    energy_trace: list[float] = field(default_factory=list)
    method: str = "newton"
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"residual_sup": self.residual_sup, "compat_sup": self.compat_sup,
                "iterations": self.iterations, "converged": self.converged,
                "energy_trace": list(self.energy_trace), "method": self.method}


class ConstrainedChart:
    """Frame change to ``C~ = I`` and the exponential chart ``P~ = exp(iY)``."""

    def __init__(self, C: SymmetricPairing):
        self.C = C
        r = self.r = C.dim
        eye = HermitianMetric(np.eye(r))
        if is_compatible(C, eye):
            V0 = common_orthonormal_basis(C, eye)
        else:
            V0 = np.linalg.inv(sla.sqrtm(C.gram))
        self.V0 = V0
        self.V0inv = np.linalg.inv(V0)
        self.iu = np.triu_indices(r, 1)
        self.m = len(self.iu[0])

    def to_tilde(self, P: np.ndarray) -> np.ndarray:
        return dagger(self.V0) @ P @ self.V0

    def to_ambient(self, Pt: np.ndarray) -> np.ndarray:
        return dagger(self.V0inv) @ Pt @ self.V0inv

    def field_tilde(self, f: np.ndarray) -> np.ndarray:
        return self.V0inv @ f @ self.V0

    def Y_from_components(self, c: np.ndarray) -> np.ndarray:
        Y = np.zeros(c.shape[:-1] + (self.r, self.r))
        Y[..., self.iu[0], self.iu[1]] = c
        return Y - np.swapaxes(Y, -1, -2)

    def components(self, Y: np.ndarray) -> np.ndarray:
        return Y[..., self.iu[0], self.iu[1]]

    def metric(self, c: np.ndarray):
        """``P~``, ``P~^{1/2}``, ``P~^{-1/2}`` from components."""
        w, U = np.linalg.eigh(1j * self.Y_from_components(c))
        Ud = dagger(U)
        P = (U * np.exp(w)[..., None, :]) @ Ud
        R = (U * np.exp(w / 2)[..., None, :]) @ Ud
        Ri = (U * np.exp(-w / 2)[..., None, :]) @ Ud
        return P, R, Ri

    def components_from_ambient(self, P: np.ndarray, tol: float = 1e-8) -> np.ndarray:
        L = hlog(self.to_tilde(P))
        Y = -1j * L
        scale = np.maximum(1.0, np.abs(Y).max(axis=(-2, -1)))
        bad = (np.abs(Y.imag).max(axis=(-2, -1)) / scale > tol) | \
              (np.abs(Y + np.swapaxes(Y, -1, -2)).max(axis=(-2, -1)) / scale > tol)
        if np.any(bad):
            raise BoundaryError(f"{int(bad.sum())} metric value(s) are not compatible with C")
        return self.components(Y.real)


def _stencil_sources(free: np.ndarray):
    """For each color, the free index of the same-colored stencil node of every free node."""
    ny, nx = free.shape
    idx = -np.ones((ny, nx), dtype=int)
    jj, ii = np.nonzero(free)
    idx[jj, ii] = np.arange(len(jj))
    color = (ii + 2 * jj) % 5
    node_color = np.full((ny, nx), -1)
    node_color[jj, ii] = color
    src = -np.ones((5, len(jj)), dtype=int)
    for dj, di in ((0, 0), (0, 1), (0, -1), (1, 0), (-1, 0)):
        sj, si = jj + dj, ii + di
        ok = (sj >= 0) & (sj < ny) & (si >= 0) & (si < nx)
        s_idx = np.where(ok, idx[np.clip(sj, 0, ny - 1), np.clip(si, 0, nx - 1)], -1)
        c = np.where(s_idx >= 0, (np.clip(si, 0, nx - 1) + 2 * np.clip(sj, 0, ny - 1)) % 5, -1)
        for k in range(5):
            sel = (c == k)
            src[k, sel] = s_idx[sel]
    return color, src


class DirichletProblem:
    """Discrete residual and Jacobian for one domain and one set of boundary values."""

    def __init__(self, H: HiggsChart, C: SymmetricPairing, domain: GridDomain,
                 boundary_components: np.ndarray, chart: ConstrainedChart | None = None):
        if H.rank != C.dim:
            raise SolverError("field rank does not match pairing")
        self.H, self.C, self.domain = H, C, domain
        self.chart = chart or ConstrainedChart(C)
        f = H(domain.z)
        if not np.all(np.isfinite(f)):
            raise SolverError("Higgs field is not finite on the grid")
        self.f_tilde = self.chart.field_tilde(f)
        self.free = domain.free_mask
        self.free_int = self.free[1:-1, 1:-1]
        self.base = np.array(boundary_components, dtype=float)
        self.n_free = int(self.free.sum())
        self.m = self.chart.m
        self.color, self.src = _stencil_sources(self.free)

    def full_components(self, x: np.ndarray) -> np.ndarray:
        c = self.base.copy()
        c[self.free] = x.reshape(self.n_free, self.m)
        return c

    def evaluate(self, x: np.ndarray, want_norm: bool = False):
        c = self.full_components(x)
        P, R, Ri = self.chart.metric(c)
        dom = self.domain
        Rop = hitchin_operator(P, self.f_tilde, dom.dx, dom.dy, R, Ri)
        E = R[1:-1, 1:-1] @ Rop @ Ri[1:-1, 1:-1]
        E = E[self.free_int]
        # E = i Z with Z real antisymmetric; the equations are the entries of Z
        Z = (-1j * E).real
        F = self.chart.components(Z).ravel()
        if not want_norm:
            return F
        norms = np.linalg.norm(E, ord=2, axis=(-2, -1)) if len(E) else np.zeros(0)
        return F, norms

    def jacobian(self, x: np.ndarray, eps: float = 1e-6) -> sps.csr_matrix:
        m, n = self.m, self.n_free
        rows, cols, vals = [], [], []
        X = x.reshape(n, m)
        node_rows = np.arange(n)
        for k in range(5):
            members = self.color == k
            if not members.any():
                continue
            has = self.src[k] >= 0
            for a in range(m):
                xp = X.copy()
                xm = X.copy()
                xp[members, a] += eps
                xm[members, a] -= eps
                dF = (self.evaluate(xp.ravel()) - self.evaluate(xm.ravel())).reshape(n, m) / (2 * eps)
                for b in range(m):
                    rows.append(node_rows[has] * m + b)
                    cols.append(self.src[k][has] * m + a)
                    vals.append(dF[has, b])
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.concatenate(vals)
        return sps.csr_matrix((vals, (rows, cols)), shape=(n * m, n * m))

    def ambient(self, x: np.ndarray) -> np.ndarray:
        P, _, _ = self.chart.metric(self.full_components(x))
        return self.chart.to_ambient(P)


def boundary_components(chart: ConstrainedChart, boundary: MetricField, domain: GridDomain
                        ) -> np.ndarray:
    if boundary.domain != domain:
        raise BoundaryError("boundary field lives on a different grid")
    fixed = domain.fixed_mask
    comps = np.zeros((domain.ny, domain.nx, chart.m))
    comps[fixed] = chart.components_from_ambient(boundary.P[fixed])
    return comps


def dirichlet_solve(H: HiggsChart, C: SymmetricPairing, boundary: MetricField,
                    domain: GridDomain | None = None, tol: float = 1e-6,
                    initial: MetricField | None = None, max_iter: int = 40,
                    callback: Callable[[int, np.ndarray], None] | None = None,
                    fallback_sweeps: int = 200, verbose: bool = False
                    ) -> tuple[MetricField, SolveReport]:
    """Harmonic metric compatible with ``C`` with prescribed values at fixed nodes.

    ``boundary`` supplies values at the fixed nodes (outer ring and hole
    interiors); other values are ignored. The initial guess is the discrete
    harmonic extension of the boundary data in the exponential chart unless
    ``initial`` is given. ``callback(iteration, P_ambient)`` is called on every
    iterate, including line-search trial points that are accepted.
    """
    t0 = time.perf_counter()
    domain = domain or boundary.domain
    chart = ConstrainedChart(C)
    base = boundary_components(chart, boundary, domain)
    fixed = domain.fixed_mask
    if initial is not None:
        guess = np.zeros_like(base)
        guess[~fixed] = chart.components_from_ambient(initial.P[~fixed])
        base_full = base.copy()
        base_full[~fixed] = guess[~fixed]
    else:
        base_full = harmonic_extension(base, fixed, domain.dx, domain.dy)
    prob = DirichletProblem(H, C, domain, base, chart)
    x = base_full[prob.free].ravel()

    compat_sup = 0.0

    def observe(it, xx):
        nonlocal compat_sup
        P = prob.ambient(xx)
        d = float(compat_defect_field(P, C.gram).max())
        compat_sup = max(compat_sup, d)
        if callback is not None:
            callback(it, P)

    F, norms = prob.evaluate(x, want_norm=True)
    observe(0, x)
    res_sup = float(norms.max()) if len(norms) else 0.0
    trace = [float(np.linalg.norm(F))]
    it = 0
    method = "newton"
    stalled = False
    while res_sup > tol and it < max_iter:
        it += 1
        J = prob.jacobian(x)
        try:
            dx = spla.spsolve(J.tocsc(), -F)
        except RuntimeError:
            stalled = True
            break
        if not np.all(np.isfinite(dx)):
            stalled = True
            break
        fn = trace[-1]
        t = 1.0
        while True:
            xt = x + t * dx
            try:
                Ft, nt = prob.evaluate(xt, want_norm=True)
                ok = np.linalg.norm(Ft) <= (1 - 1e-4 * t) * fn
            except FloatingPointError:
                ok = False
            if ok or t < 1e-4:
                break
            t *= 0.5
        if not ok:
            stalled = True
            break
        x, F, norms = xt, Ft, nt
        observe(it, x)
        res_sup = float(norms.max()) if len(norms) else 0.0
        trace.append(float(np.linalg.norm(F)))
        if verbose:
            print(f"newton {it}: |F|={trace[-1]:.3e} sup={res_sup:.3e} step={t:g}")
    if stalled and res_sup > tol:
        method = "newton+chord"
        x, F, res_sup, extra = _chord_relaxation(prob, x, F, tol, fallback_sweeps, observe, it, trace)
        it += extra
    P = prob.ambient(x)
    report = SolveReport(res_sup, compat_sup, it, res_sup <= tol, trace, method,
                         time.perf_counter() - t0)
    return MetricField(domain, P, C), report


def _chord_relaxation(prob: DirichletProblem, x, F, tol, sweeps, observe, it0, trace):
    """Damped chord iterations with a frozen Jacobian factorization."""
    J = prob.jacobian(x).tocsc()
    try:
        lu = spla.splu(J)
    except RuntimeError:
        diag = J.diagonal()
        diag[diag == 0] = 1.0
        lu = None
    omega = 0.5
    res_sup = np.inf
    for k in range(sweeps):
        step = lu.solve(-F) if lu is not None else -F / diag
        xt = x + omega * step
        try:
            Ft, nt = prob.evaluate(xt, want_norm=True)
        except FloatingPointError:
            omega *= 0.5
            continue
        if np.linalg.norm(Ft) < trace[-1]:
            x, F = xt, Ft
            res_sup = float(nt.max()) if len(nt) else 0.0
            trace.append(float(np.linalg.norm(F)))
            observe(it0 + k + 1, x)
            omega = min(1.0, omega * 1.5)
            if res_sup <= tol:
                return x, F, res_sup, k + 1
        else:
            omega *= 0.5
            if omega < 1e-6:
                break
    if not np.isfinite(res_sup):
        _, nt = prob.evaluate(x, want_norm=True)
        res_sup = float(nt.max()) if len(nt) else 0.0
    return x, F, res_sup, sweeps


def metric_components(C: SymmetricPairing, m: MetricField) -> np.ndarray:
    """Exponential-chart components of a compatible metric field."""
    return ConstrainedChart(C).components_from_ambient(m.P)


def metric_from_components(C: SymmetricPairing, domain: GridDomain, comps: np.ndarray) -> MetricField:
    chart = ConstrainedChart(C)
    P, _, _ = chart.metric(comps)
    return MetricField(domain, chart.to_ambient(P), C)


def herm_field(P: np.ndarray) -> np.ndarray:
    return herm(P)
