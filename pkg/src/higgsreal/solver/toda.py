"""Diagonal reduction for cyclic fields.

For ``f = sum_k c_k E_{k+1,k} + q E_{1,r}`` and ``P = diag(exp(u_1), ..., exp(u_r))``
the Hitchin equation becomes

    (1/4) Laplacian(u_i) = w_{i-1} - w_i,   w_k = |c_k|^2 exp(u_{k+1} - u_k),

with indices mod ``r`` (``c_r = q``). Compatibility with the reversed-identity
pairing is ``u_i + u_{r+1-i} = 0``, which leaves ``floor(r/2)`` unknowns.
"""

from __future__ import annotations

import time

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from ..fields import HiggsChart
from ..hitchin import antidiagonal_pairing
from .discrete import five_point_laplacian, harmonic_extension
from .grid import GridDomain, MetricField
from .newton import SolveReport


class TodaError(ValueError):
    pass


def cyclic_data(H: HiggsChart, zz: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``|c_k|^2`` for ``k = 1..r`` (last one is ``|q|^2``) at the nodes; checks the pattern."""
    f = H(zz)
    r = H.rank
    mask = np.zeros((r, r), dtype=bool)
    for k in range(r - 1):
        mask[k + 1, k] = True
    mask[0, r - 1] = True
    off = np.abs(f[..., ~mask]).max() if (~mask).any() else 0.0
    if off > 0:
        raise TodaError("field is not cyclic in the stored frame")
    c2 = np.stack([np.abs(f[..., k + 1, k]) ** 2 for k in range(r - 1)]
                  + [np.abs(f[..., 0, r - 1]) ** 2], axis=-1)
    return c2, f


def _full_u(v: np.ndarray, r: int) -> np.ndarray:
    half = r // 2
    u = np.zeros(v.shape[:-1] + (r,))
    u[..., :half] = v
    u[..., r - half:] = -v[..., ::-1]
    return u


def _nonlinear(v: np.ndarray, c2: np.ndarray, r: int) -> np.ndarray:
    """``w_{i-1} - w_i`` for the independent components ``i = 1..floor(r/2)``."""
    u = _full_u(v, r)
    w = c2 * np.exp(np.roll(u, -1, axis=-1) - u)
    rhs = np.roll(w, 1, axis=-1) - w
    return rhs[..., : r // 2]


def toda_solve(H: HiggsChart, domain: GridDomain, boundary_u: np.ndarray,
               tol: float = 1e-6, max_iter: int = 50) -> tuple[MetricField, SolveReport, np.ndarray]:
    """Solve for ``u`` with Dirichlet data ``boundary_u`` (shape ``(ny, nx, r)``)."""
    t0 = time.perf_counter()
    r = H.rank
    half = r // 2
    if half == 0:
        raise TodaError("rank must be at least 2")
    c2, _ = cyclic_data(H, domain.z)
    bu = np.asarray(boundary_u, dtype=float)
    if bu.shape != (domain.ny, domain.nx, r):
        raise TodaError("boundary data has the wrong shape")
    if np.abs(bu + bu[..., ::-1]).max() > 1e-12:
        raise TodaError("boundary data violates u_i + u_(r+1-i) = 0")
    fixed = domain.fixed_mask
    free = ~fixed
    ny, nx = fixed.shape
    v = bu[..., :half].copy()
    L = five_point_laplacian(nx, ny, domain.dx, domain.dy)
    fr = free.ravel()
    Lff = L[fr][:, fr]
    Lfb = L[fr][:, ~fr]
    vb = v.reshape(-1, half)[~fr]
    n = int(fr.sum())
    c2f = c2.reshape(-1, r)[fr]
    v = harmonic_extension(v, fixed, domain.dx, domain.dy)
    x = v.reshape(-1, half)[fr].copy()

    def residual(x):
        lap = Lff @ x + Lfb @ vb
        return 0.25 * lap - _nonlinear(x, c2f, r)

    F = residual(x)
    trace = [float(np.linalg.norm(F))]
    it = 0
    while np.abs(F).max() > tol * 1e-3 and it < max_iter:
        it += 1
        # pointwise Jacobian of the nonlinearity by central differences
        eps = 1e-7
        D = np.empty((n, half, half))
        for a in range(half):
            e = np.zeros(half)
            e[a] = eps
            D[:, :, a] = (_nonlinear(x + e, c2f, r) - _nonlinear(x - e, c2f, r)) / (2 * eps)
        if half == 1:
            J = 0.25 * Lff - sps.diags(D[:, 0, 0])
        else:
            J = 0.25 * sps.kron(Lff, sps.identity(half)) - sps.block_diag(list(D))
        dx = spla.spsolve(J.tocsc(), -F.ravel()).reshape(n, half)
        t = 1.0
        while True:
            Ft = residual(x + t * dx)
            if np.linalg.norm(Ft) <= (1 - 1e-4 * t) * trace[-1] or t < 1e-4:
                break
            t *= 0.5
        x = x + t * dx
        F = Ft
        trace.append(float(np.linalg.norm(F)))
    vf = v.reshape(-1, half)
    vf[fr] = x
    u = _full_u(vf.reshape(ny, nx, half), r)
    P = np.zeros((ny, nx, r, r), dtype=complex)
    idx = np.arange(r)
    P[..., idx, idx] = np.exp(u)
    res = float(np.abs(F).max()) if F.size else 0.0
    rep = SolveReport(res, 0.0, it, res <= tol, trace, "toda-newton", time.perf_counter() - t0)
    return MetricField(domain, P, antidiagonal_pairing(r)), rep, u


def constant_toda_solution(q_abs2: float, r: int) -> np.ndarray:
    """Constant solution with all ``w_k`` equal: ``u_{k+1} - u_k = a`` and ``q^2 e^{-(r-1)a} = e^{a}``."""
    a = np.log(q_abs2) / r
    # w_k = e^{a} for k < r and w_r = |q|^2 e^{u_1 - u_r} = |q|^2 e^{-(r-1)a}
    u = a * (np.arange(r) - (r - 1) / 2)
    return u
