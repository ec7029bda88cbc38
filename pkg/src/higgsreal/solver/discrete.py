"""Batched matrix calculus and the discrete Hitchin operator.

All arrays carry the matrix in the last two axes. A metric is given by ``P``
with ``h(u, v) = v^H P u`` in a holomorphic frame; the Chern connection is
``P^{-1} dP`` and the equation solved is

    R(P) = d_zbar(P^{-1} d_z P) - [f, f^dagger] = 0,   f^dagger = P^{-1} f^H P.

Writing ``A_x = P^{-1} P_x`` and ``A_y = P^{-1} P_y`` the first term equals
``(div A + i [A_x, A_y]) / 4``. On the grid ``A_x`` at an edge midpoint is
``log(P_a^{-1} P_b) / dx``, which is second-order accurate and reduces to the
five-point Laplacian when all ``P`` commute.
"""

from __future__ import annotations

import numpy as np


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def herm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def sqrt_pair(P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``P^{1/2}`` and ``P^{-1/2}`` for Hermitian positive ``P``."""
    w, U = np.linalg.eigh(herm(P))
    if np.any(w <= 0):
        raise FloatingPointError("metric lost positivity")
    r = np.sqrt(w)
    Ud = dagger(U)
    return (U * r[..., None, :]) @ Ud, (U / r[..., None, :]) @ Ud


def hlog(Q: np.ndarray) -> np.ndarray:
    w, U = np.linalg.eigh(herm(Q))
    if np.any(w <= 0):
        raise FloatingPointError("logarithm of a non-positive matrix")
    return (U * np.log(w)[..., None, :]) @ dagger(U)


def hexp(A: np.ndarray) -> np.ndarray:
    w, U = np.linalg.eigh(herm(A))
    return (U * np.exp(w)[..., None, :]) @ dagger(U)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def edge_flux(Ra, Rai, Pb, step: float) -> np.ndarray:
    """``log(P_a^{-1} P_b) / step`` computed through a Hermitian similarity."""
    L = hlog(Rai @ Pb @ Rai)
    return Rai @ L @ Ra / step


def fluxes(P: np.ndarray, dx: float, dy: float, R=None, Rinv=None):
    """Edge fluxes along x (shape ``(ny, nx-1)``) and y (shape ``(ny-1, nx)``)."""
    if R is None:
        R, Rinv = sqrt_pair(P)
    Fx = edge_flux(R[:, :-1], Rinv[:, :-1], P[:, 1:], dx)
    Fy = edge_flux(R[:-1, :], Rinv[:-1, :], P[1:, :], dy)
    return Fx, Fy


def curvature_term(P: np.ndarray, dx: float, dy: float, R=None, Rinv=None) -> np.ndarray:
    """``d_zbar(P^{-1} d_z P)`` at interior nodes, shape ``(ny-2, nx-2, r, r)``."""
    Fx, Fy = fluxes(P, dx, dy, R, Rinv)
    E, W = Fx[1:-1, 1:], Fx[1:-1, :-1]
    N, S = Fy[1:, 1:-1], Fy[:-1, 1:-1]
    div = (E - W) / dx + (N - S) / dy
    ax = 0.5 * (E + W)
    ay = 0.5 * (N + S)
    return 0.25 * (div + 1j * commutator(ax, ay))


def higgs_term(P: np.ndarray, f: np.ndarray) -> np.ndarray:
    """``[f, f^dagger]`` pointwise."""
    fd = np.linalg.solve(P, dagger(f) @ P)
    return commutator(f, fd)


def hitchin_operator(P: np.ndarray, f: np.ndarray, dx: float, dy: float,
                     R=None, Rinv=None) -> np.ndarray:
    """Discrete ``R(P)`` at interior nodes (drops the outer ring)."""
    curv = curvature_term(P, dx, dy, R, Rinv)
    return curv - higgs_term(P[1:-1, 1:-1], f[1:-1, 1:-1])


def op_norm_h(A: np.ndarray, R: np.ndarray, Rinv: np.ndarray) -> np.ndarray:
    """Operator norm of endomorphisms with respect to the metric with square root ``R``."""
    return np.linalg.norm(R @ A @ Rinv, ord=2, axis=(-2, -1))


def frob_h(A: np.ndarray, R: np.ndarray, Rinv: np.ndarray) -> np.ndarray:
    return np.linalg.norm(R @ A @ Rinv, axis=(-2, -1))


def log_s_norm(P1: np.ndarray, P2: np.ndarray) -> np.ndarray:
    """Spectral norm of ``log s(h1, h2)`` per node."""
    _, R1i = sqrt_pair(P1)
    w = np.linalg.eigvalsh(herm(R1i @ P2 @ R1i))
    return np.abs(np.log(w)).max(axis=-1)


def log_trace_s(P1: np.ndarray, P2: np.ndarray) -> np.ndarray:
    """``log tr s(h1, h2)`` per node."""
    s = np.linalg.solve(P1, P2)
    return np.log(np.real(np.trace(s, axis1=-2, axis2=-1)))


def compat_defect_field(P: np.ndarray, Cg: np.ndarray) -> np.ndarray:
    """Relative ``|kappa o kappa - id|`` per node (``K = C^{-1} P^T``)."""
    K = np.linalg.solve(Cg, np.swapaxes(P, -1, -2))
    r = P.shape[-1]
    d = np.abs(K @ np.conj(K) - np.eye(r)).max(axis=(-2, -1))
    scale = np.maximum(1.0, np.abs(K).max(axis=(-2, -1)) ** 2)
    return d / scale


def five_point_laplacian(nx: int, ny: int, dx: float, dy: float):
    """Sparse Laplacian on the full grid (row-major ``j * nx + i``)."""
    import scipy.sparse as sps
    ex = np.ones(nx)
    ey = np.ones(ny)
    Lx = sps.diags([ex[:-1], -2 * ex, ex[:-1]], [-1, 0, 1]) / dx**2
    Ly = sps.diags([ey[:-1], -2 * ey, ey[:-1]], [-1, 0, 1]) / dy**2
    return (sps.kron(sps.identity(ny), Lx) + sps.kron(Ly, sps.identity(nx))).tocsr()


def harmonic_extension(values: np.ndarray, fixed: np.ndarray, dx: float, dy: float) -> np.ndarray:
    """Discrete harmonic extension of ``values`` from the fixed nodes; extra axes are batched."""
    import scipy.sparse.linalg as spla
    ny, nx = fixed.shape
    L = five_point_laplacian(nx, ny, dx, dy)
    free = ~fixed.ravel()
    flat = values.reshape(ny * nx, -1)
    out = flat.copy()
    if free.any():
        A = L[free][:, free].tocsc()
        B = L[free][:, ~free]
        rhs = -(B @ flat[~free])
        lu = spla.splu(A)
        out[free] = lu.solve(np.asarray(rhs, dtype=float)) if np.isrealobj(flat) else lu.solve(rhs)
    return out.reshape(values.shape)
