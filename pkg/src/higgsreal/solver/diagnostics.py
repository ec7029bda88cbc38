"""Pointwise checks on metric fields: residual, flatness, a priori bound, maximum principle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..fields import HiggsChart
from .discrete import (compat_defect_field, dagger, frob_h, hitchin_operator, log_trace_s,
                       op_norm_h, sqrt_pair)
from .grid import GridDomain, GridError, MetricField


def _interior_to_full(vals: np.ndarray, domain: GridDomain, ring: int = 1) -> np.ndarray:
    """Embed values known on ``[ring:-ring, ring:-ring]`` into a full grid; fixed nodes get 0."""
    out = np.zeros((domain.ny, domain.nx))
    out[ring:-ring, ring:-ring] = vals
    out[domain.fixed_mask] = 0.0
    return out


def hitchin_residual(m: MetricField, H: HiggsChart) -> np.ndarray:
    """h-operator norm of the discrete Hitchin operator per node (0 on fixed nodes)."""
    f = H(m.domain.z)
    R, Ri = sqrt_pair(m.P)
    E = hitchin_operator(m.P, f, m.domain.dx, m.domain.dy, R, Ri)
    vals = op_norm_h(E, R[1:-1, 1:-1], Ri[1:-1, 1:-1])
    return _interior_to_full(vals, m.domain)


def f_norm_h(m: MetricField, H: HiggsChart) -> np.ndarray:
    """Frobenius norm ``|f|_h`` per node."""
    R, Ri = sqrt_pair(m.P)
    return frob_h(H(m.domain.z), R, Ri)


def compat_field(m: MetricField) -> np.ndarray:
    return compat_defect_field(m.P, m.C.gram)


def _central(a: np.ndarray, dx: float, dy: float):
    """Central x and y differences at nodes ``[1:-1, 1:-1]``."""
    ax = (a[1:-1, 2:] - a[1:-1, :-2]) / (2 * dx)
    ay = (a[2:, 1:-1] - a[:-2, 1:-1]) / (2 * dy)
    return ax, ay


@dataclass
class FlatnessReport:
    curvature: np.ndarray     # h-operator norm of the x-y curvature of D^1 per node
    kappa_defect: np.ndarray  # h-norm of the covariant derivative of kappa per node
    curvature_sup: float
    kappa_sup: float

    def flagged(self, tol: float) -> bool:
        return self.curvature_sup > tol or self.kappa_sup > tol


def flatness_check(m: MetricField, H: HiggsChart, margin: float = 0.0) -> FlatnessReport:
    """Curvature of ``D^1 = nabla_h + theta + theta^dagger`` and the defect of ``kappa``.

    The connection matrices are ``A_z = P^{-1} d_z P + f`` and ``A_zbar = f^dagger``.
    Derivatives are central differences, so values live on nodes at distance two
    from the outer boundary; the curvature ``F_xy`` should equal ``2i`` times the
    Hitchin operator. With ``margin > 0`` the sups skip nodes closer than
    ``margin`` to the outer boundary, where corner singularities of the
    Dirichlet problem spoil the difference quotients.
    """
    dom = m.domain
    P = m.P
    f = H(dom.z)
    dx, dy = dom.dx, dom.dy
    Px, Py = _central(P, dx, dy)
    Pc = P[1:-1, 1:-1]
    fc = f[1:-1, 1:-1]
    Pz = 0.5 * (Px - 1j * Py)
    Az = np.linalg.solve(Pc, Pz) + fc
    Azb = np.linalg.solve(Pc, dagger(fc) @ Pc)
    Ax = Az + Azb
    Ay = 1j * (Az - Azb)
    dAy_dx = (Ay[1:-1, 2:] - Ay[1:-1, :-2]) / (2 * dx)
    dAx_dy = (Ax[2:, 1:-1] - Ax[:-2, 1:-1]) / (2 * dy)
    ax, ay = Ax[1:-1, 1:-1], Ay[1:-1, 1:-1]
    Fxy = dAy_dx - dAx_dy + ax @ ay - ay @ ax

    # kappa(v) = K conj(v) with K = C^{-1} P^T; D kappa = dK + A K - K conj(A)
    K = np.linalg.solve(m.C.gram, np.swapaxes(P, -1, -2))
    Kx, Ky = _central(K, dx, dy)
    Kc = K[1:-1, 1:-1]
    Dx = Kx + Ax @ Kc - Kc @ np.conj(Ax)
    Dy = Ky + Ay @ Kc - Kc @ np.conj(Ay)

    R, Ri = sqrt_pair(P[2:-2, 2:-2])
    curv = op_norm_h(Fxy, R, Ri)
    R1, R1i = sqrt_pair(Pc)
    # operator norm of the antilinear map v -> M conj(v) for the metric h
    kap = np.maximum(np.linalg.norm(R1 @ Dx @ np.conj(R1i), ord=2, axis=(-2, -1)),
                     np.linalg.norm(R1 @ Dy @ np.conj(R1i), ord=2, axis=(-2, -1)))
    curv_full = _interior_to_full(curv, dom, ring=2)
    kap_full = _interior_to_full(kap, dom, ring=1)
    # hole nodes and their neighbours are not covered by the stencils meaningfully
    near = dom.fixed_mask.copy()
    near[1:, :] |= dom.fixed_mask[:-1, :]
    near[:-1, :] |= dom.fixed_mask[1:, :]
    near[:, 1:] |= dom.fixed_mask[:, :-1]
    near[:, :-1] |= dom.fixed_mask[:, 1:]
    curv_full[near] = 0.0
    kap_full[dom.fixed_mask] = 0.0
    keep = dom.shrink_mask(margin) if margin > 0 else np.ones_like(near)
    return FlatnessReport(curv_full, kap_full, float(curv_full[keep].max()),
                          float(kap_full[keep].max()))


@dataclass
class AprioriReport:
    sup_f_h: float
    A1: float           # sup |alpha_i| on the shrunken interior
    A2: float           # inf |alpha_i - alpha_j| on the shrunken interior
    margin: float
    n_nodes: int

    def to_json(self) -> dict:
        return {"sup_f_h": self.sup_f_h, "A1": self.A1, "A2": self.A2,
                "margin": self.margin, "n_nodes": self.n_nodes}


def apriori_check(m: MetricField, H: HiggsChart, interior_margin: float) -> AprioriReport:
    """``sup |f|_h`` on the nodes at distance ``>= interior_margin`` from the boundary."""
    mask = m.domain.shrink_mask(interior_margin)
    if not mask.any():
        raise GridError("no nodes left after shrinking")
    fh = f_norm_h(m, H)[mask]
    w = np.linalg.eigvals(H(m.domain.z[mask]))
    r = w.shape[-1]
    A1 = float(np.abs(w).max())
    if r > 1:
        gaps = np.abs(w[:, :, None] - w[:, None, :])
        gaps[:, np.arange(r), np.arange(r)] = np.inf
        A2 = float(gaps.min())
    else:
        A2 = float("inf")
    return AprioriReport(float(fh.max()), A1, A2, interior_margin, int(mask.sum()))


@dataclass
class MaxPrincipleReport:
    interior_sup: float
    boundary_sup: float
    slack: float
    holds: bool

    def to_json(self) -> dict:
        return {"interior_sup": self.interior_sup, "boundary_sup": self.boundary_sup,
                "slack": self.slack, "holds": self.holds}


def max_principle_check(m: MetricField, h_ref: MetricField, box=None,
                        slack: float = 1e-4) -> MaxPrincipleReport:
    """Compare ``log tr s(h_ref, h)`` inside a sub-rectangle with its values on the rectangle's edge.

    ``box = (i0, i1, j0, j1)`` are inclusive node indices; default is the whole grid.
    With ``h_ref`` harmonic the function is subharmonic, so the interior sup
    should not exceed the edge sup beyond discretization slack.
    """
    if h_ref.domain != m.domain:
        raise GridError("reference metric lives on a different grid")
    g = log_trace_s(h_ref.P, m.P)
    ny, nx = g.shape
    i0, i1, j0, j1 = box if box is not None else (0, nx - 1, 0, ny - 1)
    if not (0 <= i0 < i1 - 1 and i1 < nx and 0 <= j0 < j1 - 1 and j1 < ny):
        raise GridError("sub-rectangle needs at least one interior node")
    sub = g[j0:j1 + 1, i0:i1 + 1]
    edge = np.concatenate([sub[0], sub[-1], sub[:, 0], sub[:, -1]])
    inner = sub[1:-1, 1:-1]
    # hole nodes are Dirichlet data, count them as edge
    holes = m.domain.hole_mask[j0:j1 + 1, i0:i1 + 1][1:-1, 1:-1]
    if holes.any():
        edge = np.concatenate([edge, inner[holes]])
        inner = inner[~holes]
    isup = float(inner.max()) if inner.size else -np.inf
    bsup = float(edge.max())
    return MaxPrincipleReport(isup, bsup, slack, isup <= bsup + slack)


def nested_boxes(domain: GridDomain, count: int = 3) -> list[tuple[int, int, int, int]]:
    """The full grid and ``count - 1`` concentric sub-rectangles."""
    out = []
    for k in range(count):
        di = k * (domain.nx - 1) // (2 * count)
        dj = k * (domain.ny - 1) // (2 * count)
        out.append((di, domain.nx - 1 - di, dj, domain.ny - 1 - dj))
    return out
