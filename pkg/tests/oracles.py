"""Independent closed-form references used by the tests."""

from __future__ import annotations

import numpy as np

from higgsreal.fields import HiggsChart
from higgsreal.linalg import SymmetricPairing, canonical_frame, random_symmetric_pairing
from higgsreal.solver.grid import GridDomain, MetricField


def random_constant_field(r: int, rng: np.random.Generator):
    """Constant ``C``-symmetric field ``C^{-1} S`` with a random pairing ``C``."""
    while True:
        C, _ = random_symmetric_pairing(r, rng)
        if C.cond < 1e3:
            break
    S = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    F = np.linalg.solve(C.gram, S + S.T)
    return HiggsChart.from_matrix(F.tolist()), C, F


def kink_profile(x: np.ndarray, k: float, x0: float) -> np.ndarray:
    """``y`` with ``phi = 2y`` solving ``phi'' = k^2 sinh(phi)`` for ``x > x0``."""
    return 2.0 * np.arctanh(np.exp(-k * (x - x0)))


def kink_metric(F: np.ndarray, C: SymmetricPairing, domain: GridDomain, x0: float
                ) -> MetricField:
    """Exact non-constant harmonic metric for the constant field ``F``.

    In a ``C``-orthonormal eigenframe with eigenvalues ``l1, l2, ...`` take
    ``P~ = exp(y(x) M)`` on the span of the first two vectors, ``M = [[0, i], [-i, 0]]``,
    and the identity elsewhere. The equation reduces to ``y'' = 8 |d|^2 sinh(2y)``
    with ``d = (l1 - l2) / 2``.
    """
    lam, E = canonical_frame(F, C)
    r = len(lam)
    k = 2.0 * abs(lam[0] - lam[1])
    y = kink_profile(domain.z.real, k, x0)
    M = np.array([[0, 1j], [-1j, 0]])
    Pt = np.zeros(y.shape + (r, r), dtype=complex)
    Pt[..., :2, :2] = np.cosh(y)[..., None, None] * np.eye(2) + np.sinh(y)[..., None, None] * M
    for i in range(2, r):
        Pt[..., i, i] = 1.0
    Einv = np.linalg.inv(E)
    P = np.conj(Einv).T @ Pt @ Einv
    return MetricField(domain, 0.5 * (P + np.conj(np.swapaxes(P, -1, -2))), C)
