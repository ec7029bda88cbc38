"""Compatible seed metrics used as boundary data and initial guesses."""

from __future__ import annotations

import numpy as np

from ..fields import HiggsChart
from ..linalg import SymmetricPairing
from .grid import GridDomain, MetricField
from .newton import ConstrainedChart


class SeedError(ValueError):
    pass


def canonical_field(H: HiggsChart, C: SymmetricPairing, domain: GridDomain,
                    gap_tol: float = 1e-6) -> tuple[MetricField, np.ndarray]:
    """Pointwise canonical metric and the mask of nodes where it is defined.

    At nodes where ``f`` fails to be regular semisimple (or an eigenvector is
    numerically isotropic) the value of the nearest valid node is used. At a
    defective point the computed eigenvalues still split by about ``sqrt(eps)``,
    so both thresholds sit well above that.
    """
    f = H(domain.z)
    ny, nx, r, _ = f.shape
    flat = f.reshape(-1, r, r)
    w, E = np.linalg.eig(flat)
    gaps = np.abs(w[:, :, None] - w[:, None, :])
    gaps[:, np.arange(r), np.arange(r)] = np.inf
    c0 = np.abs(w).max(axis=1)
    ok = gaps.min(axis=(1, 2)) > gap_tol * np.maximum(c0, 1e-300)
    q = np.einsum("nai,ab,nbi->ni", E, C.gram, E)
    norms = np.linalg.norm(E, axis=1) ** 2
    ok &= (np.abs(q) > gap_tol * norms).all(axis=1)
    # C-normalize; the sign of the square root drops out of the metric
    E = E / np.sqrt(np.where(ok[:, None], q, 1.0))[:, None, :]
    P = np.empty_like(flat)
    good = np.nonzero(ok)[0]
    if len(good) == 0:
        raise SeedError("field is nowhere regular semisimple on the grid")
    Einv = np.linalg.inv(E[good])
    G = np.swapaxes(Einv, -1, -2) @ np.conj(Einv)
    P[good] = np.swapaxes(G, -1, -2)
    bad = np.nonzero(~ok)[0]
    if len(bad):
        zz = domain.z.ravel()
        nearest = good[np.argmin(np.abs(zz[bad][:, None] - zz[good][None, :]), axis=1)]
        P[bad] = P[nearest]
    P = 0.5 * (P + np.conj(np.swapaxes(P, -1, -2)))
    return MetricField(domain, P.reshape(ny, nx, r, r), C), ok.reshape(ny, nx)


def perturbation_direction(r: int) -> np.ndarray:
    """Fixed unit-norm antisymmetric direction in the exponential chart."""
    Y = np.zeros((r, r))
    iu = np.triu_indices(r, 1)
    Y[iu] = np.linspace(1.0, 0.5, len(iu[0]))
    Y = Y - Y.T
    return Y / np.linalg.norm(Y)


def perturbed(m: MetricField, eps: float, profile=None) -> MetricField:
    """Shift the exponential-chart coordinates of ``m`` by ``eps * profile(z) * Y0``."""
    chart = ConstrainedChart(m.C)
    comps = chart.components_from_ambient(m.P)
    Y0 = chart.components(perturbation_direction(m.r))
    zz = m.domain.z
    amp = np.ones_like(zz.real) if profile is None else np.asarray(profile(zz), dtype=float)
    comps = comps + eps * amp[..., None] * Y0
    P, _, _ = chart.metric(comps)
    return MetricField(m.domain, chart.to_ambient(P), m.C)


def constant_seed(P0: np.ndarray, C: SymmetricPairing, domain: GridDomain) -> MetricField:
    return MetricField.constant(domain, P0, C)


SEED_RULES = ("canonical", "perturbed", "identity", "reference")


def parse_seed_rule(rule: str) -> tuple[str, float | None]:
    """Split ``name[:eps]`` and check it; the size only applies to ``perturbed``."""
    name, _, arg = str(rule).partition(":")
    if name not in SEED_RULES:
        raise SeedError(f"unknown seed rule {rule!r}")
    if name != "perturbed":
        if arg:
            raise SeedError(f"seed rule {name!r} takes no argument")
        return name, None
    try:
        eps = float(arg) if arg else 0.2
    except ValueError as exc:
        raise SeedError(f"bad perturbation size in {rule!r}") from exc
    if not np.isfinite(eps):
        raise SeedError(f"bad perturbation size in {rule!r}")
    return name, eps


def seed_from_rule(rule: str, H: HiggsChart, C: SymmetricPairing, domain: GridDomain
                   ) -> MetricField:
    """``canonical``, ``perturbed:<eps>``, ``identity`` or ``reference``."""
    name, eps = parse_seed_rule(rule)
    if name == "canonical":
        return canonical_field(H, C, domain)[0]
    if name == "perturbed":
        return perturbed(canonical_field(H, C, domain)[0], eps)
    chart = ConstrainedChart(C)
    P = chart.to_ambient(np.eye(C.dim, dtype=complex))
    return MetricField.constant(domain, P, C)
