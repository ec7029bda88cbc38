"""Nested Dirichlet problems on growing domains and the two-seed uniqueness probe."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline

from ..fields import HiggsChart
from ..linalg import SymmetricPairing
from .discrete import log_s_norm
from .grid import GridDomain, GridError, MetricField
from .newton import ConstrainedChart, SolveReport, dirichlet_solve
from .seeds import seed_from_rule


@dataclass
class ExhaustionResult:
    solutions: list[tuple[MetricField, SolveReport]]
    diagnostic: list[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return all(rep.converged for _, rep in self.solutions)


def check_nested(domains: list[GridDomain]) -> None:
    if not domains:
        raise GridError("empty domain family")
    for a, b in zip(domains, domains[1:]):
        if not b.contains(a) or a == b:
            raise GridError("domain family must be strictly increasing")


def resample(m: MetricField, target: GridDomain) -> np.ndarray:
    """Metric of ``m`` at the nodes of ``target`` (bicubic in the exponential chart)."""
    if m.domain == target:
        return m.P
    if not m.domain.contains(target):
        raise GridError("target grid is not inside the source grid")
    chart = ConstrainedChart(m.C)
    comps = chart.components_from_ambient(m.P)
    xs, ys = m.domain.xs, m.domain.ys
    tx, ty = target.xs, target.ys
    out = np.empty((target.ny, target.nx, chart.m))
    for a in range(chart.m):
        spl = RectBivariateSpline(ys, xs, comps[..., a], kx=3, ky=3)
        out[..., a] = spl(ty, tx)
    P, _, _ = chart.metric(out)
    return chart.to_ambient(P)


def solve_exhaustion(H: HiggsChart, C: SymmetricPairing, domains: list[GridDomain],
                     seed_rule: str = "canonical", tol: float = 1e-6, **solve_kw) -> ExhaustionResult:
    """Solve on each domain with boundary values from ``seed_rule``.

    The diagnostic entry ``i`` is the sup over the interior nodes of the smallest
    domain of ``|log s(h_i, h_{i+1})|``.
    """
    check_nested(domains)
    sols = []
    for d in domains:
        seed = seed_from_rule(seed_rule, H, C, d)
        sols.append(dirichlet_solve(H, C, seed, d, tol=tol, **solve_kw))
    core = domains[0]
    inner = core.free_mask
    diag = []
    prev = resample(sols[0][0], core)
    for m, _ in sols[1:]:
        cur = resample(m, core)
        diag.append(float(log_s_norm(prev[inner], cur[inner]).max()))
        prev = cur
    return ExhaustionResult(sols, diag)


@dataclass
class UniquenessTrace:
    gaps: list[float]
    run_a: ExhaustionResult
    run_b: ExhaustionResult
    core: tuple[float, float, float, float]

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.gaps, self.gaps[1:]))


def default_core(d: GridDomain) -> tuple[float, float, float, float]:
    """Central half of a domain."""
    cx, cy = 0.5 * (d.x0 + d.x1), 0.5 * (d.y0 + d.y1)
    hx, hy = 0.25 * (d.x1 - d.x0), 0.25 * (d.y1 - d.y0)
    return (cx - hx, cx + hx, cy - hy, cy + hy)


def uniqueness_probe(H: HiggsChart, C: SymmetricPairing, domains: list[GridDomain],
                     seed_a: str, seed_b: str, tol: float = 1e-6, core=None,
                     **solve_kw) -> UniquenessTrace:
    """Sup of ``|log s(h^A_i, h^B_i)|`` over a fixed core region for each domain."""
    check_nested(domains)
    core = tuple(core) if core is not None else default_core(domains[0])
    run_a = solve_exhaustion(H, C, domains, seed_a, tol, **solve_kw)
    run_b = run_a if seed_b == seed_a else solve_exhaustion(H, C, domains, seed_b, tol, **solve_kw)
    gaps = []
    for (ma, _), (mb, _) in zip(run_a.solutions, run_b.solutions):
        mask = ma.domain.region_mask(*core)
        if not mask.any():
            raise GridError("core region contains no grid nodes")
        gaps.append(float(log_s_norm(ma.P[mask], mb.P[mask]).max()))
    return UniquenessTrace(gaps, run_a, run_b, core)
