import numpy as np
import pytest

from oracles import kink_metric, random_constant_field

from higgsreal.fields import HiggsChart, z
from higgsreal.hitchin import antidiagonal_pairing, build_cyclic, example1
from higgsreal.linalg import canonical_frame
from higgsreal.solver.diagnostics import (apriori_check, flatness_check, hitchin_residual,
                                          max_principle_check, nested_boxes)
from higgsreal.solver.discrete import compat_defect_field, log_s_norm
from higgsreal.solver.exhaustion import resample, solve_exhaustion, uniqueness_probe
from higgsreal.solver.grid import GridDomain, GridError, MetricField
from higgsreal.solver.newton import BoundaryError, ConstrainedChart, dirichlet_solve
from higgsreal.solver.seeds import SeedError, canonical_field, perturbed, seed_from_rule
from higgsreal.solver.toda import TodaError, constant_toda_solution, toda_solve


@pytest.fixture(scope="module")
def ex1():
    return example1(z, 1 - z / 2), antidiagonal_pairing(3)


# ------------------------------------------------------------- grids

def test_domain_parse_and_errors():
    d = GridDomain.parse("-1,1,-2,2,16,32")
    assert (d.nx, d.ny) == (16, 32)
    assert d.dx == pytest.approx(2 / 15)
    with pytest.raises(GridError):
        GridDomain.parse("0,1,0,1,16")
    with pytest.raises(GridError):
        GridDomain(1, 0, 0, 1, 16, 16)
    with pytest.raises(GridError):
        GridDomain(0, 1, 0, 1, 4, 16)


def test_domain_with_hole_masks():
    d = GridDomain(-1, 1, -1, 1, 21, 21, holes=((0j, 0.25),))
    assert d.hole_mask[10, 10]
    assert not d.free_mask[10, 10]
    assert GridDomain.from_json(d.to_json()) == d


def test_metric_json_round_trip(ex1):
    H, C = ex1
    dom = GridDomain.square(1, 9)
    m = canonical_field(H, C, dom)[0]
    back = MetricField.from_json(m.to_json())
    assert np.allclose(back.P, m.P)
    assert back.domain == dom


# ------------------------------------------------------------- constrained chart

def test_chart_round_trip_and_rejection(ex1):
    H, C = ex1
    chart = ConstrainedChart(C)
    rng = np.random.default_rng(0)
    c = rng.normal(size=(5, chart.m))
    P, _, _ = chart.metric(c)
    amb = chart.to_ambient(P)
    assert np.allclose(chart.components_from_ambient(amb), c)
    with pytest.raises(BoundaryError):
        chart.components_from_ambient(np.diag([2.0, 1.0, 1.0]).astype(complex)[None])


# ------------------------------------------------------------- Dirichlet solver

def test_constant_field_returns_canonical_metric():
    H, C, _ = random_constant_field(3, np.random.default_rng(3))
    dom = GridDomain.square(1, 17)
    can = canonical_field(H, C, dom)[0]
    m, rep = dirichlet_solve(H, C, can)
    assert rep.converged
    assert log_s_norm(m.P, can.P).max() < 1e-10


def test_kink_solution_converges_at_second_order():
    H, C, F = random_constant_field(2, np.random.default_rng(4))
    lam, _ = canonical_frame(F, C)
    x0 = -0.5 / (2 * abs(lam[0] - lam[1]))
    errs, res = [], []
    for n in (17, 33):
        dom = GridDomain(0, 1, 0, 1, n, n)
        exact = kink_metric(F, C, dom, x0)
        res.append(hitchin_residual(exact, H).max())
        m, rep = dirichlet_solve(H, C, exact, tol=1e-10)
        assert rep.converged
        errs.append(log_s_norm(m.P, exact.P).max())
    assert errs[0] / errs[1] > 3
    assert res[1] < res[0]


def test_every_iterate_is_compatible(ex1):
    H, C = ex1
    dom = GridDomain.square(1, 17)
    seen = []
    seed = seed_from_rule("perturbed:0.3", H, C, dom)
    m, rep = dirichlet_solve(H, C, seed, tol=1e-9,
                             callback=lambda it, P: seen.append(compat_defect_field(P, C.gram).max()))
    assert rep.converged and len(seen) >= 2
    assert max(seen) < 1e-10
    assert rep.compat_sup == pytest.approx(max(seen))


def test_determinant_is_one_in_pairing_frame(ex1):
    H, C = ex1
    dom = GridDomain.square(1, 17)
    m, _ = dirichlet_solve(H, C, seed_from_rule("perturbed:0.3", H, C, dom))
    det = np.linalg.det(ConstrainedChart(C).to_tilde(m.P))
    assert np.abs(det - 1).max() < 1e-10


def test_boundary_on_wrong_grid_rejected(ex1):
    H, C = ex1
    seed = seed_from_rule("canonical", H, C, GridDomain.square(1, 9))
    with pytest.raises(BoundaryError):
        dirichlet_solve(H, C, seed, GridDomain.square(1, 11))


def test_seed_rules(ex1):
    H, C = ex1
    dom = GridDomain.square(1, 9)
    can = seed_from_rule("canonical", H, C, dom)
    d1 = log_s_norm(can.P, seed_from_rule("perturbed:0.1", H, C, dom).P).max()
    d2 = log_s_norm(can.P, seed_from_rule("perturbed:0.2", H, C, dom).P).max()
    assert 0 < d1 < d2 < 3 * d1
    with pytest.raises(SeedError):
        seed_from_rule("bogus", H, C, dom)
    with pytest.raises(SeedError):
        seed_from_rule("perturbed:x", H, C, dom)


def test_canonical_seed_fills_non_semisimple_nodes():
    H = HiggsChart.from_matrix([[0, z], [z, 0]])
    C = antidiagonal_pairing(2)
    m, ok = canonical_field(H, C, GridDomain.square(1, 9))
    assert not ok[4, 4] and ok.sum() == ok.size - 1
    assert np.allclose(m.P[4, 4], m.P[4, 5])


def test_canonical_seed_skips_defective_nodes(ex1):
    # the field is not diagonalizable at z = 2/3, but rounding splits the eigenvalues
    H, C = ex1
    dom = GridDomain.square(1, 13)
    m, ok = canonical_field(H, C, dom)
    j = np.argmin(np.abs(dom.z - 2 / 3))
    assert not ok.ravel()[j]
    assert compat_defect_field(m.P, C.gram).max() < 1e-10
    ConstrainedChart(C).components_from_ambient(m.P)


# ------------------------------------------------------------- diagnostics

def test_curvature_equals_twice_residual():
    H, C = build_cyclic(1, 2)
    dom = GridDomain.square(1, 33)
    can = canonical_field(H, C, dom)[0]
    seed = perturbed(can, 0.3, lambda zz: np.cos(zz.real) * np.cosh(zz.imag))
    fl = flatness_check(seed, H)
    res = hitchin_residual(seed, H)
    inner = (slice(8, -8), slice(8, -8))
    assert np.allclose(fl.curvature[inner], 2 * res[inner], rtol=0.05)
    m, _ = dirichlet_solve(H, C, seed, tol=1e-10)
    solved = flatness_check(m, H, margin=0.25)
    assert solved.curvature_sup < 0.05 * fl.curvature_sup
    # kappa is parallel only up to the O(dx^2) error of the difference quotients
    assert solved.kappa_sup < 1e-2


def test_max_principle_and_apriori(ex1):
    H, C = ex1
    dom = GridDomain.square(1, 21)
    ma, _ = dirichlet_solve(H, C, seed_from_rule("canonical", H, C, dom), tol=1e-9)
    mb, _ = dirichlet_solve(H, C, seed_from_rule("perturbed:0.3", H, C, dom), tol=1e-9)
    for box in nested_boxes(dom, 3):
        assert max_principle_check(ma, mb, box).holds
        assert max_principle_check(mb, ma, box).holds
    rep = apriori_check(ma, H, 0.25)
    assert rep.sup_f_h > 0 and rep.n_nodes > 0 and rep.A2 > 0
    with pytest.raises(GridError):
        max_principle_check(ma, mb, (0, 1, 0, 20))


# ------------------------------------------------------------- Toda reduction

def test_constant_toda_solution_is_exact():
    H, C = build_cyclic(4, 3)
    dom = GridDomain.square(1, 17)
    u = constant_toda_solution(16.0, 3)
    bu = np.broadcast_to(u, (17, 17, 3)).copy()
    m, rep, uu = toda_solve(H, dom, bu)
    assert rep.converged
    assert np.abs(uu - u).max() < 1e-10


def test_toda_rejects_bad_input(ex1):
    H, C = ex1
    dom = GridDomain.square(1, 9)
    with pytest.raises(TodaError):
        toda_solve(H, dom, np.zeros((9, 9, 3)))
    Hc, _ = build_cyclic(1, 2)
    with pytest.raises(TodaError):
        toda_solve(Hc, dom, np.ones((9, 9, 2)))


def test_toda_matches_newton_on_cyclic_rank_three():
    H, C = build_cyclic(1 + 0.5 * z, 3)
    dom = GridDomain.square(1, 17)
    zz = dom.z
    v = 0.2 * np.cos(zz.real + zz.imag)
    bu = np.stack([v, np.zeros_like(v), -v], axis=-1)
    mt, rt, _ = toda_solve(H, dom, bu, tol=1e-9)
    mn, rn = dirichlet_solve(H, C, MetricField(dom, mt.P, C), tol=1e-9)
    assert rt.converged and rn.converged
    assert np.abs(mt.P - mn.P).max() < 1e-7


# ------------------------------------------------------------- exhaustion

def test_resample_is_exact_on_own_grid_and_smooth_elsewhere(ex1):
    H, C = ex1
    big = GridDomain.square(2, 33)
    small = GridDomain.square(1, 17)
    m = canonical_field(H, C, big)[0]
    assert resample(m, big) is m.P
    direct = canonical_field(H, C, small)[0]
    assert log_s_norm(resample(m, small), direct.P).max() < 1e-3


def test_exhaustion_and_probe_small(ex1):
    H, C = ex1
    doms = [GridDomain.square(w, 17) for w in (1, 2)]
    res = solve_exhaustion(H, C, doms, tol=1e-8)
    assert res.converged and len(res.diagnostic) == 1
    tr = uniqueness_probe(H, C, doms, "canonical", "perturbed:0.2", tol=1e-8)
    assert tr.strictly_decreasing
    with pytest.raises(GridError):
        solve_exhaustion(H, C, doms[::-1])
