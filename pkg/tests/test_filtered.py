from fractions import Fraction

import pytest
import sympy as sp

from higgsreal.filtered import (FilteredError, FilteredLattice, ModelPairing, brute_force_search,
                                classify_intermediate, dual_lattice, enumerate_compatible, equal,
                                filtrations_equal, is_compatible_with, lattice_certificate,
                                normalize, rank1_oracle, rank1_perfectness)

I = sp.I


def _members(fams):
    out = fams.type_I + fams.type_II + fams.type_III_2
    out += [F.member((F.lower + F.upper) / 2) for F in fams.type_III_1]
    return out


@pytest.mark.parametrize("m", [(0, 0), (1, 1), (1, 0), (0, 1)])
def test_enumerated_members_pass_both_routes(m):
    P = ModelPairing(m)
    fams = enumerate_compatible(P)
    members = _members(fams)
    assert members
    for L in members:
        assert is_compatible_with(L, P)[0]
        assert lattice_certificate(L, P)[0]
    if m[0] == m[1]:
        assert len(fams.type_I) == 1 and len(fams.type_II) == 2 and len(fams.type_III_1) == 2
        assert not fams.type_III_2
    else:
        assert len(fams.type_III_2) == 1
        assert not (fams.type_I or fams.type_II or fams.type_III_1)


@pytest.mark.parametrize("L", [
    FilteredLattice.typeN((0, 0), 0),
    FilteredLattice.typeN((1, 0), "-1/2"),
    FilteredLattice.typeNA((0, 0), (1, 1), "-1/2"),
    FilteredLattice.typeNA((0, 0), (1, I), "-1/3"),
    FilteredLattice.typeNAB((0, 0), (1, I), ("-1/4", "-3/4")),
    FilteredLattice.typeNAB((1, 0), (0, 1), ("1/2", "-1/4")),
])
def test_closed_form_agrees_with_lattice_oracle(L):
    for m in ((0, 0), (1, 1), (1, 0), (0, 1)):
        P = ModelPairing(m)
        assert is_compatible_with(L, P)[0] == lattice_certificate(L, P)[0]


def test_normalize_preserves_filtration():
    cases = [
        FilteredLattice.typeN((2, 1), "3/2"),
        FilteredLattice.typeNA((0, 1), (1, 0), "-1/3"),
        FilteredLattice.typeNA((0, 1), (0, 5), "-1/3"),
        FilteredLattice.typeNAB((0, 0), (2, 0), ("-1/4", "-3/4")),
        FilteredLattice.typeNAB((1, 2), (1, I), ("5/4", "1/2")),
    ]
    for L in cases:
        N = normalize(L)
        assert filtrations_equal(L, N)
        assert -1 < N.b[-1] <= 0
        assert equal(L, N)


def test_equal_distinguishes_alpha():
    A = FilteredLattice.typeNA((0, 0), (1, I), "-1/2")
    B = FilteredLattice.typeNA((0, 0), (1, -I), "-1/2")
    assert not equal(A, B)
    assert equal(A, FilteredLattice.typeNA((0, 0), (2, 2 * I), "-1/2"))


def test_dual_lattice():
    n, beta = dual_lattice((0, 0), (1, I))
    assert n == (1, 1)
    assert sp.expand(beta[0] - 1) == 0 and sp.expand(beta[1] - I) == 0


def test_type_iii_1_parameter_relabeling():
    F = enumerate_compatible(ModelPairing((0, 0))).type_III_1[0]
    L = F.member("-1/4")
    # the free parameter is the lower jump b2; b1 = -b2 - m
    assert L.b == (Fraction(1, 4), Fraction(-1, 4))
    assert F.contains(L) and F.contains(normalize(L))
    with pytest.raises(FilteredError):
        F.member("-1/2")


@pytest.mark.parametrize("b,k", [("-1/2", 1), ("0", 0), ("-1", 2), ("1/3", 0), ("-1/2", 0)])
def test_rank_one_closed_form_and_oracle(b, k):
    rep = rank1_perfectness(b, k)
    assert rep.perfect == rank1_oracle(b, k)
    assert rep.degree == -Fraction(b)
    assert (rep.normalized_degree == 0) == rep.perfect


@pytest.mark.parametrize("m", [(0, 1), (1, 1)])
def test_brute_force_small_grid_stays_inside(m):
    P = ModelPairing(m)
    fams = enumerate_compatible(P)
    hits = brute_force_search(P, n_range=range(-1, 2), max_den=4)
    assert hits
    assert all(fams.contains(L) for L in hits)


def test_classify_intermediate():
    out = classify_intermediate((0, 0))
    assert out["intermediate"]["family"] == "V^(n,alpha)"
    out = classify_intermediate((0, 0), (1, 1))
    assert out["residue_nilpotent"]
    assert [x["family"] for x in out["intermediate"]] == ["zV^(n)"]
    deg = classify_intermediate((0, 0), (0, 1))
    assert "note" in deg


def test_input_validation():
    with pytest.raises(FilteredError):
        FilteredLattice.typeN((0, 0), 0.5)
    with pytest.raises(FilteredError):
        FilteredLattice.typeNA((0, 0), (0, 0), 0)
    with pytest.raises(FilteredError):
        FilteredLattice.typeNA((0, 0), (1, sp.sqrt(2)), 0)
    with pytest.raises(FilteredError):
        FilteredLattice.typeNAB((0, 0), (1, 1), (0, 0))
    with pytest.raises(FilteredError):
        ModelPairing((2, 0))
    with pytest.raises(FilteredError):
        FilteredLattice.from_json({"family": "typeN"})
    L = FilteredLattice.typeNAB((1, 0), (1, I), ("1/2", "-1/4"))
    assert equal(FilteredLattice.from_json(L.to_json()), L)
