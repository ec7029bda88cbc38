import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from higgsreal.linalg import (HermitianMetric, LinalgError, SymmetricPairing, SymplecticPairing,
                              algebra_from_frame, canonical_frame, canonical_metric,
                              common_orthonormal_basis, comparison_bound, compat_defect,
                              constrained_exp, constrained_log, is_compatible, kappa,
                              make_group, pair_decomposition, power, random_antisymmetric,
                              random_compatible_metric, random_symmetric_pairing,
                              symplectic_compatibility, symplectic_pair_decomposition, transfer)
from higgsreal.verify import random_c_symmetric, run_linalg_suite


def _pair(n, seed):
    rng = np.random.default_rng(seed)
    C, M = random_symmetric_pairing(n, rng)
    return rng, C, M


def test_pairing_rejects_asymmetric_and_singular():
    with pytest.raises(LinalgError):
        SymmetricPairing(np.array([[1, 2], [0, 1]], dtype=complex))
    with pytest.raises(LinalgError):
        SymmetricPairing(np.ones((2, 2), dtype=complex))


def test_metric_rejects_non_positive():
    with pytest.raises(LinalgError):
        HermitianMetric(np.diag([1.0, -1.0]).astype(complex))


def test_identity_metric_is_compatible_with_identity_pairing():
    C = SymmetricPairing(np.eye(3, dtype=complex))
    h = HermitianMetric(np.eye(3, dtype=complex))
    assert compat_defect(C, h) == 0.0
    assert is_compatible(C, h)


def test_incompatible_metric_detected():
    C = SymmetricPairing(np.eye(2, dtype=complex))
    h = HermitianMetric(np.diag([2.0, 1.0]).astype(complex))
    assert not is_compatible(C, h)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 5), seed=st.integers(0, 10_000))
def test_kappa_relates_h_and_c(n, seed):
    rng, C, M = _pair(n, seed)
    h = random_compatible_metric(M, rng)
    k = kappa(C, h)
    u = rng.normal(size=n) + 1j * rng.normal(size=n)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    lhs = h.inner(u, v)
    rhs = C.pair(u, k(v))
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))
    assert k.involution_defect() <= 1e-9 * max(1.0, np.abs(k.matrix).max() ** 2)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 5), seed=st.integers(0, 10_000))
def test_common_basis_is_orthonormal_for_both(n, seed):
    rng, C, M = _pair(n, seed)
    h = random_compatible_metric(M, rng)
    V = common_orthonormal_basis(C, h)
    scale = max(1.0, np.abs(V).max() ** 2)
    assert np.abs(V.T @ C.gram @ V - np.eye(n)).max() <= 1e-9 * scale
    assert np.abs(V.conj().T @ h.P @ V - np.eye(n)).max() <= 1e-9 * scale


def test_exp_log_power_round_trip():
    rng, C, M = _pair(3, 11)
    h = random_compatible_metric(M, rng)
    V = common_orthonormal_basis(C, h)
    A = algebra_from_frame(random_antisymmetric(3, rng), V)
    f = constrained_exp(A, C, h)
    assert abs(np.linalg.det(f.matrix) - 1) < 1e-10
    back = constrained_log(f, C, h).matrix
    assert np.abs(back - A).max() < 1e-8 * max(1.0, np.abs(A).max())
    half = power(f, 0.5, C, h).matrix
    assert np.abs(half @ half - f.matrix).max() < 1e-8 * np.abs(f.matrix).max()


def test_exp_rejects_outside_algebra():
    rng, C, M = _pair(3, 12)
    h = random_compatible_metric(M, rng)
    with pytest.raises(LinalgError):
        constrained_exp(np.eye(3), C, h)


def test_transfer_is_isometry_of_pairing():
    rng, C, M = _pair(4, 13)
    h1, h2 = random_compatible_metric(M, rng), random_compatible_metric(M, rng)
    s = transfer(h1, h2)
    u = rng.normal(size=4) + 1j * rng.normal(size=4)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert abs(h2.inner(u, v) - h1.inner(s @ u, v)) < 1e-9 * max(1.0, abs(h2.inner(u, v)))
    assert np.abs(s.T @ C.gram @ s - C.gram).max() < 1e-9 * max(1.0, np.abs(s).max() ** 2)


def test_pair_decomposition_pairs_eigenvalues():
    rng, C, M = _pair(4, 14)
    h = random_compatible_metric(M, rng)
    V = common_orthonormal_basis(C, h)
    A = algebra_from_frame(random_antisymmetric(4, rng), V)
    f = make_group(constrained_exp(A, C, h).matrix, C, h)
    blocks = pair_decomposition(f, C, h)
    dims = sum(b.space.shape[1] for b in blocks)
    assert dims == 4
    for b in blocks:
        assert b.a >= 1.0
        for i in range(b.high.shape[1]):
            v = b.high[:, i]
            assert np.linalg.norm(f.matrix @ v - b.a * v) < 1e-7 * np.linalg.norm(v) * b.a
        for i in range(b.low.shape[1]):
            v = b.low[:, i]
            assert np.linalg.norm(f.matrix @ v - v / b.a) < 1e-7 * np.linalg.norm(v)


def test_canonical_metric_makes_eigenvectors_orthogonal():
    rng, C, _ = _pair(3, 15)
    F = random_c_symmetric(C, rng)
    h = canonical_metric(F, C)
    lam, E = canonical_frame(F, C)
    G = E.conj().T @ h.P @ E
    assert np.abs(G - np.eye(3)).max() < 1e-9
    assert is_compatible(C, h)


def test_canonical_frame_rejects_repeated_eigenvalue():
    C = SymmetricPairing(np.eye(2, dtype=complex))
    with pytest.raises(LinalgError):
        canonical_frame(np.eye(2), C)


def test_comparison_bound_on_canonical_metric():
    rng, C, _ = _pair(3, 16)
    F = random_c_symmetric(C, rng)
    b = comparison_bound(F, C, canonical_metric(F, C))
    assert b.holds
    assert b.lhs == pytest.approx(6.0)


def test_symplectic_compatibility_and_pairs():
    J = np.array([[0, 1], [-1, 0]], dtype=complex)
    om = SymplecticPairing(J)
    h = HermitianMetric(np.eye(2, dtype=complex))
    assert symplectic_compatibility(om, h)
    f = np.diag([2.0, 0.5]).astype(complex)
    blocks = symplectic_pair_decomposition(f, om, h)
    assert len(blocks) == 1 and blocks[0].a == pytest.approx(2.0)


def test_suite_small_run_passes():
    res = run_linalg_suite(seed=1, trials=50)
    assert res.passed
    assert res.to_json()["dims"][0]["trials"] == 50
