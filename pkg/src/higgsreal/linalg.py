"""Symmetric pairings, Hermitian metrics and the real structures they induce.

Storage conventions
-------------------
A Hermitian metric ``h`` is stored through its Gram matrix ``G[i, j] = h(e_i, e_j)``,
with ``h`` linear in the first slot. Internally we mostly use ``P = G.T`` so that
``h(u, v) = v^H P u``. A symmetric pairing ``C`` is stored as ``Cg[i, j] = C(e_i, e_j)``
so that ``C(u, v) = u^T Cg v``.

The anti-linear map ``kappa`` attached to ``(C, h)`` is ``v -> K conj(v)`` with
``K = Cg^{-1} G``; it satisfies ``h(u, v) = C(u, kappa v)`` and squares to the
identity exactly when ``h`` is compatible with ``C``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

CArray = NDArray[np.complex128]

HERM_TOL = 1e-12
KAPPA_TOL = 1e-10
GAP_REL_TOL = 1e-8


class LinalgError(ValueError):
    """Raised when an input violates a precondition of a linear-algebra routine."""


def _as_square(a: ArrayLike, name: str) -> CArray:
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise LinalgError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class HermitianMetric:
    gram: CArray

    def __post_init__(self):
        g = _as_square(self.gram, "gram")
        scale = max(1.0, float(np.abs(g).max()))
        if np.abs(g - g.conj().T).max() > HERM_TOL * scale:
            raise LinalgError("metric Gram matrix is not Hermitian")
        w = np.linalg.eigvalsh(0.5 * (g + g.conj().T))
        if w.min() <= 0:
            raise LinalgError("metric Gram matrix is not positive definite")
        object.__setattr__(self, "gram", 0.5 * (g + g.conj().T))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def P(self) -> CArray:
        """Matrix with ``h(u, v) = v^H P u``."""
        return self.gram.T

    @classmethod
    def from_P(cls, P: ArrayLike) -> "HermitianMetric":
        return cls(np.asarray(P, dtype=np.complex128).T)

    def inner(self, u: ArrayLike, v: ArrayLike) -> complex:
        return complex(np.conj(v) @ self.P @ np.asarray(u))

    def adjoint(self, f: ArrayLike) -> CArray:
        """Adjoint of the endomorphism ``f`` with respect to ``h``."""
        P = self.P
        return np.linalg.solve(P, np.asarray(f).conj().T @ P)


@dataclass(frozen=True)
class SymmetricPairing:
    gram: CArray
    cond: float = field(default=0.0, compare=False)

    def __post_init__(self):
        g = _as_square(self.gram, "gram")
        if not np.array_equal(g, g.T):
            raise LinalgError("pairing Gram matrix is not symmetric")
        cond = float(np.linalg.cond(g))
        if not np.isfinite(cond) or cond > 1e14:
            raise LinalgError(f"pairing is singular (condition number {cond:.3g})")
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "cond", cond)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def pair(self, u: ArrayLike, v: ArrayLike) -> complex:
        return complex(np.asarray(u) @ self.gram @ np.asarray(v))

    def is_symmetric_endo(self, F: ArrayLike, tol: float = 1e-10) -> bool:
        """True if ``C(Fu, v) = C(u, Fv)``."""
        F = np.asarray(F)
        lhs = F.T @ self.gram
        scale = max(1.0, np.abs(lhs).max())
        return bool(np.abs(lhs - self.gram @ F).max() <= tol * scale)


@dataclass(frozen=True)
class SymplecticPairing:
    gram: CArray

    def __post_init__(self):
        g = _as_square(self.gram, "gram")
        if g.shape[0] % 2:
            raise LinalgError("symplectic form needs even dimension")
        if not np.array_equal(g.T, -g):
            raise LinalgError("symplectic Gram matrix is not antisymmetric")
        if np.linalg.cond(g) > 1e14:
            raise LinalgError("symplectic form is singular")
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]


@dataclass(frozen=True)
class RealStructure:
    """Anti-linear map ``v -> matrix @ conj(v)``."""

    matrix: CArray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, v: ArrayLike) -> CArray:
        return self.matrix @ np.conj(np.asarray(v))

    def square(self) -> CArray:
        """Matrix of the linear map ``kappa o kappa``."""
        return self.matrix @ self.matrix.conj()

    def involution_defect(self, sign: int = 1) -> float:
        n = self.dim
        return float(np.abs(self.square() - sign * np.eye(n)).max())


def _check_dims(*objs) -> int:
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise LinalgError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def kappa(C: SymmetricPairing, h: HermitianMetric) -> RealStructure:
    _check_dims(C, h)
    return RealStructure(np.linalg.solve(C.gram, h.gram))


def compat_defect(C: SymmetricPairing, h: HermitianMetric) -> float:
    """Relative size of ``kappa o kappa - id``.

    The defect is divided by ``|K|^2`` so that badly conditioned but compatible
    pairs (for instance far out in the constrained group) are judged fairly.
    """
    k = kappa(C, h)
    scale = max(1.0, float(np.abs(k.matrix).max()) ** 2)
    return k.involution_defect() / scale


def is_compatible(C: SymmetricPairing, h: HermitianMetric, tol: float = KAPPA_TOL) -> bool:
    return compat_defect(C, h) <= tol


def real_fixed_space(K: ArrayLike, tol: float = 1e-8) -> CArray:
    """Columns spanning ``{v : K conj(v) = v}`` over the reals."""
    K = np.asarray(K, dtype=np.complex128)
    n = K.shape[0]
    Kr, Ki = K.real, K.imag
    # v = x + i y  ->  K conj(v) = (Kr x + Ki y) + i (Ki x - Kr y)
    M = np.block([[Kr, Ki], [Ki, -Kr]]) - np.eye(2 * n)
    _, sv, vt = np.linalg.svd(M)
    scale = max(1.0, sv[0])
    null = vt[sv <= tol * scale]
    if null.shape[0] < n:
        # singular values are sorted; take the n smallest regardless and let the caller verify
        null = vt[-n:]
    w = null.T
    return w[:n] + 1j * w[n:]


def common_orthonormal_basis(C: SymmetricPairing, h: HermitianMetric,
                             tol: float = 1e-9) -> CArray:
    """Basis (as matrix columns) orthonormal for both ``h`` and ``C``."""
    _check_dims(C, h)
    if not is_compatible(C, h, tol=max(tol, KAPPA_TOL)):
        raise LinalgError("metric is not compatible with the pairing")
    W = real_fixed_space(kappa(C, h).matrix)
    gram = W.T @ C.gram @ W
    # on the real form C restricts to a real inner product
    gram = 0.5 * (gram.real + gram.real.T)
    L = np.linalg.cholesky(gram)
    V = W @ np.linalg.inv(L).T
    err_c = np.abs(V.T @ C.gram @ V - np.eye(C.dim)).max()
    err_h = np.abs(V.conj().T @ h.P @ V - np.eye(C.dim)).max()
    if max(err_c, err_h) > tol * max(1.0, np.abs(V).max() ** 2):
        raise LinalgError(f"common orthonormal basis failed (C err {err_c:.2e}, h err {err_h:.2e})")
    return V


def _hermitian_part(a: CArray) -> CArray:
    return 0.5 * (a + a.conj().T)


def herm_exp(A: ArrayLike, h: HermitianMetric | None = None, tol: float = 1e-10) -> CArray:
    """Exponential of an endomorphism self-adjoint with respect to ``h``."""
    return _herm_fun(A, h, np.exp, tol, positive=False)


def herm_log(H: ArrayLike, h: HermitianMetric | None = None, tol: float = 1e-10) -> CArray:
    """Logarithm of a positive endomorphism self-adjoint with respect to ``h``."""
    return _herm_fun(H, h, np.log, tol, positive=True)


def _herm_fun(A, h, fn, tol, positive):
    A = _as_square(A, "argument")
    if h is None:
        R = Rinv = None
        B = A
    else:
        R, Rinv = _sqrt_pair(h.P)
        B = R @ A @ Rinv
        # rounding in the frame change grows with the conditioning of h
        tol = tol * float(np.linalg.cond(h.P))
    scale = max(1.0, np.abs(B).max())
    if np.abs(B - B.conj().T).max() > tol * scale:
        raise LinalgError("argument is not Hermitian with respect to the metric")
    w, U = np.linalg.eigh(_hermitian_part(B))
    if positive and w.min() <= 0:
        raise LinalgError("logarithm needs positive eigenvalues")
    out = (U * fn(w)) @ U.conj().T
    if R is not None:
        out = Rinv @ out @ R
    return out


def _sqrt_pair(P: CArray) -> tuple[CArray, CArray]:
    w, U = np.linalg.eigh(_hermitian_part(P))
    r = np.sqrt(w)
    return (U * r) @ U.conj().T, (U / r) @ U.conj().T


def transfer(h1: HermitianMetric, h2: HermitianMetric) -> CArray:
    """The endomorphism ``s`` with ``h2(u, v) = h1(s u, v)``."""
    _check_dims(h1, h2)
    s = np.linalg.solve(h1.P, h2.P)
    for h in (h1, h2):
        lhs, rhs = h.P @ s, s.conj().T @ h.P
        if np.abs(lhs - rhs).max() > 1e-8 * max(1.0, np.abs(lhs).max()):
            raise LinalgError("transfer is not self-adjoint; metrics badly conditioned")
    return s


@dataclass(frozen=True)
class ConstrainedAutomorphism:
    """Element of the constrained algebra (``flavor='algebra'``) or group (``'group'``)."""

    matrix: CArray
    flavor: str

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def algebra_defect(A: ArrayLike, C: SymmetricPairing, h: HermitianMetric) -> float:
    """Relative size of the two defining conditions, scaled by the sizes of the factors."""
    A = np.asarray(A)
    a = max(1.0, np.abs(A).max())
    herm = np.abs(h.P @ A - A.conj().T @ h.P).max() / (a * max(1.0, np.abs(h.P).max()))
    anti = np.abs(A.T @ C.gram + C.gram @ A).max() / (a * max(1.0, np.abs(C.gram).max()))
    return float(max(herm, anti))


def group_defect(f: ArrayLike, C: SymmetricPairing, h: HermitianMetric) -> float:
    f = np.asarray(f)
    a = max(1.0, np.abs(f).max())
    herm = np.abs(h.P @ f - f.conj().T @ h.P).max() / (a * max(1.0, np.abs(h.P).max()))
    iso = np.abs(f.T @ C.gram @ f - C.gram).max() / (a * a * max(1.0, np.abs(C.gram).max()))
    det = abs(np.linalg.det(f) - 1.0)
    return float(max(herm, iso, det))


def make_algebra(A: ArrayLike, C: SymmetricPairing, h: HermitianMetric,
                 tol: float = 1e-10) -> ConstrainedAutomorphism:
    A = _as_square(A, "A")
    if algebra_defect(A, C, h) > tol:
        raise LinalgError("matrix is not in the constrained algebra")
    return ConstrainedAutomorphism(A, "algebra")


def make_group(f: ArrayLike, C: SymmetricPairing, h: HermitianMetric,
               tol: float = 1e-9) -> ConstrainedAutomorphism:
    f = _as_square(f, "f")
    if group_defect(f, C, h) > tol:
        raise LinalgError("matrix is not in the constrained group")
    w = np.linalg.eigvals(f)
    if np.any(w.real <= 0):
        raise LinalgError("constrained group element must be positive")
    return ConstrainedAutomorphism(f, "group")


def algebra_from_frame(Y: ArrayLike, V: CArray) -> CArray:
    """Map a real antisymmetric ``Y`` to ``V (iY) V^{-1}``.

    In a frame orthonormal for both ``C`` and ``h`` the constrained algebra is
    exactly ``{iY : Y real antisymmetric}``.
    """
    Y = np.asarray(Y, dtype=float)
    return V @ (1j * Y) @ np.linalg.inv(V)


def constrained_exp(A: ConstrainedAutomorphism | ArrayLike, C: SymmetricPairing,
                    h: HermitianMetric, tol: float = 1e-10) -> ConstrainedAutomorphism:
    a = A.matrix if isinstance(A, ConstrainedAutomorphism) else A
    a = make_algebra(a, C, h, tol).matrix
    # the algebra is trace free; drop the rounding residue so that det exp(a) = 1
    a = a - (np.trace(a) / a.shape[0]) * np.eye(a.shape[0])
    f = herm_exp(a, h)
    return ConstrainedAutomorphism(f, "group")


def constrained_log(f: ConstrainedAutomorphism | ArrayLike, C: SymmetricPairing,
                    h: HermitianMetric, tol: float = 1e-9) -> ConstrainedAutomorphism:
    m = f.matrix if isinstance(f, ConstrainedAutomorphism) else f
    m = make_group(m, C, h, tol).matrix
    return ConstrainedAutomorphism(herm_log(m, h, tol=1e-8), "algebra")


def power(f: ConstrainedAutomorphism | ArrayLike, s: float, C: SymmetricPairing,
          h: HermitianMetric, tol: float = 1e-9) -> ConstrainedAutomorphism:
    log_f = constrained_log(f, C, h, tol).matrix
    return ConstrainedAutomorphism(herm_exp(s * log_f, h, tol=1e-8), "group")


@dataclass(frozen=True)
class PairBlock:
    """Eigenvalue pair ``(a, 1/a)`` with ``a >= 1``.

    For ``a == 1`` the block is the fixed eigenspace and ``low`` is empty.
    """

    a: float
    high: CArray
    low: CArray

    @property
    def space(self) -> CArray:
        return np.hstack([self.high, self.low])


def _group_eigs(w: NDArray, tol: float) -> list[list[int]]:
    order = np.argsort(w)
    groups: list[list[int]] = []
    for i in order:
        if groups and abs(np.log(w[i]) - np.log(w[groups[-1][-1]])) <= tol:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    return groups


def pair_decomposition(f: ConstrainedAutomorphism | ArrayLike, C: SymmetricPairing,
                       h: HermitianMetric, tol: float = 1e-8) -> list[PairBlock]:
    m = f.matrix if isinstance(f, ConstrainedAutomorphism) else np.asarray(f)
    m = make_group(m, C, h).matrix
    V = common_orthonormal_basis(C, h)
    # in the common frame f is Hermitian in the usual sense
    fv = np.linalg.solve(V, m @ V)
    w, U = np.linalg.eigh(_hermitian_part(fv))
    groups = _group_eigs(w, tol)
    logs = [float(np.mean(np.log(w[g]))) for g in groups]
    blocks: list[PairBlock] = []
    used = set()
    for gi, lg in enumerate(logs):
        if gi in used or lg < -tol:
            continue
        if abs(lg) <= tol:
            blocks.append(PairBlock(1.0, V @ U[:, groups[gi]], np.zeros((m.shape[0], 0), complex)))
            used.add(gi)
            continue
        partner = min(range(len(logs)), key=lambda j: abs(logs[j] + lg))
        if abs(logs[partner] + lg) > 10 * tol or len(groups[partner]) != len(groups[gi]):
            raise LinalgError("eigenvalues do not pair as (a, 1/a)")
        used.update((gi, partner))
        blocks.append(PairBlock(float(np.exp(lg)), V @ U[:, groups[gi]], V @ U[:, groups[partner]]))
    blocks.sort(key=lambda b: b.a)
    return blocks


def _phase_normalize(v: CArray) -> CArray:
    idx = int(np.argmax(np.abs(v) > 1e-12 * np.abs(v).max()))
    return v * (abs(v[idx]) / v[idx])


def spectral_constants(F: ArrayLike) -> tuple[float, float]:
    """``c0`` = spectral radius, ``c1`` = minimal eigenvalue gap."""
    w = np.linalg.eigvals(np.asarray(F))
    c0 = float(np.abs(w).max())
    d = np.abs(w[:, None] - w[None, :])
    d[np.diag_indices_from(d)] = np.inf
    c1 = float(d.min()) if len(w) > 1 else np.inf
    return c0, c1


def canonical_frame(F: ArrayLike, C: SymmetricPairing, gap_tol: float = GAP_REL_TOL,
                    sym_tol: float = 1e-10) -> tuple[CArray, CArray]:
    """Eigenvalues and eigenvectors of ``F`` normalized so that ``C(e_i, e_i) = 1``.

    Eigenvalues are sorted by (real, imaginary) part for determinism.
    """
    F = _as_square(F, "F")
    if F.shape != C.gram.shape:
        raise LinalgError("dimension mismatch")
    if not C.is_symmetric_endo(F, sym_tol):
        raise LinalgError("F is not symmetric with respect to C")
    w, E = np.linalg.eig(F)
    order = np.lexsort((w.imag, w.real))
    w, E = w[order], E[:, order]
    c0, c1 = spectral_constants(F)
    if c1 <= gap_tol * max(c0, 1e-300):
        raise LinalgError(f"F is not regular semisimple (gap {c1:.3g})")
    cols = []
    for i in range(len(w)):
        e = _phase_normalize(E[:, i])
        q = e @ C.gram @ e
        if abs(q) < 1e-12 * np.linalg.norm(e) ** 2:
            raise LinalgError("numerically isotropic eigenvector")
        cols.append(e / np.sqrt(q))
    return w, np.column_stack(cols)


def canonical_metric(F: ArrayLike, C: SymmetricPairing, gap_tol: float = GAP_REL_TOL,
                     sym_tol: float = 1e-10) -> HermitianMetric:
    _, E = canonical_frame(F, C, gap_tol, sym_tol)
    Einv = np.linalg.inv(E)
    # h(e_i, e_j) = delta_ij  <=>  E^T G conj(E) = I
    return HermitianMetric(Einv.T @ Einv.conj())


@dataclass(frozen=True)
class ComparisonBound:
    lhs: float
    rhs: float
    holds: bool
    B: float
    norm_F: float
    c0: float
    c1: float


def frobenius_h(F: ArrayLike, h: HermitianMetric) -> float:
    """Frobenius norm of ``F`` in an ``h``-orthonormal frame."""
    R, Rinv = _sqrt_pair(h.P)
    return float(np.linalg.norm(R @ np.asarray(F) @ Rinv))


def comparison_constant(n: int, c0: float, c1: float, safety: float = 2.0) -> float:
    """Explicit constant for the comparison bound.

    Work in a frame ``e`` that is orthonormal for both ``h_can`` and ``C`` and
    a frame ``v = e K`` orthonormal for both ``h`` and ``C`` (so ``K^T K = 1``).

    * Entries of ``F^l`` in the frame ``v`` are at most ``|F|_h^l``.
    * ``K_{ki}^2 = sum_l (W^{-1})_{kl} (F^l)_{ii}``, with ``W`` the Vandermonde
      matrix of the eigenvalues. Row ``k`` of ``W^{-1}`` holds the coefficients
      of the Lagrange polynomial ``prod_{j != k} (T - a_j)/(a_k - a_j)``, whose
      absolute sum is at most ``B2 = ((1 + c0)/c1)^(n-1)``. Hence
      ``|K_ki|^2 <= B2 (1 + |F|_h)^(n-1)``.
    * ``H = h(e_i, e_j) = K conj(K)^T`` has diagonal entries at most
      ``n B2 (1 + |F|_h)^(n-1)``, and ``s(h_can, h)`` is positive with matrix
      ``H^T`` in the frame ``e`` while ``s^{-1}`` has matrix ``conj(H)^T``.
      Their trace norms are both ``tr H <= n^2 B2 (1+|F|_h)^(n-1)``.

    The returned ``B`` is ``safety * 2 n^2 B2``; the bound is used with the
    exponent ``n`` which only loosens it.
    """
    B2 = ((1.0 + c0) / c1) ** (n - 1)
    return safety * 2.0 * n * n * B2


def comparison_bound(F: ArrayLike, C: SymmetricPairing, h: HermitianMetric,
                     gap_tol: float = GAP_REL_TOL, compat_tol: float = 1e-8) -> ComparisonBound:
    """Compare ``|s(h_can,h)| + |s(h_can,h)^{-1}|`` against ``B (1+|F|_h)^n``.

    Norms of ``s`` are trace norms with respect to ``h_can``.
    """
    _check_dims(C, h)
    if compat_defect(C, h) > compat_tol:
        raise LinalgError("metric is not compatible with the pairing")
    _, E = canonical_frame(F, C, gap_tol)
    n = E.shape[0]
    H = E.T @ h.gram @ E.conj()
    lam = np.linalg.eigvalsh(_hermitian_part(H))
    if lam.min() <= 0:
        raise LinalgError("metric lost positivity numerically")
    lhs = float(np.sum(lam) + np.sum(1.0 / lam))
    c0, c1 = spectral_constants(F)
    B = comparison_constant(n, c0, c1)
    nf = frobenius_h(F, h)
    rhs = float(B * (1.0 + nf) ** n)
    return ComparisonBound(lhs, rhs, bool(lhs <= rhs), B, nf, c0, c1)


def symplectic_kappa(omega: SymplecticPairing, h: HermitianMetric) -> RealStructure:
    """Anti-linear map built from ``omega`` and ``h``; squares to ``-id`` iff compatible."""
    _check_dims(omega, h)
    return RealStructure(np.linalg.solve(h.gram, omega.gram.T).conj())


def symplectic_compatibility(omega: SymplecticPairing, h: HermitianMetric,
                             tol: float = KAPPA_TOL) -> bool:
    k = symplectic_kappa(omega, h)
    scale = max(1.0, float(np.abs(k.matrix).max()) ** 2)
    return k.involution_defect(sign=-1) / scale <= tol


def symplectic_pair_decomposition(f: ArrayLike, omega: SymplecticPairing, h: HermitianMetric,
                                  tol: float = 1e-8) -> list[PairBlock]:
    """Eigen-blocks ``(V(f,a), V(f,1/a))`` of an ``h``-positive, ``omega``-preserving ``f``."""
    f = _as_square(f, "f")
    _check_dims(omega, h)
    if not symplectic_compatibility(omega, h):
        raise LinalgError("metric is not compatible with the symplectic form")
    scale = max(1.0, np.abs(f).max() ** 2)
    if np.abs(f.T @ omega.gram @ f - omega.gram).max() > tol * scale:
        raise LinalgError("f does not preserve the symplectic form")
    R, Rinv = _sqrt_pair(h.P)
    B = R @ f @ Rinv
    if np.abs(B - B.conj().T).max() > tol * max(1.0, np.abs(B).max()):
        raise LinalgError("f is not self-adjoint with respect to h")
    w, U = np.linalg.eigh(_hermitian_part(B))
    if w.min() <= 0:
        raise LinalgError("f is not positive")
    U = Rinv @ U
    groups = _group_eigs(w, tol)
    logs = [float(np.mean(np.log(w[g]))) for g in groups]
    blocks = []
    for gi, lg in enumerate(logs):
        if lg < -tol:
            continue
        if abs(lg) <= tol:
            blocks.append(PairBlock(1.0, U[:, groups[gi]], np.zeros((f.shape[0], 0), complex)))
            continue
        partner = min(range(len(logs)), key=lambda j: abs(logs[j] + lg))
        if abs(logs[partner] + lg) > 10 * tol:
            raise LinalgError("eigenvalues do not pair as (a, 1/a)")
        blocks.append(PairBlock(float(np.exp(lg)), U[:, groups[gi]], U[:, groups[partner]]))
    blocks.sort(key=lambda b: b.a)
    return blocks


def random_symmetric_pairing(n: int, rng: np.random.Generator) -> tuple[SymmetricPairing, CArray]:
    """Random non-degenerate pairing ``M^T M`` together with ``M``."""
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    M = M + n * np.eye(n)
    S = M.T @ M
    return SymmetricPairing(0.5 * (S + S.T)), M


def random_antisymmetric(n: int, rng: np.random.Generator, scale: float = 1.0) -> NDArray:
    Y = rng.normal(size=(n, n))
    return scale * (Y - Y.T) / 2


def random_compatible_metric(M: CArray, rng: np.random.Generator,
                             scale: float = 1.0) -> HermitianMetric:
    """A metric compatible with ``C = M^T M``.

    ``V = M^{-1} exp(iY)`` is ``C``-orthonormal for real antisymmetric ``Y``;
    declaring it ``h``-orthonormal gives ``P = V^{-H} V^{-1}``.
    """
    n = M.shape[0]
    Y = random_antisymmetric(n, rng, scale)
    w, U = np.linalg.eigh(1j * Y)
    Vinv = (U * np.exp(-w)) @ U.conj().T @ M
    return HermitianMetric.from_P(Vinv.conj().T @ Vinv)
