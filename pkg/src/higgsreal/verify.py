"""Randomized property suite for the pairing linear algebra."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .linalg import (HermitianMetric, LinalgError, SymmetricPairing, algebra_from_frame,
                     canonical_metric, common_orthonormal_basis, comparison_bound, compat_defect,
                     constrained_exp, constrained_log, random_antisymmetric,
                     random_compatible_metric, random_symmetric_pairing, transfer)

# thresholds of the suite; the CLI prints them into its output header
THRESHOLDS = {"kappa": 1e-10, "exp_log": 1e-9, "det": 1e-10, "isometry": 1e-9}
STRESS_LOG_NORM = 20.0
STRESS_EVERY = 10
# rounding in the identities grows like eps * cond(h); draws above this are redrawn
COND_CAP = 1e4


@dataclass
class DimStats:
    dim: int
    trials: int = 0
    kappa: float = 0.0
    exp_log: float = 0.0
    det: float = 0.0
    isometry: float = 0.0
    bound_samples: int = 0
    bound_failures: int = 0
    stress_samples: int = 0
    max_stress_log_norm: float = 0.0
    redraws: int = 0
    errors: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (not self.errors and self.bound_failures == 0
                and all(getattr(self, k) <= v for k, v in THRESHOLDS.items()))

    def to_json(self) -> dict:
        return {"dim": self.dim, "trials": self.trials, "kappa": self.kappa,
                "exp_log": self.exp_log, "det": self.det, "isometry": self.isometry,
                "bound_samples": self.bound_samples, "bound_failures": self.bound_failures,
                "stress_samples": self.stress_samples,
                "max_stress_log_norm": self.max_stress_log_norm, "redraws": self.redraws,
                "errors": self.errors[:5], "passed": self.passed}


@dataclass
class SuiteResult:
    seed: int
    per_dim: list[DimStats]
    seconds: float

    @property
    def passed(self) -> bool:
        return all(d.passed for d in self.per_dim)

    def to_json(self) -> dict:
        return {"seed": self.seed, "thresholds": dict(THRESHOLDS), "cond_cap": COND_CAP,
                "stress_log_norm": STRESS_LOG_NORM, "passed": self.passed,
                "dims": [d.to_json() for d in self.per_dim]}


def random_c_symmetric(C: SymmetricPairing, rng: np.random.Generator) -> np.ndarray:
    """``C^{-1} S`` with ``S`` random symmetric; generically regular semisimple."""
    n = C.dim
    S = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return np.linalg.solve(C.gram, S + S.T)


def stressed_metric(h0: HermitianMetric, C: SymmetricPairing, rng: np.random.Generator,
                    log_norm: float) -> tuple[HermitianMetric, float]:
    """``h = h0(exp(A) ., .)`` with ``A`` in the constrained algebra and ``|A|_F = log_norm``."""
    V = common_orthonormal_basis(C, h0)
    Y = random_antisymmetric(C.dim, rng)
    Y *= log_norm / np.linalg.norm(Y)
    A = algebra_from_frame(Y, V)
    s = constrained_exp(A, C, h0, tol=1e-8).matrix
    P = h0.P @ s
    return HermitianMetric.from_P(0.5 * (P + P.conj().T)), float(np.linalg.norm(Y))


def h_frame(A: np.ndarray, h: HermitianMetric) -> np.ndarray:
    """Matrix of the endomorphism ``A`` in an ``h``-orthonormal frame."""
    w, U = np.linalg.eigh(h.P)
    R = (U * np.sqrt(w)) @ U.conj().T
    Ri = (U / np.sqrt(w)) @ U.conj().T
    return R @ A @ Ri


def h_relative(E: np.ndarray, A: np.ndarray, h: HermitianMetric) -> float:
    """``|E| / max(1, |A|)`` in operator norms of an ``h``-orthonormal frame."""
    a = np.linalg.norm(h_frame(A, h), 2)
    return float(np.linalg.norm(h_frame(E, h), 2) / max(1.0, a))


def _draw_pair(n: int, rng: np.random.Generator, st: DimStats):
    """Pairing and two compatible metrics, all with condition number at most ``COND_CAP``."""
    while True:
        C, M = random_symmetric_pairing(n, rng)
        if C.cond <= COND_CAP:
            hs = []
            for _ in range(20):
                h = random_compatible_metric(M, rng)
                if np.linalg.cond(h.P) <= COND_CAP:
                    hs.append(h)
                    if len(hs) == 2:
                        return C, M, hs[0], hs[1]
                else:
                    st.redraws += 1
        st.redraws += 1


def _trial(st: DimStats, rng: np.random.Generator, stress: bool) -> None:
    n = st.dim
    C, M, h1, h2 = _draw_pair(n, rng, st)
    st.kappa = max(st.kappa, compat_defect(C, h1), compat_defect(C, h2))

    V = common_orthonormal_basis(C, h1)
    A = algebra_from_frame(random_antisymmetric(n, rng), V)
    f = constrained_exp(A, C, h1)
    back = constrained_log(f, C, h1).matrix
    st.exp_log = max(st.exp_log, h_relative(back - A, A, h1))
    st.det = max(st.det, abs(np.linalg.det(h_frame(f.matrix, h1)) - 1.0))

    s = transfer(h1, h2)
    iso = np.abs(s.T @ C.gram @ s - C.gram).max() / max(1.0, np.abs(s).max() ** 2)
    st.isometry = max(st.isometry, float(iso))

    F = random_c_symmetric(C, rng)
    hcan = canonical_metric(F, C)
    metrics = [h1, h2]
    if stress:
        hs, ln = stressed_metric(hcan, C, rng, STRESS_LOG_NORM)
        metrics.append(hs)
        st.stress_samples += 1
        st.max_stress_log_norm = max(st.max_stress_log_norm, ln)
    for h in metrics:
        b = comparison_bound(F, C, h)
        st.bound_samples += 1
        st.bound_failures += int(not b.holds)


def run_linalg_suite(seed: int = 0, trials: int = 1000, dims=(2, 3, 4, 5)) -> SuiteResult:
    t0 = time.perf_counter()
    out = []
    for n in dims:
        rng = np.random.default_rng([seed, n])
        st = DimStats(n)
        for k in range(trials):
            try:
                _trial(st, rng, stress=(k % STRESS_EVERY == 0))
            except LinalgError as exc:
                st.errors.append(f"trial {k}: {exc}")
            st.trials += 1
        out.append(st)
    return SuiteResult(seed, out, time.perf_counter() - t0)
