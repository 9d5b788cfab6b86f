"""Dense eigenvalues of general complex matrices, eigenpair residuals, spectrum matching.

The eigensolver is a textbook complex Schur iteration: Householder reduction to
Hessenberg form, then single-shift QR steps (Wilkinson shift, Givens rotations)
on the active window with deflation of negligible subdiagonals. Eigenvectors are
computed on request by inverse iteration against the original matrix.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

MAX_DIM = 4096
EPS = np.finfo(float).eps


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    iterations: int
    deflations: int
    backward_errors: np.ndarray
    converged: np.ndarray
    vectors: np.ndarray | None = None
    vector_residuals: np.ndarray | None = None

    @property
    def all_converged(self) -> bool:
        return bool(self.converged.all())

    def sorted(self) -> np.ndarray:
        return sort_complex(self.eigenvalues)


@dataclass
class MatchReport:
    pairs: list[tuple[complex, complex, float]] = field(default_factory=list)
    unmatched: list[tuple[complex, float]] = field(default_factory=list)
    coverage: float = 0.0

    @property
    def max_distance(self) -> float:
        return max((d for _, _, d in self.pairs), default=0.0)


def sort_complex(values) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    return values[np.lexsort((values.imag, values.real))]


def to_dense(A) -> np.ndarray:
    if sp.issparse(A):
        if A.shape[0] > MAX_DIM:
            raise ValueError(f"dense conversion limited to dimension {MAX_DIM}")
        return A.toarray().astype(complex)
    return np.array(A, dtype=complex)


def hessenberg(A) -> np.ndarray:
    """Unitarily similar upper Hessenberg matrix (Householder reflections)."""
    H = np.array(A, dtype=complex)
    n = H.shape[0]
    for j in range(n - 2):
        x = H[j + 1 :, j]
        norm_x = np.linalg.norm(x)
        if norm_x == 0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * norm_x
        v /= np.linalg.norm(v)
        H[j + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ H[j + 1 :, :])
        H[:, j + 1 :] -= 2.0 * np.outer(H[:, j + 1 :] @ v, v.conj())
        H[j + 2 :, j] = 0
    return H


def _eig2(a, b, c, d):
    """Eigenvalues of [[a, b], [c, d]], the first one closer to d."""
    half_tr = 0.5 * (a + d)
    disc = cmath.sqrt(0.25 * (a - d) ** 2 + b * c)
    l1, l2 = half_tr + disc, half_tr - disc
    # recompute the smaller root from the determinant to avoid cancellation
    det = a * d - b * c
    if abs(l1) >= abs(l2) and l1 != 0:
        l2 = det / l1
    elif l2 != 0:
        l1 = det / l2
    return (l1, l2) if abs(l1 - d) <= abs(l2 - d) else (l2, l1)


def _qr_sweep(H, lo, hi, shift):
    """One explicitly shifted QR step on the window H[lo:hi+1, lo:hi+1]."""
    idx = np.arange(lo, hi + 1)
    H[idx, idx] -= shift
    rots = []
    for k in range(lo, hi):
        a, b = complex(H[k, k]), complex(H[k + 1, k])
        r = (abs(a) ** 2 + abs(b) ** 2) ** 0.5
        if r == 0:
            c, s = 1.0 + 0j, 0j
        else:
            c, s = a / r, b / r
        rows = H[k : k + 2, k : hi + 1]
        rk = rows[0].copy()
        rows[0] = c.conjugate() * rk + s.conjugate() * rows[1]
        rows[1] = c * rows[1] - s * rk
        rots.append((k, c, s))
    for k, c, s in rots:
        cols = H[lo : k + 2, k : k + 2]
        ck = cols[:, 0].copy()
        cols[:, 0] = ck * c + cols[:, 1] * s
        cols[:, 1] = cols[:, 1] * c.conjugate() - ck * s.conjugate()
    H[idx, idx] += shift


def dense_eigenvalues(A, vectors: bool = False, max_iter_per_value: int = 60) -> SpectrumReport:
    """All eigenvalues (with multiplicity) of a square complex matrix.

    Non-converged windows are reported through ``converged`` rather than dropped.
    With ``vectors=True`` each eigenvalue also gets a unit eigenvector from
    inverse iteration and its backward error ``||A v - lam v|| / ||A||``.
    """
    A = to_dense(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"matrix must be square, got {A.shape}")
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the limit {MAX_DIM}")
    if n == 0:
        empty = np.zeros(0, dtype=complex)
        return SpectrumReport(empty, 0, 0, np.zeros(0), np.zeros(0, dtype=bool))
    scale = max(np.abs(A).max(), np.finfo(float).tiny)
    H = hessenberg(A)
    eigs = np.zeros(n, dtype=complex)
    berr = np.zeros(n)
    conv = np.ones(n, dtype=bool)
    iterations = deflations = 0
    hi = n - 1
    its = 0
    while hi >= 0:
        if hi == 0:
            eigs[0] = H[0, 0]
            break
        lo = hi
        while lo > 0:
            sub = abs(H[lo, lo - 1])
            if sub <= EPS * (abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])) or sub <= EPS * scale * 1e-3:
                berr[lo] = sub / scale
                H[lo, lo - 1] = 0
                deflations += 1
                break
            lo -= 1
        if lo == hi:
            eigs[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        if lo == hi - 1:
            eigs[hi], eigs[hi - 1] = _eig2(H[lo, lo], H[lo, hi], H[hi, lo], H[hi, hi])
            hi -= 2
            its = 0
            continue
        if its >= max_iter_per_value:
            eigs[lo : hi + 1] = np.diag(H)[lo : hi + 1]
            conv[lo : hi + 1] = False
            berr[lo : hi + 1] = np.abs(np.diag(H, -1)[lo:hi]).max() / scale
            hi = lo - 1
            its = 0
            continue
        its += 1
        iterations += 1
        if its % 11 == 10:
            shift = H[hi, hi] + 1.5 * abs(H[hi, hi - 1])
        else:
            shift = _eig2(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])[0]
        _qr_sweep(H, lo, hi, shift)
    report = SpectrumReport(eigs, iterations, deflations, berr, conv)
    if vectors:
        report.vectors, report.vector_residuals = inverse_iteration(A, eigs)
    return report


def inverse_iteration(A, eigenvalues, steps: int = 3):
    """Unit eigenvectors for the given eigenvalues and their backward errors."""
    A = to_dense(A)
    n = A.shape[0]
    norm_a = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    rng = np.random.default_rng(12345)
    vecs = np.zeros((n, len(eigenvalues)), dtype=complex)
    res = np.zeros(len(eigenvalues))
    for j, lam_j in enumerate(eigenvalues):
        shifted = A - (lam_j + 1e-13 * norm_a) * np.eye(n)
        lu = sla.lu_factor(shifted, check_finite=False)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        for _ in range(steps):
            w = sla.lu_solve(lu, v, check_finite=False)
            nw = np.linalg.norm(w)
            if not np.isfinite(nw) or nw == 0:
                break
            v = w / nw
        vecs[:, j] = v
        res[j] = np.linalg.norm(A @ v - lam_j * v) / norm_a
    return vecs, res


def inf_norm(H) -> float:
    if sp.issparse(H):
        return float(abs(H).sum(axis=1).max()) if H.nnz else 0.0
    return float(np.abs(np.asarray(H)).sum(axis=1).max())


def eigenpair_residual(H, psi, E) -> float:
    """Relative residual ``||H psi - E psi|| / (||H||_inf ||psi||)``."""
    psi = np.asarray(psi, dtype=complex)
    norm_psi = np.linalg.norm(psi)
    if norm_psi == 0:
        raise ValueError("eigenpair residual of the zero vector is undefined")
    scale = inf_norm(H) or 1.0
    return float(np.linalg.norm(H @ psi - E * psi) / (scale * norm_psi))


def raw_residual(H, psi, E) -> float:
    """``||H psi - E psi|| / ||psi||`` without operator normalization."""
    psi = np.asarray(psi, dtype=complex)
    norm_psi = np.linalg.norm(psi)
    if norm_psi == 0:
        raise ValueError("eigenpair residual of the zero vector is undefined")
    return float(np.linalg.norm(H @ psi - E * psi) / norm_psi)


def match_spectra(predicted, exact: SpectrumReport | np.ndarray, tol: float) -> MatchReport:
    """Greedy nearest-neighbour matching; each exact eigenvalue is used at most once.

    Exact values are sorted by (real, imag) first; among equal distances the smaller
    exact index wins, then the earlier prediction.
    """
    ex = exact.eigenvalues if isinstance(exact, SpectrumReport) else np.asarray(exact)
    ex = sort_complex(ex)
    predicted = [complex(p) for p in predicted]
    report = MatchReport()
    if not predicted:
        return report
    dist = np.abs(np.asarray(predicted)[:, None] - ex[None, :])
    order = sorted(
        ((dist[i, j], j, i) for i in range(len(predicted)) for j in range(len(ex)) if dist[i, j] <= tol)
    )
    used_pred, used_exact = {}, set()
    for d, j, i in order:
        if i in used_pred or j in used_exact:
            continue
        used_pred[i] = j
        used_exact.add(j)
    for i, p in enumerate(predicted):
        if i in used_pred:
            j = used_pred[i]
            report.pairs.append((p, complex(ex[j]), float(dist[i, j])))
        else:
            nearest = float(dist[i].min()) if len(ex) else float("inf")
            report.unmatched.append((p, nearest))
    report.coverage = len(used_exact) / len(ex) if len(ex) else 0.0
    return report
