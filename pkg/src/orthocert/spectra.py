"""Symmetric eigendecomposition (cyclic Jacobi) and PW-PCA."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polyalg import Polynomial, degree, homogenize
from .pwcov import pw_covariance

__all__ = [
    "PwPca",
    "EigenNotConverged",
    "sym_eigen",
    "pw_pca",
    "min_gap",
    "distinctness_check",
    "spectra_equal",
]

MAX_SWEEPS = 100
OFF_TOL = 1e-14
# magnitudes within this relative distance of the column maximum count as tied
SIGN_TIE_RTOL = 1e-9


class EigenNotConverged(ArithmeticError):
    pass


@dataclass(frozen=True)
class PwPca:
    """Principal variances ``lam`` (non-increasing) and axes ``V`` (columns).

    ``cov`` is the matrix that was diagonalized.
    """

    lam: np.ndarray
    V: np.ndarray
    cov: np.ndarray

    @property
    def n(self) -> int:
        return len(self.lam)

    def distinct(self, tol_rel: float = 1e-9) -> bool:
        return distinctness_check(self.lam, tol_rel)


def _off(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def _fix_signs(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for j in range(V.shape[1]):
        mags = np.abs(V[:, j])
        lead = int(np.flatnonzero(mags >= mags.max() * (1.0 - SIGN_TIE_RTOL))[0])
        if V[lead, j] < 0:
            V[:, j] = -V[:, j]
    return V


def sym_eigen(C, sym_tol: float = 1e-10, max_sweeps: int = MAX_SWEEPS):
    """Eigen-decompose a real symmetric matrix with cyclic Jacobi rotations.

    Returns ``(lam, V)`` with ``lam`` sorted non-increasing and ``C V = V
    diag(lam)``.  Each column of ``V`` has its largest-magnitude entry
    positive (lowest index wins ties).
    """
    A = np.array(C, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if not np.isfinite(A).all():
        raise ValueError("matrix entries must be finite")
    norm = float(np.linalg.norm(A))
    if np.abs(A - A.T).max(initial=0.0) > sym_tol * max(norm, 1.0):
        raise ValueError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)

    for _ in range(max_sweeps + 1):
        if _off(A) <= OFF_TOL * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise EigenNotConverged(f"Jacobi did not converge in {max_sweeps} sweeps")

    lam = np.diag(A).copy()
    order = np.argsort(-lam, kind="stable")
    return lam[order], _fix_signs(V[:, order])


def pw_pca(f: Polynomial) -> PwPca:
    """PW-PCA of ``f``: eigenpairs of the leading block of ``Cov(homogenize(f))``."""
    if f.is_zero():
        raise ValueError("PW-PCA of the zero polynomial is undefined")
    if f.nvars < 2:
        raise ValueError("PW-PCA needs at least two variables")
    if degree(f) < 1:
        raise ValueError("PW-PCA needs degree >= 1")
    n = f.nvars
    C = pw_covariance(homogenize(f))[:n, :n]
    lam, V = sym_eigen(C)
    return PwPca(lam=lam, V=V, cov=C)


def min_gap(lam) -> float:
    lam = np.asarray(lam, dtype=np.float64)
    if len(lam) < 2:
        return float("inf")
    return float(np.min(lam[:-1] - lam[1:]))


def distinctness_check(lam, tol_rel: float = 1e-9) -> bool:
    """True when consecutive principal variances are separated by more than
    ``tol_rel * max(lam[0], 1)``."""
    lam = np.asarray(lam, dtype=np.float64)
    return min_gap(lam) > tol_rel * max(float(lam[0]), 1.0)


def spectra_equal(lf, lg, tol_rel: float = 1e-6) -> bool:
    lf = np.asarray(lf, dtype=np.float64)
    lg = np.asarray(lg, dtype=np.float64)
    if lf.shape != lg.shape:
        raise ValueError("spectra have different lengths")
    return float(np.abs(lf - lg).max()) <= tol_rel * max(float(lf[0]), 1.0)
