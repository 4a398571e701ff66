"""Polynomial-weighted covariance of homogeneous polynomials.

``Cov(f) = integral over S^{n-1} of f(x)^2 x x^T``.  :func:`pw_covariance`
evaluates it in closed form from the terms of ``f^2``: each term ``a x^mu``
contributes ``a * psi(mu)``, a matrix that is diagonal when ``mu`` is all
even, has two symmetric off-diagonal entries when ``mu`` has exactly two odd
entries, and vanishes otherwise.  The whole sum is scaled by
:func:`cov_scale`.

:func:`cov_oracle` and :func:`cov_quadrature_circle` compute the same matrix
by independent routes (Folland's monomial integrals; trapezoidal quadrature
on the circle) and exist for verification.

Working envelope: with ``d <= 15`` every double factorial involved is at
most ``29!! < 2**53`` so the psi weights are exact integers in float64.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .polyalg import Polynomial, degree, square

__all__ = [
    "double_factorial",
    "psi",
    "cov_scale",
    "pw_covariance",
    "variance_along",
    "sphere_monomial_integral",
    "cov_oracle",
    "cov_quadrature_circle",
]


def double_factorial(s: int) -> int:
    """``s!!`` with ``(-1)!! = 0!! = 1``."""
    if s < -1:
        raise ValueError("double factorial defined here for s >= -1")
    out = 1
    while s > 1:
        out *= s
        s -= 2
    return out


def _round_down_odd(s: int) -> int:
    return s if s % 2 else s - 1


@lru_cache(maxsize=None)
def _weight_table(size: int) -> np.ndarray:
    # entry k holds eta(k)!!
    table = np.array([float(double_factorial(_round_down_odd(k))) for k in range(size)])
    table.setflags(write=False)
    return table


def psi(mu) -> np.ndarray:
    """Integer matrix contributed by the monomial ``x^mu`` of ``f^2``."""
    mu = [int(m) for m in mu]
    if any(m < 0 for m in mu):
        raise ValueError("exponents must be non-negative")
    n = len(mu)
    weight = 1
    for m in mu:
        weight *= double_factorial(_round_down_odd(m))
    out = np.zeros((n, n))
    odd = [i for i, m in enumerate(mu) if m % 2]
    if not odd:
        out[np.diag_indices(n)] = [weight * (m + 1) for m in mu]
    elif len(odd) == 2:
        u, v = odd
        out[u, v] = out[v, u] = weight
    return out


def cov_scale(n: int, d: int) -> float:
    """``pi^(n/2) / (2^d Gamma(n/2 + d + 1))``, evaluated in log space."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    log = 0.5 * n * math.log(math.pi) - d * math.log(2.0) - math.lgamma(0.5 * n + d + 1)
    return math.exp(log)


def _require_homogeneous(f: Polynomial):
    if f.is_zero():
        raise ValueError("covariance of the zero polynomial is undefined here")
    if not f.is_homogeneous():
        raise ValueError("polynomial must be homogeneous (homogenize it first)")


def pw_covariance(f: Polynomial) -> np.ndarray:
    """Closed-form ``Cov(f)`` for a nonzero homogeneous ``f``."""
    _require_homogeneous(f)
    n, d = f.nvars, degree(f)
    sq = square(f)
    mu, a = sq.exps, sq.coefs
    table = _weight_table(int(mu.max()) + 1)
    w = a * np.prod(table[mu], axis=1)
    assert np.isfinite(w).all(), "psi accumulation overflowed"

    odd = mu % 2 == 1
    nodd = odd.sum(axis=1)
    acc = np.zeros((n, n))

    even = nodd == 0
    if even.any():
        acc[np.diag_indices(n)] = w[even] @ (mu[even] + 1)

    pair = nodd == 2
    if pair.any():
        # column indices of the two odd entries, in increasing order
        cols = np.nonzero(odd[pair])[1].reshape(-1, 2)
        np.add.at(acc, (cols[:, 0], cols[:, 1]), w[pair])
        upper = np.triu(acc, 1)
        acc = np.diag(np.diag(acc)) + upper + upper.T
    return cov_scale(n, d) * acc


def variance_along(f: Polynomial, u, tol: float = 1e-10) -> float:
    """Polynomial-weighted variance ``u^T Cov(f) u`` along a unit vector."""
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (f.nvars,):
        raise ValueError(f"direction must have length {f.nvars}")
    if abs(np.linalg.norm(u) - 1.0) > tol:
        raise ValueError("direction must be a unit vector")
    return float(u @ pw_covariance(f) @ u)


def sphere_monomial_integral(alpha) -> float:
    """Integral of ``x^alpha`` over the unit sphere (Folland's formula)."""
    alpha = [int(a) for a in alpha]
    if any(a < 0 for a in alpha):
        raise ValueError("exponents must be non-negative")
    if any(a % 2 for a in alpha):
        return 0.0
    halves = [0.5 * (a + 1) for a in alpha]
    log = sum(math.lgamma(h) for h in halves) - math.lgamma(sum(halves))
    return 2.0 * math.exp(log)


def cov_oracle(f: Polynomial) -> np.ndarray:
    """``Cov(f)`` entry by entry from sphere monomial integrals.

    Does not use :func:`psi`; intended for cross-checking only.
    """
    _require_homogeneous(f)
    n = f.nvars
    sq = square(f)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            total = 0.0
            for mu, a in zip(sq.exps, sq.coefs):
                alpha = list(mu)
                alpha[i] += 1
                alpha[j] += 1
                total += a * sphere_monomial_integral(alpha)
            out[i, j] = out[j, i] = total
    return out


def cov_quadrature_circle(f: Polynomial, nodes: int | None = None) -> np.ndarray:
    """``Cov(f)`` for two variables by the periodic trapezoidal rule.

    The integrand is a trigonometric polynomial of degree ``2d + 2`` so any
    ``nodes > 2d + 2`` is exact; the default uses ``4d + 8``.
    """
    _require_homogeneous(f)
    if f.nvars != 2:
        raise ValueError("circle quadrature needs exactly two variables")
    d = degree(f)
    m = nodes if nodes is not None else 4 * d + 8
    theta = 2.0 * np.pi * np.arange(m) / m
    x = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    w = f(x) ** 2 * (2.0 * np.pi / m)
    return (x * w[:, None]).T @ x
