"""Certificates of orthogonal equivalence.

Given ``f`` and ``g`` with distinct principal variances, both are rotated to
their canonical forms ``fhat = V_f . f`` and ``ghat = V_g . g``.  If
``sigma . fhat == ghat`` for a signflip ``sigma`` then
``R = V_f diag(sigma) V_g^T`` satisfies ``f(R x) = g(x)``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .polyalg import Polynomial, act_linear, coeff_max, coeff_norm, degree
from .spectra import PwPca, distinctness_check, min_gap, pw_pca, spectra_equal

__all__ = [
    "CertificationError",
    "NotEquivalent",
    "DegenerateSpectrum",
    "SpectraMismatch",
    "NoSignflipFound",
    "ResidualTooLarge",
    "CanonicalForm",
    "Certificate",
    "PartialCheck",
    "canonical_form",
    "find_signflip",
    "passing_signflips",
    "assemble_certificate",
    "residual_rel",
    "certify",
    "check_equivalence_partial",
]

DEFAULT_TOL = 1e-6
DISTINCT_TOL = 1e-9
_CHUNK = 64


class CertificationError(Exception):
    """Base class; ``lambda_f``/``lambda_g`` are attached when computed."""

    kind = "CertificationError"

    def __init__(self, message: str, lambda_f=None, lambda_g=None):
        super().__init__(message)
        self.lambda_f = lambda_f
        self.lambda_g = lambda_g


class NotEquivalent(CertificationError):
    kind = "NotEquivalent"


class DegenerateSpectrum(CertificationError):
    kind = "DegenerateSpectrum"


class SpectraMismatch(NotEquivalent):
    kind = "SpectraMismatch"


class NoSignflipFound(NotEquivalent):
    kind = "NoSignflipFound"


class ResidualTooLarge(CertificationError):
    kind = "ResidualTooLarge"


@dataclass(frozen=True)
class CanonicalForm:
    fhat: Polynomial
    axes: np.ndarray


@dataclass(frozen=True)
class Certificate:
    R: np.ndarray
    sigma: tuple[int, ...]
    residual_rel: float
    lambda_f: np.ndarray
    lambda_g: np.ndarray
    timings: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        return {
            "status": "ok",
            "R": self.R.tolist(),
            "sigma": list(self.sigma),
            "residual": self.residual_rel,
            "lambda_f": self.lambda_f.tolist(),
            "lambda_g": self.lambda_g.tolist(),
        }


@dataclass(frozen=True)
class PartialCheck:
    lambda_f: np.ndarray
    lambda_g: np.ndarray
    equal: bool

    @property
    def verdict(self) -> str:
        return "inconclusive" if self.equal else "not-equivalent"


def canonical_form(f: Polynomial, pca: PwPca) -> CanonicalForm:
    V = np.asarray(pca.V, dtype=np.float64)
    if V.shape != (f.nvars, f.nvars):
        raise ValueError("axes do not match the number of variables")
    return CanonicalForm(fhat=act_linear(V, f), axes=V)


# --------------------------------------------------------------------------
# signflip search


def _aligned(p: Polynomial, q: Polynomial):
    exps = np.vstack([p.exps, q.exps])
    uniq, inv = np.unique(exps, axis=0, return_inverse=True)
    inv = inv.ravel()
    a = np.zeros(len(uniq))
    b = np.zeros(len(uniq))
    a[inv[: len(p)]] = p.coefs
    b[inv[len(p):]] = q.coefs
    return uniq, a, b


def _sigma_from_bits(bits: int, n: int) -> tuple[int, ...]:
    # bit n-1-i is coordinate i so that integer order is lexicographic order
    return tuple(-1 if (bits >> (n - 1 - i)) & 1 else 1 for i in range(n))


def _lex_candidates(n: int) -> Iterator[int]:
    return iter(range(2**n))


def _parity_candidates(parity: np.ndarray, a, b, atol: float, n: int) -> Iterator[int]:
    """Candidates consistent with the sign pattern of large coefficients.

    A term whose coefficients both exceed ``atol`` in magnitude forces the
    parity of the signflip restricted to its odd exponents, so every passing
    signflip solves the resulting GF(2) system.  Solutions are produced in
    the same lexicographic order as :func:`_lex_candidates`.
    """
    pivots: dict[int, tuple[int, int]] = {}
    strong = (np.abs(a) > atol) & (np.abs(b) > atol)
    weights = 1 << np.arange(n - 1, -1, -1, dtype=object)
    for row, fa, gb in zip(parity[strong], a[strong], b[strong]):
        mask = int(np.dot(row.astype(object), weights))
        rhs = int((fa < 0) != (gb < 0))
        # eliminate on the lowest-order bit (latest coordinate) first
        while mask:
            low = mask & -mask
            if low not in pivots:
                break
            pm, pr = pivots[low]
            mask ^= pm
            rhs ^= pr
        if mask == 0:
            if rhs:
                return
            continue
        pivots[mask & -mask] = (mask, rhs)

    # back-substitute from the highest-order pivot down; rows touched later
    # only reference already-reduced pivots, so one pass suffices
    for low in sorted(pivots, reverse=True):
        mask, rhs = pivots[low]
        for other in sorted(pivots, reverse=True):
            if other > low and mask & other:
                om, orr = pivots[other]
                mask ^= om
                rhs ^= orr
        pivots[low] = (mask, rhs)

    free = [1 << (n - 1 - i) for i in range(n) if (1 << (n - 1 - i)) not in pivots]
    for k in range(2 ** len(free)):
        bits = 0
        for j, fb in enumerate(free):
            if (k >> (len(free) - 1 - j)) & 1:
                bits |= fb
        for low, (mask, rhs) in pivots.items():
            if rhs ^ (bin(mask & bits).count("1") & 1):
                bits |= low
        yield bits


def _search(fhat: Polynomial, ghat: Polynomial, tol_rel: float, parity: bool):
    if fhat.nvars != ghat.nvars:
        raise ValueError("canonical forms have different numbers of variables")
    n = fhat.nvars
    exps, a, b = _aligned(fhat, ghat)
    atol = tol_rel * max(coeff_max(fhat), coeff_max(ghat))
    odd = (exps % 2).astype(np.int64)
    # term t flips sign under candidate bits iff popcount(odd_t & bits) is odd
    weights = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
    if parity:
        source = _parity_candidates(odd, a, b, atol, n)
    else:
        source = _lex_candidates(n)
    order = np.argsort(-np.maximum(np.abs(a), np.abs(b)), kind="stable")
    odd, a, b = odd[order], a[order], b[order]
    while True:
        chunk = []
        for bits in source:
            chunk.append(bits)
            if len(chunk) == _CHUNK:
                break
        if not chunk:
            return
        cb = np.array(chunk, dtype=np.int64)
        # bit matrix (len(chunk), n) in coordinate order
        bitmat = (cb[:, None] & weights[None, :]) != 0
        flips = (bitmat.astype(np.int64) @ odd.T) % 2
        err = np.abs(np.where(flips == 1, -a, a) - b).max(axis=1, initial=0.0)
        for bits, e in zip(chunk, err):
            if e <= atol:
                yield _sigma_from_bits(int(bits), n)


def find_signflip(
    fhat: Polynomial, ghat: Polynomial, tol_rel: float = DEFAULT_TOL, parity: bool = False
) -> tuple[int, ...] | None:
    """Lexicographically first ``sigma`` (``+1`` before ``-1``) with
    ``max|sigma . fhat - ghat| <= tol_rel * max(max|fhat|, max|ghat|)``.

    ``parity=True`` restricts the enumeration to solutions of a GF(2) sign
    system; it returns the same ``sigma`` as the plain loop.
    """
    return next(_search(fhat, ghat, tol_rel, parity), None)


def passing_signflips(
    fhat: Polynomial, ghat: Polynomial, tol_rel: float = DEFAULT_TOL
) -> list[tuple[int, ...]]:
    """Every signflip that matches, in lexicographic order."""
    return list(_search(fhat, ghat, tol_rel, parity=False))


def assemble_certificate(Vf, sigma, Vg) -> np.ndarray:
    Vf = np.asarray(Vf, dtype=np.float64)
    Vg = np.asarray(Vg, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if Vf.shape != Vg.shape or Vf.shape != (len(sigma), len(sigma)):
        raise ValueError("dimension mismatch between axes and signflip")
    return (Vf * sigma[None, :]) @ Vg.T


def residual_rel(R, f: Polynomial, g: Polynomial) -> float:
    """``||R . f - g||_2 / max(||g||_2, 1)`` over coefficient vectors."""
    return coeff_norm(act_linear(R, f) - g) / max(coeff_norm(g), 1.0)


def _spectrum_str(lam) -> str:
    return "[" + ", ".join(f"{v:.6g}" for v in lam) + "]"


def certify(
    f: Polynomial,
    g: Polynomial,
    tol_rel: float = DEFAULT_TOL,
    *,
    distinct_tol: float = DISTINCT_TOL,
    parity: bool = False,
    timings: dict | None = None,
) -> Certificate:
    """Find ``R`` orthogonal with ``f(R x) = g(x)``.

    Raises :class:`DegenerateSpectrum`, :class:`SpectraMismatch`,
    :class:`NoSignflipFound` or :class:`ResidualTooLarge`.  When ``timings``
    is a dict it is filled with per-phase wall-clock seconds.
    """
    if f.nvars != g.nvars:
        raise ValueError(f"nvars mismatch: {f.nvars} vs {g.nvars}")
    if f.nvars < 2:
        raise ValueError("need at least two variables")
    df, dg = degree(f), degree(g)
    if df != dg:
        raise NotEquivalent(f"degrees differ ({df} vs {dg}); not orthogonally equivalent")
    if df < 2:
        raise ValueError("need degree >= 2")
    clock = time.perf_counter
    t = timings if timings is not None else {}
    start = clock()

    pf, pg = pw_pca(f), pw_pca(g)
    t["pwpca"] = clock() - start
    lf, lg = pf.lam, pg.lam
    for name, p in (("f", pf), ("g", pg)):
        if not distinctness_check(p.lam, distinct_tol):
            raise DegenerateSpectrum(
                f"principal variances of {name} are not distinct "
                f"(minimal gap {min_gap(p.lam):.3e}, spectrum {_spectrum_str(p.lam)})",
                lf, lg,
            )
    if not spectra_equal(lf, lg, tol_rel):
        raise SpectraMismatch(
            "spectra differ: not orthogonally equivalent "
            f"(max deviation {np.abs(lf - lg).max():.3e}; "
            f"lambda_f {_spectrum_str(lf)}, lambda_g {_spectrum_str(lg)})",
            lf, lg,
        )

    mark = clock()
    cf, cg = canonical_form(f, pf), canonical_form(g, pg)
    t["canonical"] = clock() - mark

    mark = clock()
    sigma = find_signflip(cf.fhat, cg.fhat, tol_rel, parity=parity)
    t["signflip"] = clock() - mark
    if sigma is None:
        raise NoSignflipFound(
            "no signflip matches the canonical forms: not orthogonally equivalent "
            "(or the tolerance is too tight)",
            lf, lg,
        )

    mark = clock()
    R = assemble_certificate(pf.V, sigma, pg.V)
    t["assemble"] = clock() - mark

    res = residual_rel(R, f, g)
    t["total"] = clock() - start
    if not res <= tol_rel:
        gap = min(min_gap(lf), min_gap(lg))
        raise ResidualTooLarge(
            f"residual {res:.3e} exceeds {tol_rel:.1e}; spectra agree and are distinct "
            f"(minimal gap {gap:.3e}), so the inputs are most likely not equivalent",
            lf, lg,
        )
    return Certificate(R=R, sigma=sigma, residual_rel=res, lambda_f=lf, lambda_g=lg, timings=dict(t))


def check_equivalence_partial(f: Polynomial, g: Polynomial, tol_rel: float = DEFAULT_TOL) -> PartialCheck:
    """Compare principal variances; unequal spectra rule out equivalence."""
    lf, lg = pw_pca(f).lam, pw_pca(g).lam
    return PartialCheck(lambda_f=lf, lambda_g=lg, equal=spectra_equal(lf, lg, tol_rel))
