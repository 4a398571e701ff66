"""Sparse multivariate polynomials with real (float64) coefficients.

A :class:`Polynomial` stores its terms as an integer exponent matrix and a
coefficient vector, kept in graded-lexicographic order (highest total degree
first, then lexicographically descending exponents).  Instances are treated
as immutable values.

The orthogonal group acts by ``(M . p)(x) = p(M x)``; see :func:`act_linear`.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Polynomial",
    "PolynomialSyntaxError",
    "parse_polynomial",
    "format_polynomial",
    "add",
    "scale",
    "mul",
    "square",
    "power",
    "homogenize",
    "act_linear",
    "act_signflip",
    "coeff_norm",
    "coeff_max",
    "degree",
    "allclose",
    "monomials_of_degree",
]


class PolynomialSyntaxError(ValueError):
    """Raised by :func:`parse_polynomial`; ``pos`` is the 0-based offset."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


def _grlex_order(exps: np.ndarray) -> np.ndarray:
    if exps.shape[0] == 0:
        return np.zeros(0, dtype=np.intp)
    keys = [-exps[:, i] for i in range(exps.shape[1] - 1, -1, -1)]
    keys.append(-exps.sum(axis=1))
    return np.lexsort(keys)


def _merge(exps: np.ndarray, coefs: np.ndarray):
    """Sum duplicate exponents, drop exact zeros, sort graded-lex."""
    if exps.shape[0] == 0:
        return exps.reshape(0, exps.shape[1]), coefs.reshape(0)
    nvars = exps.shape[1]
    base = int(exps.max()) + 1 if exps.size else 1
    if nvars and base ** nvars < 2**62:
        radix = base ** np.arange(nvars - 1, -1, -1, dtype=np.int64)
        keys = exps @ radix
        uniq, inv = np.unique(keys, return_inverse=True)
        summed = np.bincount(inv.ravel(), weights=coefs, minlength=len(uniq))
        uexps = (uniq[:, None] // radix) % base
    else:
        uexps, inv = np.unique(exps, axis=0, return_inverse=True)
        summed = np.bincount(inv.ravel(), weights=coefs, minlength=len(uexps))
    keep = summed != 0
    uexps, summed = uexps[keep], summed[keep]
    order = _grlex_order(uexps)
    return uexps[order], summed[order]


class Polynomial:
    """A polynomial in ``nvars`` variables ``x1..x<nvars>``.

    ``terms`` maps exponent tuples to coefficients.  Repeated exponents are
    impossible in a mapping, so use :meth:`from_arrays` to merge raw term
    lists.
    """

    __slots__ = ("nvars", "exps", "coefs", "_terms")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], float] | None = None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        items = list((terms or {}).items())
        exps = np.array([tuple(e) for e, _ in items], dtype=np.int64).reshape(len(items), nvars)
        coefs = np.array([float(c) for _, c in items], dtype=np.float64)
        self._init(nvars, exps, coefs)

    def _init(self, nvars, exps, coefs):
        if exps.ndim != 2 or exps.shape[1] != nvars:
            raise ValueError(f"exponents must have length {nvars}")
        if (exps < 0).any():
            raise ValueError("exponents must be non-negative")
        if not np.isfinite(coefs).all():
            raise ValueError("coefficients must be finite")
        exps, coefs = _merge(exps, coefs)
        exps.setflags(write=False)
        coefs.setflags(write=False)
        self.nvars = nvars
        self.exps = exps
        self.coefs = coefs
        self._terms = None

    @classmethod
    def from_arrays(cls, nvars: int, exps, coefs) -> "Polynomial":
        p = cls.__new__(cls)
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, nvars)
        p._init(nvars, exps, np.asarray(coefs, dtype=np.float64).reshape(-1))
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c: float) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        """The polynomial ``x_{i+1}`` (``i`` is 0-based)."""
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1.0})

    @property
    def terms(self) -> dict[tuple[int, ...], float]:
        if self._terms is None:
            self._terms = {
                tuple(int(v) for v in e): float(c) for e, c in zip(self.exps, self.coefs)
            }
        return self._terms

    def __len__(self) -> int:
        return len(self.coefs)

    def __iter__(self):
        return iter(self.terms.items())

    def is_zero(self) -> bool:
        return len(self.coefs) == 0

    def degree(self) -> int:
        return degree(self)

    def is_homogeneous(self) -> bool:
        if self.is_zero():
            return True
        degs = self.exps.sum(axis=1)
        return bool((degs == degs[0]).all())

    def __call__(self, x) -> np.ndarray:
        """Evaluate at points ``x`` of shape ``(..., nvars)``."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.nvars:
            raise ValueError(f"expected points with {self.nvars} coordinates")
        if self.is_zero():
            return np.zeros(x.shape[:-1])
        mons = np.prod(x[..., None, :] ** self.exps, axis=-1)
        return mons @ self.coefs

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.exps.shape == other.exps.shape
            and bool((self.exps == other.exps).all())
            and bool((self.coefs == other.coefs).all())
        )

    __hash__ = None

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.nvars, other)
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return scale(self, -1.0)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.nvars, other)
        return add(self, scale(other, -1.0))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scale(self, other)
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return power(self, k)

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {format_polynomial(self)!r})"

    def __str__(self) -> str:
        return format_polynomial(self)


# --------------------------------------------------------------------------
# parsing / printing

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_INT = re.compile(r"\d+")
_VAR = re.compile(r"x(\d+)(?:\s*\^\s*(\d+))?")
_MINUS = "-−"


def parse_polynomial(text: str, nvars: int) -> Polynomial:
    """Parse text such as ``"-27*x1^3 + 27*x2^2*x3 - 9*x3"``.

    Coefficients may be integers, decimals (with optional exponent) or
    ``<int>/<int>`` ratios.  Repeated monomials are summed and zero terms
    dropped.
    """
    if nvars < 1:
        raise ValueError("nvars must be positive")
    n = len(text)
    pos = 0

    def skip():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def error(msg, at=None):
        raise PolynomialSyntaxError(msg, pos if at is None else at, text)

    skip()
    if pos == n:
        error("empty polynomial")

    exps: list[list[int]] = []
    coefs: list[float] = []
    first = True
    while True:
        skip()
        sign = 1.0
        if pos < n and (text[pos] == "+" or text[pos] in _MINUS):
            sign = -1.0 if text[pos] in _MINUS else 1.0
            pos += 1
            skip()
        elif not first:
            error("expected '+' or '-'")
        first = False
        if pos == n:
            error("expected a term")

        coef = 1.0
        have_coef = False
        m = _NUMBER.match(text, pos)
        if m:
            num = m.group(0)
            pos = m.end()
            skip()
            if pos < n and text[pos] == "/":
                if not _INT.fullmatch(num):
                    error("ratio numerator must be an integer", m.start())
                pos += 1
                skip()
                d = _INT.match(text, pos)
                if not d:
                    error("expected integer denominator")
                if int(d.group(0)) == 0:
                    error("zero denominator", d.start())
                coef = float(Fraction(int(num), int(d.group(0))))
                pos = d.end()
            else:
                coef = float(num)
            have_coef = True
            skip()

        e = [0] * nvars
        expect_var = not have_coef
        if have_coef and pos < n and text[pos] == "*":
            pos += 1
            skip()
            expect_var = True
        while expect_var:
            v = _VAR.match(text, pos)
            if not v:
                error("expected a variable like x1 or x2^3")
            idx = int(v.group(1))
            if not 1 <= idx <= nvars:
                error(f"variable x{idx} out of range 1..{nvars}", v.start())
            e[idx - 1] += int(v.group(2)) if v.group(2) is not None else 1
            pos = v.end()
            skip()
            expect_var = False
            if pos < n and text[pos] == "*":
                pos += 1
                skip()
                expect_var = True
        exps.append(e)
        coefs.append(sign * coef)
        skip()
        if pos == n:
            break
    return Polynomial.from_arrays(nvars, exps, coefs)


def _format_coef(c: float) -> str:
    if float(c).is_integer() and abs(c) < 2**53:
        return str(int(c))
    return repr(float(c))


def _format_monomial(e) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"x{i + 1}")
        elif k > 1:
            parts.append(f"x{i + 1}^{k}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    """Graded-lex text that :func:`parse_polynomial` reads back exactly."""
    if p.is_zero():
        return "0"
    out = []
    for e, c in zip(p.exps, p.coefs):
        mono = _format_monomial(e)
        mag = abs(float(c))
        if not mono:
            body = _format_coef(mag)
        elif mag == 1.0:
            body = mono
        else:
            body = f"{_format_coef(mag)}*{mono}"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


# --------------------------------------------------------------------------
# ring operations


def _check_same(p: Polynomial, q: Polynomial):
    if p.nvars != q.nvars:
        raise ValueError(f"nvars mismatch: {p.nvars} vs {q.nvars}")


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    _check_same(p, q)
    return Polynomial.from_arrays(
        p.nvars, np.vstack([p.exps, q.exps]), np.concatenate([p.coefs, q.coefs])
    )


def scale(p: Polynomial, c: float) -> Polynomial:
    return Polynomial.from_arrays(p.nvars, p.exps, p.coefs * float(c))


def _product(p: Polynomial, q: Polynomial, i, j, coefs) -> Polynomial:
    # radix keys add without carries when the base exceeds every product exponent
    n = p.nvars
    base = int(p.exps.max(initial=0)) + int(q.exps.max(initial=0)) + 1
    if base**n >= 2**62:
        return Polynomial.from_arrays(n, p.exps[i] + q.exps[j], coefs)
    radix = base ** np.arange(n - 1, -1, -1, dtype=np.int64)
    keys = (p.exps @ radix)[i] + (q.exps @ radix)[j]
    uniq, inv = np.unique(keys, return_inverse=True)
    summed = np.bincount(inv.ravel(), weights=coefs, minlength=len(uniq))
    exps = (uniq[:, None] // radix) % base
    return Polynomial.from_arrays(n, exps, summed)


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    _check_same(p, q)
    if p.is_zero() or q.is_zero():
        return Polynomial.zero(p.nvars)
    i, j = np.divmod(np.arange(len(p) * len(q)), len(q))
    return _product(p, q, i, j, np.outer(p.coefs, q.coefs).ravel())


def square(p: Polynomial) -> Polynomial:
    """``p*p`` using only the upper triangle of the pairwise products."""
    if p.is_zero():
        return p
    i, j = np.triu_indices(len(p))
    coefs = p.coefs[i] * p.coefs[j] * np.where(i == j, 1.0, 2.0)
    return _product(p, p, i, j, coefs)


def power(p: Polynomial, k: int) -> Polynomial:
    """``p**k`` by binary exponentiation."""
    if k < 0:
        raise ValueError("negative power")
    result = Polynomial.constant(p.nvars, 1.0)
    base = p
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = square(base)
    return result


def degree(p: Polynomial) -> int:
    """Total degree; -1 for the zero polynomial."""
    if p.is_zero():
        return -1
    return int(p.exps.sum(axis=1).max())


def coeff_norm(p: Polynomial) -> float:
    return float(np.linalg.norm(p.coefs)) if len(p) else 0.0


def coeff_max(p: Polynomial) -> float:
    return float(np.abs(p.coefs).max()) if len(p) else 0.0


def allclose(p: Polynomial, q: Polynomial, rtol: float = 1e-12, atol: float = 0.0) -> bool:
    """``||p - q||_2 <= atol + rtol * max(||p||_2, ||q||_2)``."""
    _check_same(p, q)
    return coeff_norm(p - q) <= atol + rtol * max(coeff_norm(p), coeff_norm(q))


def homogenize(p: Polynomial) -> Polynomial:
    """Append ``x_{n+1}`` so that every term has degree ``deg(p)``."""
    if p.is_zero():
        raise ValueError("cannot homogenize the zero polynomial")
    d = degree(p)
    extra = d - p.exps.sum(axis=1, keepdims=True)
    return Polynomial.from_arrays(p.nvars + 1, np.hstack([p.exps, extra]), p.coefs)


def monomials_of_degree(nvars: int, d: int) -> np.ndarray:
    """All exponents of total degree ``d``, graded-lex descending."""
    return _exact_degree(nvars, d)


@lru_cache(maxsize=None)
def _exact_degree(nvars: int, d: int) -> np.ndarray:
    if nvars == 1:
        out = np.array([[d]], dtype=np.int64)
    else:
        rows = []
        for k in range(d, -1, -1):
            rest = _exact_degree(nvars - 1, d - k)
            rows.append(np.hstack([np.full((len(rest), 1), k, dtype=np.int64), rest]))
        out = np.vstack(rows)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def _total_degree_basis(nvars: int, maxdeg: int):
    """Dense basis of all monomials of degree <= maxdeg.

    Returns ``(index, exps, shifts)`` where ``shifts[i] = (src, dst)`` maps a
    basis element to the element multiplied by ``x_{i+1}``.
    """
    exps = np.vstack([_exact_degree(nvars, k) for k in range(maxdeg + 1)])
    index = {tuple(int(v) for v in e): r for r, e in enumerate(exps)}
    shifts = []
    for i in range(nvars):
        src, dst = [], []
        for r, e in enumerate(exps):
            if e.sum() < maxdeg:
                t = list(int(v) for v in e)
                t[i] += 1
                src.append(r)
                dst.append(index[tuple(t)])
        shifts.append((np.array(src, dtype=np.intp), np.array(dst, dtype=np.intp)))
    return index, exps, shifts


# --------------------------------------------------------------------------
# group actions


def _check_matrix(M, nvars: int) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if M.shape != (nvars, nvars):
        raise ValueError(f"matrix shape {M.shape} does not match nvars={nvars}")
    if not np.isfinite(M).all():
        raise ValueError("matrix entries must be finite")
    return M


def act_linear(M, p: Polynomial, method: str = "horner") -> Polynomial:
    """Return the expansion of ``p(M x)``.

    ``method="horner"`` (default) nests the linear forms ``(Mx)_k`` along the
    exponent trie of ``p`` and accumulates into a dense monomial basis.
    ``method="monomial"`` expands every term separately as a product of
    linear-form powers built by binary exponentiation; it is slower and kept
    as an independent route for testing.  Neither prunes small coefficients.
    """
    M = _check_matrix(M, p.nvars)
    if p.is_zero():
        return p
    if method == "monomial":
        return _act_monomial(M, p)
    if method != "horner":
        raise ValueError(f"unknown method {method!r}")
    n = p.nvars
    index, basis, shifts = _total_degree_basis(n, degree(p))
    size = len(basis)

    def times_linear(vec, row):
        out = np.zeros(size)
        for i, (src, dst) in enumerate(shifts):
            if row[i] != 0.0:
                out[dst] += row[i] * vec[src]
        return out

    def compose(exps, coefs, k):
        if k == n:
            vec = np.zeros(size)
            vec[0] = coefs[0]
            return vec
        col = exps[:, k]
        top = int(col.max())
        groups = {int(j): col == j for j in np.unique(col)}
        acc = compose(exps[groups[top]], coefs[groups[top]], k + 1)
        for j in range(top - 1, -1, -1):
            acc = times_linear(acc, M[k])
            if j in groups:
                acc += compose(exps[groups[j]], coefs[groups[j]], k + 1)
        return acc

    vec = compose(p.exps, p.coefs, 0)
    nz = np.flatnonzero(vec)
    return Polynomial.from_arrays(n, basis[nz], vec[nz])


def _act_monomial(M: np.ndarray, p: Polynomial) -> Polynomial:
    n = p.nvars
    forms = [
        Polynomial.from_arrays(n, np.eye(n, dtype=np.int64), M[k]) for k in range(n)
    ]
    cache: dict[tuple[int, int], Polynomial] = {}
    exps_out, coefs_out = [], []
    for e, c in zip(p.exps, p.coefs):
        term = Polynomial.constant(n, float(c))
        for k, ek in enumerate(e):
            if ek:
                key = (k, int(ek))
                if key not in cache:
                    cache[key] = power(forms[k], int(ek))
                term = mul(term, cache[key])
        exps_out.append(term.exps)
        coefs_out.append(term.coefs)
    return Polynomial.from_arrays(n, np.vstack(exps_out), np.concatenate(coefs_out))


def act_signflip(sigma: Iterable[int], p: Polynomial) -> Polynomial:
    """``p(diag(sigma) x)``: multiply each coefficient by prod sigma_i^mu_i."""
    sigma = np.asarray(list(sigma), dtype=np.int64)
    if sigma.shape != (p.nvars,):
        raise ValueError(f"sigma must have length {p.nvars}")
    if not np.isin(sigma, (-1, 1)).all():
        raise ValueError("sigma entries must be +1 or -1")
    odd = (p.exps % 2) @ (sigma < 0).astype(np.int64)
    signs = np.where(odd % 2 == 1, -1.0, 1.0)
    return Polynomial.from_arrays(p.nvars, p.exps, p.coefs * signs)
