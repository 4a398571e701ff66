"""Planted benchmark instances, the genericity witness and a timing harness.

Random streams come from numpy's PCG64.  Instance ``i`` of a ``(n, d)`` cell
under master seed ``seed`` draws from ``SeedSequence([seed, n, d, i])`` so
cells and trials are reproducible independently of each other.
"""
from __future__ import annotations

import csv
import json
import math
import statistics
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .certificate import certify
from .polyalg import Polynomial, act_linear, monomials_of_degree
from .pwcov import cov_scale, double_factorial
from .spectra import pw_pca

__all__ = [
    "BenchInstance",
    "BenchRecord",
    "InstanceGenerationError",
    "instance_rng",
    "cayley_transform",
    "cayley_orthogonal",
    "random_dense_homogeneous",
    "gen_instance",
    "genericity_witness",
    "witness_diagonal_formula",
    "bench_run",
    "summarize",
    "monotone_violations",
    "write_csv",
    "write_json",
    "CSV_COLUMNS",
]

MAX_RETRIES = 10
CSV_COLUMNS = [
    "n", "d", "terms", "trial", "seed",
    "t_pwpca", "t_canonical", "t_signflip", "t_assemble", "t_total", "residual",
]


class InstanceGenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchInstance:
    f: Polynomial
    g: Polynomial
    R0: np.ndarray
    seed: int
    n: int
    d: int
    index: int = 0


@dataclass(frozen=True)
class BenchRecord:
    n: int
    d: int
    terms: int
    trial: int
    seed: int
    t_pwpca: float
    t_canonical: float
    t_signflip: float
    t_assemble: float
    t_total: float
    residual: float


def instance_rng(seed: int, n: int, d: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, n, d, index])))


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def cayley_transform(S, sigma) -> np.ndarray:
    """``(S - I)^{-1} (S + I) diag(sigma)`` for antisymmetric ``S``."""
    S = np.asarray(S, dtype=np.float64)
    n = S.shape[0]
    if np.abs(S + S.T).max(initial=0.0) != 0.0:
        raise ValueError("S must be antisymmetric")
    eye = np.eye(n)
    return np.linalg.solve(S - eye, S + eye) * np.asarray(sigma, dtype=np.float64)[None, :]


def cayley_orthogonal(n: int, rng=None) -> np.ndarray:
    """Random orthogonal matrix from an integer antisymmetric ``S`` with
    entries in [-10, 10] and a random signflip."""
    if n < 2:
        raise ValueError("need n >= 2")
    rng = _as_rng(rng)
    upper = np.triu(rng.integers(-10, 11, size=(n, n)), 1)
    sigma = rng.choice([-1, 1], size=n)
    return cayley_transform(upper - upper.T, sigma)


_NONZERO = np.concatenate([np.arange(-100, 0), np.arange(1, 101)])


def random_dense_homogeneous(n: int, d: int, rng=None) -> Polynomial:
    """Every degree-``d`` monomial with a nonzero integer coefficient in [-100, 100]."""
    if n < 2 or d < 2:
        raise ValueError("need n, d >= 2")
    rng = _as_rng(rng)
    exps = monomials_of_degree(n, d)
    coefs = rng.choice(_NONZERO, size=len(exps)).astype(np.float64)
    return Polynomial.from_arrays(n, exps, coefs)


def gen_instance(n: int, d: int, seed: int, index: int = 0) -> BenchInstance:
    """Planted pair ``g = R0 . f`` with ``f`` of distinct principal variances."""
    rng = instance_rng(seed, n, d, index)
    for _ in range(MAX_RETRIES):
        f = random_dense_homogeneous(n, d, rng)
        if pw_pca(f).distinct():
            break
    else:
        raise InstanceGenerationError(
            f"no distinct-spectrum polynomial after {MAX_RETRIES} draws (n={n}, d={d}, seed={seed}, index={index})"
        )
    R0 = cayley_orthogonal(n, rng)
    return BenchInstance(f=f, g=act_linear(R0, f), R0=R0, seed=seed, n=n, d=d, index=index)


def genericity_witness(n: int, d: int) -> Polynomial:
    """``sum_s (n + 1 - s) x1^(d-2) xs^2``."""
    if n < 2 or d < 2:
        raise ValueError("need n, d >= 2")
    terms = {}
    for s in range(n):
        e = [0] * n
        e[0] += d - 2
        e[s] += 2
        terms[tuple(e)] = float(n - s)
    return Polynomial(n, terms)


def witness_diagonal_formula(n: int, d: int) -> np.ndarray:
    """Closed-form diagonal of the witness covariance block (needs ``d >= 3``)."""
    if n < 2:
        raise ValueError("need n >= 2")
    if d < 3:
        raise ValueError("closed form needs d >= 3 ((2d-5)!! is undefined at d = 2)")
    gs = [float(n + 1 - s) for s in range(1, n + 1)]
    g1 = gs[0]
    u = sum(gs[1:])
    v = sum(x * x for x in gs[1:])
    # W = pi^((n+1)/2) (2d-5)!! / (2^d Gamma((n+1)/2 + d + 1))
    W = cov_scale(n + 1, d) * double_factorial(2 * d - 5)
    out = np.empty(n)
    out[0] = (
        (2 * d + 1) * (2 * d - 1) * (2 * d - 3) * g1**2
        + 2 * (2 * d - 1) * (2 * d - 3) * g1 * u
        + 2 * (2 * d - 3) * v
        + (2 * d - 3) * u**2
    )
    for i in range(1, n):
        gi = gs[i]
        out[i] = (
            (2 * d - 1) * (2 * d - 3) * g1**2
            + 4 * (2 * d - 3) * g1 * gi
            + 8 * gi**2
            + 2 * (2 * d - 3) * g1 * u
            + 4 * gi * u
            + 2 * v
            + u**2
        )
    return W * out


# --------------------------------------------------------------------------
# timing harness


def _run_trial(args) -> BenchRecord:
    n, d, seed, trial, repeats = args
    inst = gen_instance(n, d, seed, trial)
    best: dict | None = None
    for _ in range(repeats):
        t: dict = {}
        cert = certify(inst.f, inst.g, timings=t)
        if best is None or t["total"] < best["total"]:
            best = t
    return BenchRecord(
        n=n, d=d, terms=len(inst.f), trial=trial, seed=seed,
        t_pwpca=best["pwpca"], t_canonical=best["canonical"], t_signflip=best["signflip"],
        t_assemble=best["assemble"], t_total=best["total"], residual=cert.residual_rel,
    )


def _safe_trial(args) -> BenchRecord:
    try:
        return _run_trial(args)
    except Exception as exc:
        n, d, seed, trial, _ = args
        raise RuntimeError(f"trial failed (n={n}, d={d}, seed={seed}, trial={trial}): {exc}") from exc


def bench_run(
    n_values: Iterable[int],
    d_values: Iterable[int],
    trials: int = 10,
    seed: int = 0,
    *,
    repeats: int = 3,
    warmup: bool = True,
    workers: int = 1,
) -> list[BenchRecord]:
    """Time :func:`certify` on planted instances for every ``(n, d)`` cell.

    Each trial certifies its instance ``repeats`` times and keeps the fastest
    run (all phases from that run), which filters out scheduler noise; the
    work itself is deterministic.  Trials are interleaved across cells and
    the records returned grouped by cell.  One untimed warmup certification
    runs first.  ``workers > 1`` runs trials in separate processes, which makes
    timings contend for cores.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    cells = [(n, d) for n in n_values for d in d_values]
    if warmup and cells:
        n0, d0 = cells[0]
        w = gen_instance(n0, d0, seed, trials)
        certify(w.f, w.g)
    # round-robin over cells so slow drift in machine speed hits every cell alike
    jobs = [(n, d, seed, i, repeats) for i in range(trials) for n, d in cells]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_safe_trial, jobs))
    else:
        records = [_safe_trial(job) for job in jobs]
    order = {cell: k for k, cell in enumerate(cells)}
    return sorted(records, key=lambda r: (order[(r.n, r.d)], r.trial))


def summarize(records: Sequence[BenchRecord]) -> list[dict]:
    """Median of every timing column per ``(n, d)`` cell."""
    cells: dict[tuple[int, int], list[BenchRecord]] = {}
    for r in records:
        cells.setdefault((r.n, r.d), []).append(r)
    out = []
    for (n, d), rs in sorted(cells.items()):
        row = {"n": n, "d": d, "terms": rs[0].terms, "trials": len(rs)}
        for col in ("t_pwpca", "t_canonical", "t_signflip", "t_assemble", "t_total", "residual"):
            row[col] = statistics.median(getattr(r, col) for r in rs)
        row["max_residual"] = max(r.residual for r in rs)
        out.append(row)
    return out


def monotone_violations(summary: Sequence[dict]) -> list[str]:
    """Cells where the median total time drops as ``d`` grows at fixed ``n``."""
    by_n: dict[int, list[dict]] = {}
    for row in summary:
        by_n.setdefault(row["n"], []).append(row)
    msgs = []
    for n, rows in sorted(by_n.items()):
        rows = sorted(rows, key=lambda r: r["d"])
        for a, b in zip(rows, rows[1:]):
            if b["t_total"] < a["t_total"]:
                msgs.append(
                    f"n={n}: median total {b['t_total']:.4g}s at d={b['d']} "
                    f"< {a['t_total']:.4g}s at d={a['d']}"
                )
    return msgs


def warn_if_not_monotone(summary: Sequence[dict]) -> list[str]:
    msgs = monotone_violations(summary)
    for m in msgs:
        warnings.warn(f"non-monotone timing: {m}", RuntimeWarning, stacklevel=2)
    return msgs


def write_csv(records: Sequence[BenchRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for r in records:
            writer.writerow(asdict(r))


def write_json(records: Sequence[BenchRecord], path) -> None:
    payload = {"records": [asdict(r) for r in records], "summary": summarize(records)}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def expected_term_count(n: int, d: int) -> int:
    return math.comb(n + d - 1, d)
