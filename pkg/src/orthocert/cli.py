"""``ortho-cert`` command line.

Exit codes: 0 success, 2 not equivalent, 3 degenerate spectrum, 4 I/O,
parse or usage error, 5 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import certificate as cert
from .genbench import (
    bench_run,
    gen_instance,
    summarize,
    warn_if_not_monotone,
    write_csv,
    write_json,
)
from .polyalg import PolynomialSyntaxError, format_polynomial, homogenize, parse_polynomial
from .pwcov import cov_oracle, pw_covariance
from .spectra import EigenNotConverged, pw_pca

EXIT_OK = 0
EXIT_NOT_EQUIVALENT = 2
EXIT_DEGENERATE = 3
EXIT_INPUT = 4
EXIT_NUMERICAL = 5

_VAR_INDEX = re.compile(r"x(\d+)")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


def _read(path) -> str:
    text = Path(path).read_text(encoding="utf-8")
    return text.strip()


def _infer_nvars(*texts: str) -> int:
    found = [int(m) for t in texts for m in _VAR_INDEX.findall(t)]
    return max(found, default=1)


def _load(paths, nvars):
    texts = [_read(p) for p in paths]
    n = nvars or _infer_nvars(*texts)
    return [parse_polynomial(t, n) for t in texts]


def _emit(obj) -> None:
    print(json.dumps(obj))


def _matrix_str(M) -> str:
    return "\n".join("  " + " ".join(f"{v:12.6f}" for v in row) for row in np.asarray(M))


def _cmd_pwpca(args) -> int:
    (f,) = _load([args.input], args.nvars)
    p = pw_pca(f)
    distinct = p.distinct()
    if args.json:
        _emit({"lambda": p.lam.tolist(), "V": p.V.tolist(), "distinct": distinct})
    else:
        print("lambda:", " ".join(f"{v:.6f}" for v in p.lam))
        print("V:")
        print(_matrix_str(p.V))
        print("distinct:", "yes" if distinct else "no")
    return EXIT_OK


def _cmd_certify(args) -> int:
    f, g = _load([args.f, args.g], args.nvars)
    try:
        c = cert.certify(f, g, args.tol, parity=args.parity)
    except cert.CertificationError as exc:
        if args.json:
            _emit({
                "status": exc.kind,
                "message": str(exc),
                "lambda_f": None if exc.lambda_f is None else list(map(float, exc.lambda_f)),
                "lambda_g": None if exc.lambda_g is None else list(map(float, exc.lambda_g)),
            })
        else:
            print(f"{exc.kind}: {exc}", file=sys.stderr)
        raise
    if args.json:
        _emit(c.as_dict())
    else:
        print("R:")
        print(_matrix_str(c.R))
        print("sigma:", " ".join(f"{s:+d}" for s in c.sigma))
        print(f"residual: {c.residual_rel:.3e}")
    return EXIT_OK


def _cmd_check(args) -> int:
    f, g = _load([args.f, args.g], args.nvars)
    r = cert.check_equivalence_partial(f, g, args.tol)
    if args.json:
        _emit({
            "status": r.verdict,
            "equal": r.equal,
            "lambda_f": r.lambda_f.tolist(),
            "lambda_g": r.lambda_g.tolist(),
        })
    elif r.equal:
        print("spectra agree: inconclusive (equivalence not ruled out)")
    else:
        print("spectra differ: not orthogonally equivalent")
    return EXIT_OK if r.equal else EXIT_NOT_EQUIVALENT


def _cmd_cov(args) -> int:
    (f,) = _load([args.input], args.nvars)
    fbar = homogenize(f)
    C = cov_oracle(fbar) if args.oracle else pw_covariance(fbar)
    if args.json:
        _emit({"homogenized": format_polynomial(fbar), "oracle": args.oracle, "cov": C.tolist()})
    else:
        print("homogenized:", format_polynomial(fbar))
        print("Cov:" + (" (sphere-integral oracle)" if args.oracle else ""))
        print(_matrix_str(C))
    return EXIT_OK


def _cmd_gen(args) -> int:
    inst = gen_instance(args.n, args.d, args.seed, args.index)
    meta = {
        "n": inst.n, "d": inst.d, "seed": inst.seed, "index": inst.index,
        "terms": len(inst.f), "R0": inst.R0.tolist(),
    }
    if args.out is None:
        _emit({**meta, "f": format_polynomial(inst.f), "g": format_polynomial(inst.g)})
        return EXIT_OK
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "f.poly").write_text(format_polynomial(inst.f) + "\n", encoding="utf-8")
    (out / "g.poly").write_text(format_polynomial(inst.g) + "\n", encoding="utf-8")
    (out / "instance.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"wrote {out / 'f.poly'}, {out / 'g.poly'}, {out / 'instance.json'}")
    return EXIT_OK


def _int_range(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N, N:M or N,M,... (got {text!r})")


def _threads() -> int:
    raw = os.environ.get("ORTHO_CERT_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise _UsageError(f"ORTHO_CERT_THREADS must be an integer (got {raw!r})")
    return (os.cpu_count() or 1) if k == 0 else max(k, 1)


def _cmd_bench(args) -> int:
    records = bench_run(args.n, args.d, args.trials, args.seed, repeats=args.repeats, workers=_threads())
    summary = summarize(records)
    warn_if_not_monotone(summary)
    if args.out:
        out = Path(args.out)
        write_csv(records, out)
        write_json(records, out.with_suffix(".json"))
    if args.json:
        _emit(summary)
    else:
        print(f"{'n':>3} {'d':>3} {'terms':>6} {'pwpca':>9} {'canon':>9} {'signflip':>9} {'assemble':>9} {'total':>9} {'max res':>10}")
        for r in summary:
            print(
                f"{r['n']:>3} {r['d']:>3} {r['terms']:>6} {r['t_pwpca']:9.4f} {r['t_canonical']:9.4f} "
                f"{r['t_signflip']:9.4f} {r['t_assemble']:9.5f} {r['t_total']:9.4f} {r['max_residual']:10.2e}"
            )
    return EXIT_OK


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ortho-cert", description="Certificates of orthogonal equivalence via PW-PCA.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def poly_opts(p, pair):
        if pair:
            p.add_argument("--f", required=True, help="file with the first polynomial")
            p.add_argument("--g", required=True, help="file with the second polynomial")
        else:
            p.add_argument("--input", required=True, help="polynomial file")
        p.add_argument("--nvars", type=int, default=None, help="number of variables (default: largest index used)")
        p.add_argument("--json", action="store_true", help="emit JSON")

    p = sub.add_parser("pwpca", help="principal variances and axes")
    poly_opts(p, pair=False)
    p.set_defaults(func=_cmd_pwpca)

    p = sub.add_parser("certify", help="compute R with f(Rx) = g(x)")
    poly_opts(p, pair=True)
    p.add_argument("--tol", type=_positive, default=cert.DEFAULT_TOL)
    p.add_argument("--parity", action="store_true", help="GF(2) pruning of the signflip search")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("check", help="compare spectra (can only rule equivalence out)")
    poly_opts(p, pair=True)
    p.add_argument("--tol", type=_positive, default=cert.DEFAULT_TOL)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("cov", help="covariance of the homogenized polynomial")
    poly_opts(p, pair=False)
    p.add_argument("--oracle", action="store_true", help="use entrywise sphere integrals")
    p.set_defaults(func=_cmd_cov)

    p = sub.add_parser("gen", help="generate a planted instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--index", type=int, default=0, help="trial index within the (n, d) cell")
    p.add_argument("--out", default=None, help="output directory (default: JSON on stdout)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="time certify on planted instances")
    p.add_argument("--n", type=_int_range, default=[3, 4, 5])
    p.add_argument("--d", type=_int_range, default=[7, 8, 9, 10])
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--repeats", type=int, default=3, help="timed runs per trial; the fastest is kept")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="CSV path; a .json summary is written alongside")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_bench)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except cert.DegenerateSpectrum:
        return EXIT_DEGENERATE
    except cert.NotEquivalent:
        return EXIT_NOT_EQUIVALENT
    except (cert.ResidualTooLarge, EigenNotConverged, FloatingPointError) as exc:
        if not isinstance(exc, cert.CertificationError):
            print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, PolynomialSyntaxError, ValueError, _UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
