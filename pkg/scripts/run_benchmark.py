"""Timing sweep over planted instances; writes CSV and JSON and prints medians."""
import argparse
from pathlib import Path

from orthocert.genbench import bench_run, summarize, warn_if_not_monotone, write_csv, write_json


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, nargs="+", default=[3, 4, 5])
    parser.add_argument("--d", type=int, nargs="+", default=[7, 8, 9, 10])
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", type=Path, default=Path("results/bench.csv"))
    args = parser.parse_args()

    records = bench_run(args.n, args.d, args.trials, args.seed, repeats=args.repeats, workers=args.workers)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(records, args.out)
    write_json(records, args.out.with_suffix(".json"))

    summary = summarize(records)
    warn_if_not_monotone(summary)
    print(f"{'n':>2} {'d':>3} {'terms':>6} {'median total [s]':>17} {'max residual':>13}")
    for row in summary:
        print(f"{row['n']:>2} {row['d']:>3} {row['terms']:>6} {row['t_total']:>17.4f} {row['max_residual']:>13.2e}")
    print(f"wrote {args.out} and {args.out.with_suffix('.json')}")


if __name__ == "__main__":
    main()
