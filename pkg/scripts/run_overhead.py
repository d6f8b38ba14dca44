"""Runtime overhead of the physical models during a CPU-bound activity.

Mirrors the profiling table: cumulative seconds spent in the user activity,
in constraint checks and in each model update, averaged over several runs
per update interval.
"""
import argparse

from satops.scenarios.benchmarks import OVERHEAD_INTERVALS, run_overhead_benchmark
from satops.scenarios.cli import print_rows, write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--intervals", default=",".join(map(str, OVERHEAD_INTERVALS)))
    parser.add_argument("--runs", type=int, default=3)
    parser.add_argument("--activity-s", type=float, default=29.0)
    parser.add_argument("--csv", default="overhead.csv")
    args = parser.parse_args()

    intervals = [float(x) for x in args.intervals.split(",")]
    report = run_overhead_benchmark(intervals, runs=args.runs, activity_duration_s=args.activity_s)
    rows = report.table()
    print_rows(rows)
    write_csv(args.csv, rows)
    by_interval = {r["interval_s"]: r for r in rows}
    if 0.25 in by_interval and 0.5 in by_interval:
        ratio = by_interval[0.25]["model_update_s"] / by_interval[0.5]["model_update_s"]
        print(f"model-update ratio 0.25 s / 0.5 s: {ratio:.2f}")


if __name__ == "__main__":
    main()
