"""Per-satellite wall cost of a 600 s constellation run for growing sizes."""
import argparse

from satops.scenarios.benchmarks import run_scaling_benchmark, scaling_spread
from satops.scenarios.cli import print_rows, write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="16,32,128")
    parser.add_argument("--duration-s", type=float, default=600.0)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--csv", default="scaling.csv")
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    points = run_scaling_benchmark(sizes, duration_s=args.duration_s, repeats=args.repeats)
    rows = [{"satellites": p.satellites, "wall_s": p.wall_s, "per_satellite_s": p.per_satellite_s} for p in points]
    print_rows(rows)
    write_csv(args.csv, rows)
    print(f"relative spread of per-satellite cost: {scaling_spread(points):.3f}")


if __name__ == "__main__":
    main()
