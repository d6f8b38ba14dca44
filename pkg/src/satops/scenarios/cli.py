"""Command line entry point: ``sim run|windows|bench``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .. import comms
from ..runtime import write_log
from .config import ConfigError, build_actors, load_config


def write_csv(path: str, rows: list[dict]):
    if not rows:
        raise ConfigError("nothing to write")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def print_rows(rows: list[dict]):
    if not rows:
        return
    keys = list(rows[0])
    print("\t".join(keys))
    for row in rows:
        print("\t".join(_cell(row[k]) for k in keys))


def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.3f}" if abs(value) >= 1e3 else f"{value:.6g}"
    return str(value)


def _check_writable(path: str | None):
    if path is None:
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise ConfigError(f"cannot write {path}: directory {parent} does not exist")


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.duration_s is not None:
        config.duration_s = args.duration_s
    log_path = args.log or config.log_path
    _check_writable(log_path)
    _check_writable(args.csv)

    if config.kind == "constellation":
        from .constellation import run_constellation

        result = run_constellation(config)
        log, summary = result.log, result.summary()
    elif config.kind == "fedavg":
        from .fedavg import run_fedavg

        result = run_fedavg(config)
        log, summary = result.log, result.summary()
    elif config.kind == "overhead":
        from .benchmarks import run_overhead_benchmark

        params = config.params
        report = run_overhead_benchmark(
            intervals=params.get("intervals", (config.constraint_check_interval,)),
            runs=params.get("runs", 3),
            activity_duration_s=params.get("activity_duration_s", config.duration_s),
            seed=config.seed,
            warmup_runs=params.get("warmup_runs", 2),
            epoch=config.epoch,
        )
        rows = report.table()
        print_rows(rows)
        if args.csv:
            write_csv(args.csv, rows)
        return 0
    else:
        from .custom import run_custom

        log, summary = run_custom(config)

    if log_path:
        write_log(log, log_path)
    print(json.dumps(summary, indent=2, sort_keys=True, default=float))
    if args.csv:
        write_csv(args.csv, [summary_row(summary)])
    return 0


def summary_row(summary: dict, prefix: str = "") -> dict:
    """Flatten nested summary dicts into dotted ``outer.inner`` columns."""
    row = {}
    for key, value in summary.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            row.update(summary_row(value, f"{name}."))
        else:
            row[name] = value
    return row


def cmd_windows(args) -> int:
    config = load_config(args.config)
    actors = {a.id: a for a in build_actors(config)}
    for name in (args.from_id, args.to_id):
        if name not in actors:
            raise ConfigError(f"{args.config}: no actor {name!r} (have {sorted(actors)})")
    _check_writable(args.csv)
    t0 = config.epoch
    windows = comms.find_windows(actors[args.from_id], actors[args.to_id], t0, t0 + args.hours * 3600.0)
    rows = [
        {
            "start_s": w.start.seconds,
            "end_s": w.end.seconds,
            "start_utc": w.start.to_datetime().isoformat(),
            "duration_s": w.duration,
        }
        for w in windows
    ]
    print(f"{len(rows)} windows {args.from_id} -> {args.to_id} over {args.hours} h")
    print_rows(rows)
    if args.csv and rows:
        write_csv(args.csv, rows)
    return 0


def cmd_bench(args) -> int:
    _check_writable(args.csv)
    if args.which == "overhead":
        from .benchmarks import OVERHEAD_INTERVALS, run_overhead_benchmark

        intervals = (args.interval,) if args.interval else OVERHEAD_INTERVALS
        report = run_overhead_benchmark(
            intervals, runs=args.runs, activity_duration_s=args.activity_s, warmup_runs=args.warmup
        )
        rows = report.table()
    else:
        from .benchmarks import run_scaling_benchmark, scaling_spread

        sizes = [int(s) for s in args.sizes.split(",") if s]
        points = run_scaling_benchmark(sizes, duration_s=args.duration_s, repeats=args.repeats)
        rows = [
            {"satellites": p.satellites, "wall_s": p.wall_s, "per_satellite_s": p.per_satellite_s}
            for p in points
        ]
        print(f"per-satellite spread: {scaling_spread(points):.3f}")
    print_rows(rows)
    if args.csv:
        write_csv(args.csv, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim", description="Spacecraft operations simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario config")
    run.add_argument("config")
    run.add_argument("--log", help="CSV log output path")
    run.add_argument("--seed", type=int)
    run.add_argument("--duration-s", type=float, dest="duration_s")
    run.add_argument("--csv", help="write the summary table as CSV")
    run.set_defaults(func=cmd_run)

    win = sub.add_parser("windows", help="list communication windows between two actors")
    win.add_argument("--config", required=True)
    win.add_argument("--from", dest="from_id", required=True)
    win.add_argument("--to", dest="to_id", required=True)
    win.add_argument("--hours", type=float, default=24.0)
    win.add_argument("--csv")
    win.set_defaults(func=cmd_windows)

    bench = sub.add_parser("bench", help="benchmarks")
    bench.add_argument("which", choices=("overhead", "scaling"))
    bench.add_argument("--interval", type=float, help="single update interval for the overhead benchmark")
    bench.add_argument("--runs", type=int, default=3)
    bench.add_argument("--warmup", type=int, default=2)
    bench.add_argument("--activity-s", type=float, default=29.0, dest="activity_s")
    bench.add_argument("--sizes", default="16,32,128")
    bench.add_argument("--duration-s", type=float, default=600.0, dest="duration_s")
    bench.add_argument("--repeats", type=int, default=3, help="scaling runs per size; the fastest is kept")
    bench.add_argument("--csv")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"sim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
