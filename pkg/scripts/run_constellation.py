"""Sixteen-satellite Walker constellation over eight hours.

Writes the event log, per-step quantile traces of SoC and temperature, and
prints the summary statistics.
"""
import argparse
import csv
import json
from importlib import resources

from satops.runtime import write_log
from satops.scenarios.config import load_config
from satops.scenarios.constellation import QUANTILES, run_constellation


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(resources.files("satops") / "configs" / "constellation.json"))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--log", default="constellation_log.csv")
    parser.add_argument("--traces", default="constellation_traces.csv")
    args = parser.parse_args()

    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    result = run_constellation(config)
    write_log(result.log, args.log)

    traces = result.quantile_traces()
    with open(args.traces, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["time_s"] + [f"{name}_q{q:g}" for name in traces for q in QUANTILES]
        writer.writerow(header + ["eclipse_fraction", "processing_fraction", "no_los_fraction"])
        for k, t in enumerate(result.times):
            row = [repr(float(t))]
            for arr in traces.values():
                row += [repr(float(v)) for v in arr[:, k]]
            row += [
                repr(float(result.eclipse[k].mean())),
                repr(float(result.processing[k].mean())),
                repr(float(result.no_los[k].mean())),
            ]
            writer.writerow(row)
    print(json.dumps(result.summary(), indent=2))


if __name__ == "__main__":
    main()
