"""Two counter-rotating satellites learning a two-circles classifier.

Runs the scenario with and without inter-satellite links and reports the
final test accuracies, the number of model exchanges, and how often an
exchange did not lower a satellite's accuracy.
"""
import argparse
import csv
import json
from importlib import resources

from satops.runtime import write_log
from satops.scenarios.config import load_config
from satops.scenarios.fedavg import run_fedavg


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(resources.files("satops") / "configs" / "fedavg.json"))
    parser.add_argument("--seeds", default="0", help="comma-separated seeds")
    parser.add_argument("--log", help="event log of the first run with communication")
    parser.add_argument("--accuracy", default="fedavg_accuracy.csv", help="per-epoch accuracy traces")
    args = parser.parse_args()

    rows = []
    traces = []
    for seed in [int(s) for s in args.seeds.split(",")]:
        for communication in (True, False):
            config = load_config(args.config)
            config.seed = seed
            config.params["communication"] = communication
            result = run_fedavg(config)
            if args.log and communication and not rows:
                write_log(result.log, args.log)
            summary = result.summary()
            rows.append({"seed": seed, "communication": communication, **summary})
            for sat, points in result.epoch_accuracy.items():
                for t, acc in points:
                    traces.append((seed, communication, sat, t - result.start_time, acc))
            print(json.dumps(rows[-1]))

    with open(args.accuracy, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["seed", "communication", "satellite", "elapsed_s", "accuracy"])
        writer.writerows(traces)


if __name__ == "__main__":
    main()
