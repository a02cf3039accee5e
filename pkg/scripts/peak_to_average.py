#!/usr/bin/env python3
"""Peak-to-average load ratio across node counts for all three algorithms.

Writes one CSV row per configuration to stdout. Multi-probe rows carry an
extra ``noise_free_median`` column: the median peak-to-average computed from
exact per-node shares, i.e. the limit as keys per node grows without bound.

    python scripts/peak_to_average.py --nodes 10,100,1000 --trials 100 > p2a.csv
"""

import argparse
import csv
import math
import sys

import numpy as np

from mpch.loadsim import CapacityExceeded, TrialConfig, exact_shares, simulate
from mpch.multiprobe import MultiProbeTable


def noise_free_median(config):
    peaks = []
    for t in range(config.trials):
        table = MultiProbeTable(config.table_seed(t), config.param)
        for node in range(config.n):
            table.insert(node)
        peaks.append(exact_shares(table.snapshot()[0], config.param).max() * config.n)
    return float(np.median(peaks))


def configurations(nodes):
    for k in (2, 21):
        for n in nodes:
            yield "multiprobe", n, k
    for n in nodes:
        # floor(ln n) and floor(700 ln n) virtual nodes
        yield "ring", n, max(1, int(math.log(n)))
    for n in nodes:
        yield "ring", n, max(1, int(700 * math.log(n)))
    for n in nodes:
        yield "jump", n, None


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", default="10,100,1000")
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--keys-per-node", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--memory-budget", type=int, default=1 << 30)
    args = parser.parse_args()
    nodes = [int(v) for v in args.nodes.split(",")]

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["algorithm", "n", "param", "median", "p90", "p99", "noise_free_median"])
    for algorithm, n, param in configurations(nodes):
        config = TrialConfig(algorithm, n, param, args.keys_per_node, args.trials,
                             args.seed, args.memory_budget)
        try:
            s = simulate(config)
        except CapacityExceeded:
            writer.writerow([algorithm, n, param, "OOM", "OOM", "OOM", ""])
            continue
        extra = f"{noise_free_median(config):.4f}" if algorithm == "multiprobe" else ""
        writer.writerow([algorithm, n, "" if param is None else param,
                         f"{s.median:.4f}", f"{s.p90:.4f}", f"{s.p99:.4f}", extra])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
