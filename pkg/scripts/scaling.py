#!/usr/bin/env python3
"""Time per init / assign / update and bytes per node versus node count.

Absolute numbers are interpreter-bound; the interesting output is how each
column scales with n.

    python scripts/scaling.py --nodes 10,100,1000,10000
"""

import argparse
import csv
import sys

from mpch.loadsim import BENCH_OPS, bench_op, memory_per_node

PARAMS = {"multiprobe": 21, "ring": 100, "jump": None}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", default="10,100,1000,10000")
    parser.add_argument("--repetitions", type=int, default=3)
    parser.add_argument("--skip-ring-above", type=int, default=10_000,
                        help="ring tables get slow to build past this size")
    args = parser.parse_args()
    nodes = [int(v) for v in args.nodes.split(",")]

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["algorithm", "n", "init_ns", "assign_ns", "update_ns", "bytes_per_node"])
    for algorithm, param in PARAMS.items():
        for n in nodes:
            if algorithm == "ring" and n > args.skip_ring_above:
                continue
            times = [bench_op(algorithm, n, op, args.repetitions, param) for op in BENCH_OPS]
            mem = memory_per_node(algorithm, n, param)
            writer.writerow([algorithm, n, *(f"{t:.0f}" for t in times), f"{mem:.1f}"])
            sys.stdout.flush()


if __name__ == "__main__":
    main()
