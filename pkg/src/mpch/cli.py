"""Command line: ``simulate``, ``check`` and ``bench``.

All output is CSV or plain text on stdout. Exit codes: 0 success, 1 check
failure, 2 usage error.
"""

import argparse
import csv
import math
import random
import sys
from bisect import bisect_left

import numpy as np

from . import loadsim
from .hashcore import MASK64, hash64
from .multiprobe import MultiProbeTable
from .oracle import oracle_lookup_many

SIMULATE_COLUMNS = [
    "algorithm", "n", "param_name", "param_value", "trials",
    "keys_per_node", "median", "p90", "p99",
]
BENCH_COLUMNS = ["algorithm", "n", "op", "value", "nondeterministic"]
OOM = "OOM"


class UsageError(Exception):
    pass


def parse_int_list(text: str) -> list:
    try:
        values = [int(v.replace("_", "")) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"node counts must be positive: {text!r}")
    return values


def resolve_vnodes(spec: str, n: int) -> int:
    """``lnN`` -> max(1, round(ln n)); ``<c>lnN`` -> max(1, round(c ln n)); else an integer."""
    spec = spec.strip()
    if spec.endswith("lnN"):
        coeff = spec[:-3]
        try:
            c = float(coeff) if coeff else 1.0
        except ValueError:
            raise UsageError(f"bad --vnodes value {spec!r}")
        return max(1, round(c * math.log(n)))
    try:
        j = int(spec)
    except ValueError:
        raise UsageError(f"bad --vnodes value {spec!r}")
    if j < 1:
        raise UsageError("--vnodes must be >= 1")
    return j


def _param_for(args):
    """Validate that exactly the applicable one of --probes / --vnodes is present."""
    if args.algo == "multiprobe":
        if args.probes is None or args.vnodes is not None:
            raise UsageError("multiprobe takes --probes and not --vnodes")
        if args.probes < 1:
            raise UsageError("--probes must be >= 1")
        return "K", lambda n: args.probes
    if args.algo == "ring":
        if args.vnodes is None or args.probes is not None:
            raise UsageError("ring takes --vnodes and not --probes")
        resolve_vnodes(args.vnodes, 2)
        return "J", lambda n: resolve_vnodes(args.vnodes, n)
    if args.probes is not None or args.vnodes is not None:
        raise UsageError("jump takes neither --probes nor --vnodes")
    return "", lambda n: None


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def cmd_simulate(args, out) -> int:
    param_name, param_of = _param_for(args)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SIMULATE_COLUMNS)
    rows = []
    for n in args.nodes:
        param = param_of(n)
        config = loadsim.TrialConfig(
            algorithm=args.algo,
            n=n,
            param=param,
            keys_per_node=args.keys_per_node,
            trials=args.trials,
            base_seed=args.seed,
            memory_budget=args.memory_budget,
        )
        try:
            s = loadsim.simulate(config)
            stats = [_fmt(s.median), _fmt(s.p90), _fmt(s.p99)]
        except loadsim.CapacityExceeded as exc:
            print(f"warning: {exc}", file=sys.stderr)
            stats = [OOM, OOM, OOM]
        rows.append([args.algo, n, param_name, "" if param is None else param,
                     args.trials, args.keys_per_node, *stats])
    writer.writerows(rows)
    return 0


def _faulty_lookup(table: MultiProbeTable):
    """Lookup with a planted bug: an exhausted bucket wraps to the ring start.

    Used only to prove the checker can catch a broken successor search.
    """
    entries = table.entries()
    nb = table.bucket_count
    buckets = [[] for _ in range(nb)]
    for e in entries:
        buckets[(e[0] * nb) >> 64].append(e)
    streams = table.probe_streams

    def lookup(key):
        best_d = best = None
        for stream in streams:
            h = hash64(key, stream)
            bucket = buckets[(h * nb) >> 64]
            i = bisect_left(bucket, (h,))
            entry = bucket[i] if i < len(bucket) else entries[0]
            d = (entry[0] - h) & MASK64
            if best_d is None or d < best_d:
                best_d, best = d, entry
        return best[1]

    return lookup


def cmd_check(args, out) -> int:
    rng = random.Random(args.seed)
    table_seed = rng.getrandbits(64)
    table = MultiProbeTable(table_seed, args.probes)
    nodes = set()
    while len(nodes) < args.nodes:
        nodes.add(rng.getrandbits(64))
    for node in nodes:
        table.insert(node)
    keys = [rng.getrandbits(64) for _ in range(args.keys)]

    expected = oracle_lookup_many(table.entries(), table_seed, args.probes, keys)
    lookup = _faulty_lookup(table) if args.inject_skip_bucket else table.lookup
    failures = []
    passed = 0
    for key, want in zip(keys, expected):
        got = lookup(key)
        if got == int(want):
            passed += 1
        else:
            failures.append(("oracle", key, int(want), got))
    print(f"oracle: {passed}/{len(keys)} pass", file=out)

    bulk = table.lookup_many(keys)
    bulk_ok = int(np.count_nonzero(bulk == expected))
    for key, want, got in zip(keys, expected, bulk):
        if want != got:
            failures.append(("bulk", key, int(want), int(got)))
            break
    print(f"bulk: {bulk_ok}/{len(keys)} pass", file=out)

    newcomer = rng.getrandbits(64)
    while newcomer in nodes:
        newcomer = rng.getrandbits(64)
    table.insert(newcomer)
    after = table.lookup_many(keys)
    moved_wrong = 0
    for key, before, now in zip(keys, bulk, after):
        if now != before and int(now) != newcomer:
            moved_wrong += 1
            if moved_wrong == 1:
                failures.append(("monotonicity", key, int(before), int(now)))
    print(f"monotonicity: {len(keys) - moved_wrong}/{len(keys)} pass", file=out)

    table.remove(newcomer)
    restored = table.lookup_many(keys)
    mismatched = int(np.count_nonzero(restored != bulk))
    print(f"removal: {len(keys) - mismatched}/{len(keys)} pass", file=out)
    if mismatched:
        i = int(np.flatnonzero(restored != bulk)[0])
        failures.append(("removal", keys[i], int(bulk[i]), int(restored[i])))

    if failures:
        kind, key, want, got = failures[0]
        print(
            f"FAIL {kind}: seed={args.seed} key={key} expected={want} got={got}",
            file=out,
        )
        return 1
    print("all checks passed", file=out)
    return 0


def cmd_bench(args, out) -> int:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    if args.algo == "multiprobe":
        param_of = lambda n: args.probes or loadsim.DEFAULT_PROBES
    elif args.algo == "ring":
        param_of = lambda n: resolve_vnodes(args.vnodes or str(loadsim.DEFAULT_VNODES), n)
    else:
        param_of = lambda n: None
    for n in args.nodes:
        if args.op == "memory":
            value = loadsim.memory_per_node(args.algo, n, param_of(n), args.seed)
            writer.writerow([args.algo, n, "memory", _fmt(value), 0])
        else:
            value = loadsim.bench_op(args.algo, n, args.op, args.repetitions,
                                     param_of(n), args.seed)
            writer.writerow([args.algo, n, args.op, _fmt(value), 1])
        out.flush()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="peak-to-average load over many trials")
    sim.add_argument("--algo", choices=loadsim.ALGORITHMS, required=True)
    sim.add_argument("--nodes", type=parse_int_list, required=True)
    sim.add_argument("--keys-per-node", type=int, default=10_000)
    sim.add_argument("--trials", type=int, default=100)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--probes", type=int)
    sim.add_argument("--vnodes", help="integer, lnN or <c>lnN (e.g. 700lnN)")
    sim.add_argument("--memory-budget", type=int, default=1 << 30,
                     help="bytes; larger ring configurations report OOM")

    chk = sub.add_parser("check", help="oracle equivalence and monotonicity")
    chk.add_argument("--nodes", type=int, default=64)
    chk.add_argument("--keys", type=int, default=100_000)
    chk.add_argument("--probes", type=int, default=2)
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--inject-skip-bucket", action="store_true", help=argparse.SUPPRESS)

    bench = sub.add_parser("bench", help="ns/op timings and bytes/node")
    bench.add_argument("--algo", choices=loadsim.ALGORITHMS, required=True)
    bench.add_argument("--nodes", type=parse_int_list, required=True)
    bench.add_argument("--op", choices=(*loadsim.BENCH_OPS, "memory"), required=True)
    bench.add_argument("--probes", type=int)
    bench.add_argument("--vnodes")
    bench.add_argument("--repetitions", type=int, default=5)
    bench.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    commands = {"simulate": cmd_simulate, "check": cmd_check, "bench": cmd_bench}
    try:
        if args.command == "check" and (args.nodes < 1 or args.keys < 1 or args.probes < 1):
            raise UsageError("--nodes, --keys and --probes must be >= 1")
        if args.command == "simulate" and (args.trials < 1 or args.keys_per_node < 1):
            raise UsageError("--trials and --keys-per-node must be >= 1")
        return commands[args.command](args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
