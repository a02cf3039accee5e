"""Peak-to-average load experiments and micro-benchmarks.

A trial builds one table over nodes ``0 .. n - 1`` with a fresh seed, assigns
keys ``0 .. n*m - 1`` and records the per-node tallies. Percentiles over many
trials reproduce the shape of the published peak-to-average tables at desk
scale.
"""

import os
import random
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .baselines import RingTable, jump_lookup, ring_arrays
from .hashcore import as_u64, probe_stream, stream_seed
from .multiprobe import MultiProbeTable

ALGORITHMS = ("multiprobe", "ring", "jump")
BENCH_OPS = ("init", "assign", "update")

DEFAULT_PROBES = 21
DEFAULT_VNODES = 100

# Peak bytes per virtual entry while building a ring in bulk (hash, owner,
# replica, sort permutation and gathered copies).
RING_BUILD_BYTES_PER_ENTRY = 48


class CapacityExceeded(MemoryError):
    """A configuration would not fit in the memory budget."""


@dataclass(frozen=True)
class TrialConfig:
    algorithm: str
    n: int
    param: Optional[int] = None
    keys_per_node: int = 10_000
    trials: int = 100
    base_seed: int = 0
    memory_budget: int = 1 << 30

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.n < 1 or self.keys_per_node < 1 or self.trials < 1:
            raise ValueError("n, keys_per_node and trials must all be >= 1")
        if self.algorithm != "jump" and (self.param is None or self.param < 1):
            raise ValueError(f"{self.algorithm} needs a positive param, got {self.param}")

    @property
    def total_keys(self) -> int:
        return self.n * self.keys_per_node

    def table_seed(self, trial_index: int) -> int:
        return stream_seed(self.base_seed, trial_index)


@dataclass(frozen=True)
class LoadReport:
    counts: np.ndarray
    total_keys: int
    peak_to_average: float

    @classmethod
    def from_counts(cls, counts) -> "LoadReport":
        counts = np.asarray(counts, dtype=np.int64)
        total = int(counts.sum())
        return cls(counts, total, int(counts.max()) * counts.size / total)


@dataclass(frozen=True)
class TrialSummary:
    median: float
    p90: float
    p99: float
    min: float
    max: float
    mean: float
    trials: int


def percentile(values, p: int) -> float:
    """Nearest-rank percentile: the ``ceil(p/100 * T)``-th smallest value."""
    ordered = sorted(values)
    rank = max(1, -(-p * len(ordered) // 100))
    return ordered[rank - 1]


def summarize(reports) -> TrialSummary:
    ratios = [r.peak_to_average if isinstance(r, LoadReport) else float(r) for r in reports]
    if not ratios:
        raise ValueError("summarize needs at least one report")
    return TrialSummary(
        median=percentile(ratios, 50),
        p90=percentile(ratios, 90),
        p99=percentile(ratios, 99),
        min=min(ratios),
        max=max(ratios),
        mean=statistics.fmean(ratios),
        trials=len(ratios),
    )


def exact_shares(node_hashes, probes: int) -> np.ndarray:
    """Exact fraction of the key space each node receives under multi-probe lookup.

    Node ``j`` owns the arc of length ``x_j`` ending at its hash. A single
    probe's distance to its successor exceeds ``d`` with probability
    ``G(d) = sum_i max(x_i - d, 0)``, so node ``j`` receives
    ``K * integral_0^{x_j} G(d)**(K-1) dd`` of all keys. ``G`` is piecewise
    linear, so the integral is evaluated in closed form segment by segment.
    Results are in the order of ``node_hashes`` sorted ascending. These are
    the loads an infinite key sample converges to, free of sampling noise.
    """
    if probes < 1:
        raise ValueError("probes must be >= 1")
    h = np.sort(np.asarray(node_hashes, dtype=np.uint64))
    n = h.size
    if n == 0:
        raise ValueError("need at least one node")
    if n == 1:
        return np.ones(1)
    arcs = (h - np.roll(h, 1)).astype(np.float64) / 2.0**64
    order = np.argsort(arcs, kind="stable")
    xs = arcs[order]
    remaining = np.concatenate([np.cumsum(xs[::-1])[::-1], [0.0]])
    cum = np.zeros(n + 1)
    prev = 0.0
    for r in range(n):
        a, c = remaining[r], n - r
        cum[r + 1] = cum[r] + ((a - c * prev) ** probes - (a - c * xs[r]) ** probes) / c
        prev = xs[r]
    shares = np.empty(n)
    shares[order] = cum[1:]
    return shares


def ring_bytes_needed(n: int, vnodes: int) -> int:
    return n * vnodes * RING_BUILD_BYTES_PER_ENTRY


def check_capacity(config: TrialConfig) -> None:
    if config.algorithm == "ring":
        need = ring_bytes_needed(config.n, config.param)
        if need > config.memory_budget:
            raise CapacityExceeded(
                f"ring n={config.n} J={config.param} needs ~{need} bytes, "
                f"budget is {config.memory_budget}"
            )


def run_trial(config: TrialConfig, trial_index: int) -> LoadReport:
    check_capacity(config)
    seed = config.table_seed(trial_index)
    counts = np.zeros(config.n, dtype=np.int64)
    if config.algorithm == "multiprobe":
        table = MultiProbeTable(seed, config.param)
        for node in range(config.n):
            table.insert(node)
        hashes, nodes, grid, shift = table.snapshot()
        streams = as_u64(table.probe_streams)
        _kernels.tally_sequential(
            config.total_keys, streams, hashes, nodes.astype(np.int64), grid, shift, counts
        )
    elif config.algorithm == "ring":
        hashes, owners = ring_arrays(seed, config.param, np.arange(config.n))
        grid, shift = _kernels.build_grid(hashes)
        streams = as_u64([probe_stream(seed, 0)])
        _kernels.tally_sequential(
            config.total_keys, streams, hashes, owners.astype(np.int64), grid, shift, counts
        )
    else:
        # keys go through the probe-0 stream first so trials differ by seed
        stream = np.uint64(probe_stream(seed, 0))
        _kernels.tally_jump_sequential(config.total_keys, stream, config.n, counts)
    return LoadReport.from_counts(counts)


def worker_threads() -> int:
    env = os.environ.get("PROBE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_trials(config: TrialConfig, threads: Optional[int] = None) -> list:
    check_capacity(config)
    threads = threads or worker_threads()
    indices = range(config.trials)
    if threads == 1:
        return [run_trial(config, t) for t in indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: run_trial(config, t), indices))


def simulate(config: TrialConfig, threads: Optional[int] = None) -> TrialSummary:
    return summarize(run_trials(config, threads))


def build_table(algorithm: str, param: Optional[int], seed: int = 0):
    if algorithm == "multiprobe":
        return MultiProbeTable(seed, param or DEFAULT_PROBES)
    if algorithm == "ring":
        return RingTable(seed, param or DEFAULT_VNODES)
    raise ValueError(f"{algorithm!r} has no table")


def _time_init(algorithm, n, param, seed, rng):
    table = build_table(algorithm, param, seed)
    start = time.perf_counter_ns()
    for node in range(n):
        table.insert(node)
    return (time.perf_counter_ns() - start) / n


def _time_assign(algorithm, n, param, seed, rng, keys):
    probe_keys = [rng.getrandbits(64) for _ in range(keys)]
    if algorithm == "jump":
        start = time.perf_counter_ns()
        for k in probe_keys:
            jump_lookup(k, n)
        return (time.perf_counter_ns() - start) / keys
    table = build_table(algorithm, param, seed)
    for node in range(n):
        table.insert(node)
    lookup = table.lookup
    start = time.perf_counter_ns()
    for k in probe_keys:
        lookup(k)
    return (time.perf_counter_ns() - start) / keys


def _time_update(algorithm, n, param, seed, rng):
    table = build_table(algorithm, param, seed)
    ids = list(range(n))
    rng.shuffle(ids)
    removal = ids[:]
    rng.shuffle(removal)
    start = time.perf_counter_ns()
    for node in ids:
        table.insert(node)
    for node in removal:
        table.remove(node)
    return (time.perf_counter_ns() - start) / (2 * n)


def bench_op(
    algorithm: str,
    n: int,
    op: str,
    repetitions: int = 5,
    param: Optional[int] = None,
    seed: int = 0,
    assign_keys: int = 2000,
) -> float:
    """Median wall-clock nanoseconds per operation, after one warm-up pass.

    ``init`` and ``update`` are per node (update covers an empty-to-full
    then full-to-empty cycle in random order); ``assign`` is per key.
    Jump hashing keeps no table, so its init and update cost is zero.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if op not in BENCH_OPS:
        raise ValueError(f"unknown op {op!r}")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if algorithm == "jump" and op != "assign":
        return 0.0
    rng = random.Random(seed)

    def once():
        if op == "init":
            return _time_init(algorithm, n, param, seed, rng)
        if op == "assign":
            return _time_assign(algorithm, n, param, seed, rng, assign_keys)
        return _time_update(algorithm, n, param, seed, rng)

    once()
    return statistics.median(once() for _ in range(repetitions))


def memory_per_node(algorithm: str, n: int, param: Optional[int] = None, seed: int = 0) -> float:
    if algorithm == "jump":
        return 0.0
    table = build_table(algorithm, param, seed)
    for node in range(n):
        table.insert(node)
    return table.memory_estimate() / n
