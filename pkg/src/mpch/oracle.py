"""Brute-force reference assignment used as ground truth in tests.

No buckets, no index: every probe is compared against every entry.
Entries are ``(node_hash, node_id, ...)`` tuples, so the same functions check
both multi-probe tables and virtual-node rings.
"""

from collections import Counter

import numpy as np

from .errors import EmptyTableError
from .hashcore import MASK64, as_u64, hash64, hash64_array, probe_stream


def oracle_lookup(entries, seed: int, probes: int, key: int) -> int:
    if not entries:
        raise EmptyTableError("oracle lookup on no entries")
    candidates = []
    for i in range(probes):
        h = hash64(key, probe_stream(seed, i))
        for e in entries:
            candidates.append(((e[0] - h) & MASK64, i, e[1]))
    return min(candidates)[2]


def oracle_lookup_many(entries, seed: int, probes: int, keys) -> np.ndarray:
    """Numpy version of :func:`oracle_lookup` over many keys (O(n*K) per key)."""
    if not entries:
        raise EmptyTableError("oracle lookup on no entries")
    # sorting by node id first makes argmin's first-occurrence rule pick the
    # smaller id among equal hashes
    ordered = sorted(entries, key=lambda e: e[1])
    node_hashes = as_u64([e[0] for e in ordered])
    node_ids = as_u64([e[1] for e in ordered])
    keys = as_u64(keys)
    streams = as_u64([probe_stream(seed, i) for i in range(probes)])
    out = np.empty(keys.size, dtype=np.uint64)
    chunk = max(1, (1 << 22) // (probes * node_hashes.size))
    for start in range(0, keys.size, chunk):
        k = keys[start:start + chunk]
        probe_hashes = hash64_array(k[:, None], streams[None, :])
        dist = node_hashes[None, None, :] - probe_hashes[:, :, None]
        per_probe = dist.argmin(axis=2)
        per_probe_d = np.take_along_axis(dist, per_probe[:, :, None], axis=2)[:, :, 0]
        best_probe = per_probe_d.argmin(axis=1)
        winner = per_probe[np.arange(k.size), best_probe]
        out[start:start + chunk] = node_ids[winner]
    return out


def oracle_load_counts(entries, seed: int, probes: int, keys) -> Counter:
    assigned = oracle_lookup_many(entries, seed, probes, keys)
    return Counter(int(v) for v in assigned)
