"""Baselines: ring consistent hashing with virtual nodes, and jump hashing.

The ring shares the bucketed store and successor rules with the multi-probe
table, and hashes keys on probe stream 0. With one virtual node per node it
therefore assigns exactly like a multi-probe table with one probe.
"""

from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DuplicateNodeError, EmptyTableError, NodeNotFoundError
from .hashcore import (
    MASK64,
    NODE_STREAM,
    as_u64,
    hash64,
    hash64_array,
    mix64,
    mix64_array,
    probe_stream,
    stream_seed,
)
from .ringstore import BucketedRing

JUMP_LCG = 2862933555777941757


class VirtualEntry(NamedTuple):
    node_hash: int
    node_id: int
    replica: int


def replica_stream(node_stream: int, replica: int) -> int:
    return node_stream ^ mix64(replica)


class RingTable:
    """Karger-style ring: each node owns ``vnodes`` points."""

    def __init__(self, seed: int, vnodes: int):
        if vnodes < 1:
            raise ValueError(f"vnodes must be >= 1, got {vnodes}")
        self.seed = seed & MASK64
        self.vnodes = vnodes
        node_stream = stream_seed(self.seed, NODE_STREAM)
        self._replica_streams = [replica_stream(node_stream, r) for r in range(vnodes)]
        self._key_stream = probe_stream(self.seed, 0)
        self._nodes = set()
        self._ring = BucketedRing()

    def __len__(self):
        return len(self._nodes)

    @property
    def count(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id) -> bool:
        return node_id in self._nodes

    def virtual_entries_for(self, node_id: int) -> list:
        return [
            VirtualEntry(hash64(node_id, s), node_id, r)
            for r, s in enumerate(self._replica_streams)
        ]

    def insert(self, node_id: int) -> None:
        if node_id in self._nodes:
            raise DuplicateNodeError(node_id)
        self._nodes.add(node_id)
        for entry in self.virtual_entries_for(node_id):
            self._ring.add(entry)

    def remove(self, node_id: int) -> None:
        if node_id not in self._nodes:
            raise NodeNotFoundError(node_id)
        self._nodes.remove(node_id)
        for entry in self.virtual_entries_for(node_id):
            self._ring.discard(entry)

    def lookup(self, key: int) -> int:
        if not self._nodes:
            raise EmptyTableError("lookup on empty table")
        return self._ring.successor(hash64(key, self._key_stream))[1]

    def lookup_many(self, keys) -> np.ndarray:
        if not self._nodes:
            raise EmptyTableError("lookup on empty table")
        hashes, nodes, grid, shift = self.snapshot()
        streams = np.array([self._key_stream], dtype=np.uint64)
        idx = _kernels.assign_entries(as_u64(keys), streams, hashes, grid, shift)
        return nodes[idx]

    def snapshot(self):
        """Sorted entry arrays ``(hashes, node_ids, grid, shift)`` for bulk lookups."""
        return self._ring.flat()

    def entries(self) -> list:
        return list(self._ring)

    @property
    def entry_count(self) -> int:
        return len(self._ring)

    @property
    def bucket_count(self) -> int:
        return self._ring.bucket_count

    def memory_estimate(self) -> int:
        return self._ring.memory_estimate()


def new_ring(seed: int, vnodes: int) -> RingTable:
    return RingTable(seed, vnodes)


def ring_arrays(seed: int, vnodes: int, node_ids):
    """Sorted ``(hashes, node_ids)`` of every virtual entry, built in bulk.

    Same contents as ``RingTable.entries()`` after inserting ``node_ids``,
    without materialising per-entry Python objects.
    """
    ids = as_u64(node_ids)
    node_stream = np.uint64(stream_seed(seed & MASK64, NODE_STREAM))
    streams = node_stream ^ mix64_array(np.arange(vnodes, dtype=np.uint64))
    hashes = hash64_array(ids[None, :], streams[:, None]).ravel()
    owners = np.broadcast_to(ids[None, :], (vnodes, ids.size)).ravel()
    replicas = np.repeat(np.arange(vnodes, dtype=np.uint64), ids.size)
    order = np.lexsort((replicas, owners, hashes))
    return hashes[order], np.ascontiguousarray(owners[order])


def jump_lookup(key: int, n: int) -> int:
    """Jump consistent hash of a 64-bit key into buckets ``0 .. n - 1``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    key &= MASK64
    b, j = -1, 0
    while j < n:
        b = j
        key = (key * JUMP_LCG + 1) & MASK64
        j = ((b + 1) << 31) // ((key >> 33) + 1)
    return b


def jump_lookup_many(keys, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _kernels.jump_many(as_u64(keys), n)
