"""Multi-probe consistent hashing.

Each node is hashed once onto the 64-bit ring. A key is hashed ``K`` ways;
for every probe we find the successor node, and the key goes to whichever
successor is nearest its probe. Ties on equal node hashes go to the smaller
node id, ties between probes to the lower probe index.
"""

from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DuplicateNodeError, EmptyTableError, NodeNotFoundError
from .hashcore import MASK64, NODE_STREAM, as_u64, hash64, probe_stream, stream_seed
from .ringstore import BucketedRing


class NodeEntry(NamedTuple):
    # field order gives the ring sort order (hash, then id)
    node_hash: int
    node_id: int


class MultiProbeTable:
    """Set of nodes on a ring, looked up with ``probes`` key hashes."""

    def __init__(self, seed: int, probes: int):
        if probes < 1:
            raise ValueError(f"probes must be >= 1, got {probes}")
        self.seed = seed & MASK64
        self.probes = probes
        self._node_stream = stream_seed(self.seed, NODE_STREAM)
        self._probe_streams = [probe_stream(self.seed, i) for i in range(probes)]
        self._hashes = {}
        self._ring = BucketedRing()

    def __len__(self):
        return len(self._ring)

    @property
    def count(self) -> int:
        return len(self._ring)

    def __contains__(self, node_id) -> bool:
        return node_id in self._hashes

    def node_hash(self, node_id: int) -> int:
        return hash64(node_id, self._node_stream)

    def insert(self, node_id: int) -> None:
        if node_id in self._hashes:
            raise DuplicateNodeError(node_id)
        h = self.node_hash(node_id)
        self._hashes[node_id] = h
        self._ring.add(NodeEntry(h, node_id))

    def remove(self, node_id: int) -> None:
        try:
            h = self._hashes.pop(node_id)
        except KeyError:
            raise NodeNotFoundError(node_id) from None
        self._ring.discard(NodeEntry(h, node_id))

    def lookup(self, key: int) -> int:
        if not self._hashes:
            raise EmptyTableError("lookup on empty table")
        best_d = None
        best = None
        for stream in self._probe_streams:
            h = hash64(key, stream)
            entry = self._ring.successor(h)
            d = (entry[0] - h) & MASK64
            if best_d is None or d < best_d:
                best_d, best = d, entry
        return best[1]

    def lookup_many(self, keys) -> np.ndarray:
        """Vectorised :meth:`lookup`; returns a uint64 array of node ids."""
        if not self._hashes:
            raise EmptyTableError("lookup on empty table")
        hashes, nodes, grid, shift = self.snapshot()
        streams = np.array(self._probe_streams, dtype=np.uint64)
        idx = _kernels.assign_entries(as_u64(keys), streams, hashes, grid, shift)
        return nodes[idx]

    def snapshot(self):
        """Sorted entry arrays ``(hashes, node_ids, grid, shift)`` for bulk lookups."""
        return self._ring.flat()

    def entries(self) -> list:
        """All entries in ring order."""
        return list(self._ring)

    @property
    def probe_streams(self) -> list:
        return list(self._probe_streams)

    @property
    def bucket_count(self) -> int:
        return self._ring.bucket_count

    def memory_estimate(self) -> int:
        return self._ring.memory_estimate()


def new_table(seed: int, probes: int) -> MultiProbeTable:
    return MultiProbeTable(seed, probes)
