"""Bucketed, sorted storage of ring entries.

The ring ``[0, 2**64)`` is cut into ``B`` equal arcs (``B`` a power of two).
An entry whose hash is ``h`` lives in bucket ``floor(h * B / 2**64)``, and
each bucket is a list kept sorted by the entry tuple, whose first two fields
are ``(hash, node_id)``. Concatenating the buckets in order therefore yields
the whole ring in sorted order.

Occupancy is held near six entries per bucket: ``B`` doubles once the mean
exceeds eight and halves once it drops below three.
"""

from bisect import bisect_left, insort

import numpy as np

from ._kernels import build_grid

GROW_ABOVE = 8
SHRINK_BELOW = 3

# Structural memory accounting (not allocator truth). Each non-empty bucket
# is an inline vector of 8 slots that spills in further chunks of 8.
ENTRY_BYTES = 16
HEADER_BYTES = 64
BUCKET_OVERHEAD_BYTES = 16
INLINE_SLOTS = 8


def bucket_capacity(size: int) -> int:
    if size == 0:
        return 0
    return -(-size // INLINE_SLOTS) * INLINE_SLOTS


class BucketedRing:
    def __init__(self):
        self._buckets = [[]]
        self._count = 0
        self._flat = None

    def __len__(self):
        return self._count

    @property
    def bucket_count(self) -> int:
        return len(self._buckets)

    def bucket_index(self, h: int) -> int:
        return (h * len(self._buckets)) >> 64

    def add(self, entry: tuple) -> None:
        insort(self._buckets[self.bucket_index(entry[0])], entry)
        self._count += 1
        self._flat = None
        if self._count > GROW_ABOVE * len(self._buckets):
            self._rebucket(2 * len(self._buckets))

    def discard(self, entry: tuple) -> None:
        bucket = self._buckets[self.bucket_index(entry[0])]
        i = bisect_left(bucket, entry)
        if i == len(bucket) or bucket[i] != entry:
            raise KeyError(entry)
        del bucket[i]
        self._count -= 1
        self._flat = None
        nb = len(self._buckets)
        if nb > 1 and self._count < SHRINK_BELOW * nb:
            self._rebucket(nb // 2)

    def _rebucket(self, new_count: int) -> None:
        entries = [e for bucket in self._buckets for e in bucket]
        buckets = [[] for _ in range(new_count)]
        # entries are globally sorted, so appending keeps each bucket sorted
        for e in entries:
            buckets[(e[0] * new_count) >> 64].append(e)
        self._buckets = buckets

    def successor(self, h: int) -> tuple:
        """First entry at or clockwise after ``h``; caller ensures non-empty."""
        nb = len(self._buckets)
        b = (h * nb) >> 64
        bucket = self._buckets[b]
        i = bisect_left(bucket, (h,))
        if i < len(bucket):
            return bucket[i]
        for step in range(1, nb + 1):
            bucket = self._buckets[(b + step) % nb]
            if bucket:
                return bucket[0]
        raise LookupError("successor on empty ring")

    def __iter__(self):
        for bucket in self._buckets:
            yield from bucket

    def bucket_sizes(self) -> list:
        return [len(b) for b in self._buckets]

    def flat(self):
        """Sorted ``(hashes, node_ids, grid, shift)`` arrays, cached until mutation."""
        if self._flat is None:
            entries = list(self)
            hashes = np.fromiter((e[0] for e in entries), dtype=np.uint64, count=len(entries))
            nodes = np.fromiter((e[1] for e in entries), dtype=np.uint64, count=len(entries))
            grid, shift = build_grid(hashes)
            self._flat = (hashes, nodes, grid, shift)
        return self._flat

    def memory_estimate(self) -> int:
        total = HEADER_BYTES
        for bucket in self._buckets:
            if bucket:
                total += bucket_capacity(len(bucket)) * ENTRY_BYTES + BUCKET_OVERHEAD_BYTES
        return total
