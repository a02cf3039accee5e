"""Compiled bulk paths: many-key assignment and load tallies.

These operate on a flat snapshot of a ring (entry hashes sorted by
``(hash, node_id)``) plus a coarse grid index over the top bits of the hash.
The grid is only an accelerator; successor semantics are those of the
sorted array, so results never depend on the table's own bucket count.
"""

import numpy as np
from numba import njit

from .hashcore import MIX_MUL1, MIX_MUL2

_M1 = np.uint64(MIX_MUL1)
_M2 = np.uint64(MIX_MUL2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S33 = np.uint64(33)
_ONE = np.uint64(1)
_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)
_JUMP_LCG = np.uint64(2862933555777941757)

MAX_GRID_BITS = 22


@njit(inline="always")
def _mix(z):
    z ^= z >> _S30
    z *= _M1
    z ^= z >> _S27
    z *= _M2
    z ^= z >> _S31
    return z


@njit(inline="always")
def _successor(h, hashes, grid, shift):
    n = hashes.size
    i = grid[h >> shift]
    while i < n and hashes[i] < h:
        i += 1
    if i == n:
        i = 0
    return i


@njit(inline="always")
def _best_entry(key, streams, hashes, grid, shift):
    best = _MAX
    best_i = -1
    for p in range(streams.size):
        h = _mix(key ^ streams[p])
        i = _successor(h, hashes, grid, shift)
        d = hashes[i] - h
        # strict comparison keeps the lowest probe index on ties
        if best_i < 0 or d < best:
            best = d
            best_i = i
    return best_i


@njit(cache=True, nogil=True)
def assign_entries(keys, streams, hashes, grid, shift):
    out = np.empty(keys.size, dtype=np.int64)
    for k in range(keys.size):
        out[k] = _best_entry(keys[k], streams, hashes, grid, shift)
    return out


@njit(cache=True, nogil=True)
def tally_sequential(n_keys, streams, hashes, owners, grid, shift, counts):
    """Add the owner of each key ``0 .. n_keys - 1`` into ``counts``."""
    for k in range(n_keys):
        i = _best_entry(np.uint64(k), streams, hashes, grid, shift)
        counts[owners[i]] += 1


@njit(inline="always")
def _jump(key, n):
    b = -1
    j = 0
    while j < n:
        b = j
        key = key * _JUMP_LCG + _ONE
        j = np.int64(((np.uint64(b) + _ONE) << _S31) // ((key >> _S33) + _ONE))
    return b


@njit(cache=True, nogil=True)
def jump_many(keys, n):
    out = np.empty(keys.size, dtype=np.int64)
    for k in range(keys.size):
        out[k] = _jump(keys[k], n)
    return out


@njit(cache=True, nogil=True)
def tally_jump_sequential(n_keys, stream, n, counts):
    for k in range(n_keys):
        counts[_jump(_mix(np.uint64(k) ^ stream), n)] += 1


def grid_bits(n_entries: int) -> int:
    bits = max(1, int(n_entries).bit_length() + 1)
    return min(bits, MAX_GRID_BITS)


def build_grid(hashes: np.ndarray):
    """Return ``(grid, shift)`` for a sorted uint64 hash array.

    ``grid[g]`` is the first index whose top bits are >= ``g``.
    """
    bits = grid_bits(hashes.size)
    shift = np.uint64(64 - bits)
    top = hashes >> shift
    grid = np.searchsorted(top, np.arange(1 << bits, dtype=np.uint64), side="left")
    return grid.astype(np.int64), shift
