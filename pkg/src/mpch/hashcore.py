"""Seeded 64-bit hash streams.

Every table owns a single 64-bit seed. Stream tag 0 hashes node ids, tag
``i + 1`` is the i-th key probe. All arithmetic wraps modulo 2**64, and the
constants below are fixed: two processes using the same seed must place
every key identically.
"""

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
RING_SIZE = 1 << 64

MIX_MUL1 = 0xBF58476D1CE4E5B9
MIX_MUL2 = 0x94D049BB133111EB
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

NODE_STREAM = 0


def mix64(z: int) -> int:
    """SplitMix64 finalizer. A bijection on 64-bit integers."""
    z &= MASK64
    z ^= z >> 30
    z = (z * MIX_MUL1) & MASK64
    z ^= z >> 27
    z = (z * MIX_MUL2) & MASK64
    z ^= z >> 31
    return z


def stream_seed(table_seed: int, tag: int) -> int:
    return mix64(table_seed + (tag + 1) * GOLDEN_GAMMA)


def probe_stream(table_seed: int, probe: int) -> int:
    """Stream for the zero-based key probe ``probe``."""
    return stream_seed(table_seed, probe + 1)


def hash64(x: int, stream: int) -> int:
    return mix64((x ^ stream) & MASK64)


def ring_distance(a: int, b: int) -> int:
    """Clockwise distance from ``a`` to ``b`` on the 64-bit ring."""
    return (b - a) & MASK64


# numpy uint64 arithmetic wraps silently for arrays, which is what we want.
_M1 = np.uint64(MIX_MUL1)
_M2 = np.uint64(MIX_MUL2)


def mix64_array(z) -> np.ndarray:
    z = np.array(z, dtype=np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= _M1
    z ^= z >> np.uint64(27)
    z *= _M2
    z ^= z >> np.uint64(31)
    return z


def hash64_array(x, stream) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64)
    return mix64_array(x ^ np.asarray(stream, dtype=np.uint64))


def as_u64(values) -> np.ndarray:
    """Coerce python ints (possibly >= 2**63) to a uint64 array."""
    if isinstance(values, np.ndarray) and values.dtype == np.uint64:
        return values
    if isinstance(values, np.ndarray) and values.dtype.kind in "iu":
        return values.astype(np.uint64)
    return np.fromiter((int(v) & MASK64 for v in values), dtype=np.uint64)
