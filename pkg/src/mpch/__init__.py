"""Multi-probe consistent hashing, with ring and jump hashing baselines."""

from .baselines import RingTable, VirtualEntry, jump_lookup, jump_lookup_many, new_ring
from .errors import DuplicateNodeError, EmptyTableError, NodeNotFoundError
from .hashcore import hash64, mix64, stream_seed
from .multiprobe import MultiProbeTable, NodeEntry, new_table

__all__ = [
    "DuplicateNodeError",
    "EmptyTableError",
    "MultiProbeTable",
    "NodeEntry",
    "NodeNotFoundError",
    "RingTable",
    "VirtualEntry",
    "hash64",
    "jump_lookup",
    "jump_lookup_many",
    "mix64",
    "new_ring",
    "new_table",
    "stream_seed",
]
