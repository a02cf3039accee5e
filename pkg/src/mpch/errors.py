class EmptyTableError(LookupError):
    """Lookup on a table with no nodes."""


class DuplicateNodeError(ValueError):
    """Insert of a node id that is already a member."""


class NodeNotFoundError(KeyError):
    """Removal of a node id that is not a member."""
