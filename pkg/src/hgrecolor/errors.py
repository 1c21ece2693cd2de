"""Exception types shared across the package."""


class HypergraphError(ValueError):
    """Malformed hypergraph data (bad edge, id out of range, duplicate edge)."""

    def __init__(self, message, edge_index=None):
        super().__init__(message)
        self.edge_index = edge_index


class DegeneracyError(ValueError):
    """A transform produced a structure that cannot be represented (e.g. duplicate edges)."""


class ResourceError(RuntimeError):
    """An exhaustive search exceeded its configured budget."""


class IntegrityError(ValueError):
    """A trace or certificate is inconsistent with the hypergraph or input it claims."""


class PreconditionError(ValueError):
    """An operation was called on inputs that violate its precondition.

    ``witness`` carries the offending object when there is one.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
