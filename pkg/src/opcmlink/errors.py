"""Exception hierarchy shared by every module."""


class OpcmError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(OpcmError):
    """Malformed input: unknown elements, missing table entries, mismatched domains."""


class PreconditionError(OpcmError):
    """An operation was called outside the hypotheses it requires."""


class ResourceError(OpcmError):
    """An enumeration would exceed the configured carrier cap."""


class NoAdjointError(PreconditionError):
    """A monotone map has no upper adjoint on the given finite carriers."""


class InconsistentLinkage(OpcmError):
    """Linked data has no consistent combination (the combine is undefined)."""
