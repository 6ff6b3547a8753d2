"""Exception types shared across the package."""


class VGCError(Exception):
    """Base class for all errors raised by vgclab."""


class InvalidArgument(VGCError, ValueError):
    pass


class OutOfRange(VGCError, IndexError):
    pass


class NotFound(VGCError, LookupError):
    pass


class InconsistentTables(VGCError, ValueError):
    """A derived set was paired with a table that does not cover it."""


class InvalidState(VGCError, RuntimeError):
    pass


class NotEstimable(VGCError, LookupError):
    pass


class ResourceError(VGCError, MemoryError):
    pass


class IntegrityError(VGCError):
    """A persisted file failed validation."""


class BadMagic(IntegrityError):
    pass


class BadVersion(IntegrityError):
    pass


class ChecksumMismatch(IntegrityError):
    pass


class TruncatedFile(IntegrityError):
    pass


class NotSorted(IntegrityError):
    pass
