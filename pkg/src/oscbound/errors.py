"""Exception hierarchy."""


class OscboundError(ValueError):
    """Base class for invalid input to oscbound operations."""


class EmptyShapeError(OscboundError):
    """A shape of zero measure was passed where a mean is required."""

    def __init__(self, msg="empty shape"):
        super().__init__(msg)


class GridFormatError(OscboundError):
    """Malformed OSCG file."""


class BadMagicError(GridFormatError):
    def __init__(self, found=b""):
        super().__init__(f"bad magic: expected b'OSCG', found {found!r}")


class DimensionMismatchError(GridFormatError):
    pass


class TruncatedPayloadError(GridFormatError):
    pass


class NotEnumerableError(OscboundError):
    def __init__(self, family):
        super().__init__(f"not cell-enumerable: {family}")


class ShapeError(OscboundError):
    """Shape outside the family an operation requires (not a cube, not in basis A, ...)."""


class CZError(OscboundError):
    """Precondition violation when building a Calderon-Zygmund decomposition."""
