"""Exception types shared by all parsers and writers."""


class FormatError(ValueError):
    """Input is not in the expected container/file format."""


class ParseError(FormatError):
    """Malformed record inside an otherwise recognized format."""


class StructuralError(FormatError):
    """Well-formed records that violate structural constraints (bad indices, count mismatches)."""


class TruncationError(StructuralError):
    """Payload ends before the declared amount of data."""


class UnsupportedFeatureError(FormatError):
    """Valid input using a feature this implementation does not support."""


class ValidationError(ValueError):
    """Domain-level constraint violated (unknown label, bad range)."""
