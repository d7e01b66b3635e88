"""Exception types shared across the package.

Every rejected input raises a typed error; no public function returns NaN
or silently repairs bad data.
"""


class EDProfError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(EDProfError):
    """Input violates a documented precondition (shape, range, enum, file layout)."""


class DegenerateInputError(EDProfError):
    """Statistically degenerate input: zero variance where a ratio needs it,
    or a sample too small for the requested procedure."""


class RankDeficiencyError(DegenerateInputError):
    """Design matrix is rank deficient; coefficients are not identifiable."""


class StreamError(EDProfError):
    """Base class for logit-stream read/write failures."""


class BadMagicError(StreamError):
    """File does not start with the stream magic bytes."""


class UnsupportedVersionError(StreamError):
    """Stream declares a format version this reader does not know."""


class TruncatedStreamError(StreamError):
    """Stream ended mid-structure. Carries the byte offset where data ran out."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ChecksumMismatchError(StreamError):
    """Whole-stream checksum does not match the stored trailer value."""


class RecordMismatchError(StreamError):
    """A record disagrees with the header declarations (size, width, ordering)."""
