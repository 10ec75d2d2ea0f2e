"""Exception types raised by this package.

Everything derives from :class:`VecKMError` so callers can catch one base
class. Each subclass also inherits ``ValueError`` because these are all,
at bottom, complaints about values handed to us.
"""

from __future__ import annotations


class VecKMError(ValueError):
    """Base class for all errors raised by veckm."""


class ParameterError(VecKMError):
    """A scalar argument is outside its allowed domain (e.g. alpha <= 0)."""


class ValidationError(VecKMError):
    """Input data is malformed: wrong shape, NaN/Inf coordinates, empty."""


class ContractError(VecKMError):
    """Two objects that must agree do not (dimension or bandwidth mismatch)."""


class DegenerateEncodingError(VecKMError):
    """An encoding row has zero norm and cannot be normalized."""


class DegenerateOutputError(VecKMError):
    """An operation produced an empty result (e.g. subsampling removed all points)."""


class EmptyInputError(VecKMError):
    """A parsed input contained zero points."""


class CloudParseError(VecKMError):
    """A point cloud file is syntactically invalid.

    Carries the 1-based line number of the first offending line.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EncodingFormatError(VecKMError):
    """An encoding file has a bad magic, header, or truncated payload."""
