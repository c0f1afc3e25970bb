"""
Exception hierarchy for python-setreg.

Every error raised by the package derives from ``SetRegError``. Validation
errors additionally derive from ``ValueError`` so callers that only care
about "bad argument" can keep catching the builtin.
"""

from typing import Optional, Tuple


class SetRegError(Exception):
    """Base class for all python-setreg errors."""


class ImageFormatError(SetRegError, ValueError):
    """Raised when a raster has an unsupported layout or sample type."""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class DimensionMismatchError(SetRegError, ValueError):
    """Raised when two grids (or a grid and a set) differ in size."""

    def __init__(
        self,
        message: str,
        expected: Optional[Tuple[int, int]] = None,
        actual: Optional[Tuple[int, int]] = None,
        path: Optional[str] = None,
    ):
        self.expected = expected
        self.actual = actual
        self.path = path

        full_message = message
        if expected is not None and actual is not None:
            full_message += f" (expected {expected[0]}x{expected[1]}, "
            full_message += f"got {actual[0]}x{actual[1]})"
        if path is not None:
            full_message = f"{path}: {full_message}"

        super().__init__(full_message)


class ConfigError(SetRegError, ValueError):
    """Raised for invalid configuration values."""


class DatasetError(SetRegError):
    """Raised when an image set or its sidecar cannot be read or written."""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class MissingTableError(SetRegError, KeyError):
    """Raised when an active graph edge has no correlation table."""

    def __init__(self, edge: Tuple[int, int]):
        self.edge = edge
        super().__init__(f"no correlation table for active edge {edge}")

    def __str__(self) -> str:
        # KeyError would otherwise repr() the message
        return str(self.args[0])
