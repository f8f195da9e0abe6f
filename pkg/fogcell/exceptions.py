"""Custom exceptions for fogcell.

This module defines the exception hierarchy for fogcell, providing
clear error types for configuration problems and model failures.
"""

from typing import Optional


class FogCellError(Exception):
    """Base exception for all fogcell errors."""

    def __init__(self, message: str, details: Optional[dict] = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class ConfigError(FogCellError):
    """Configuration-related errors (parse, unknown key, out of range)."""

    def __init__(
        self,
        message: str,
        key: Optional[str] = None,
        line_no: Optional[int] = None,
        details: Optional[dict] = None,
    ):
        self.key = key
        self.line_no = line_no
        prefix = ""
        if line_no is not None:
            prefix += f"line {line_no}: "
        if key is not None:
            prefix += f"'{key}': "
        super().__init__(f"{prefix}{message}", details)


class InvalidParameterError(FogCellError, ValueError):
    """A model operation was called outside its preconditions."""

    def __init__(self, parameter: str, message: str, details: Optional[dict] = None):
        self.parameter = parameter
        super().__init__(f"Parameter '{parameter}': {message}", details)


class ModelError(FogCellError):
    """Model evaluation errors."""

    pass


class NoReachablePointError(ModelError):
    """Every evaluated point of a curve was unreachable."""

    pass
