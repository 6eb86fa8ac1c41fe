"""Error handling and categorization for lelong computations."""

from __future__ import annotations

import json
from enum import Enum
from typing import Any

import numpy as np
from pydantic import ValidationError


class ErrorType(str, Enum):
    """Error types and the exit code each one maps to."""

    VERIFICATION = "verification"  # An identity failed its tolerance
    INVALID_INPUT = "invalid_input"  # Schema, range or psh violations - user must fix the input
    NUMERICAL = "numerical"  # Non-convergence, exhausted budgets, infinite variance
    PERMANENT = "permanent"  # Anything else - cannot recover


_EXIT_CODES = {
    ErrorType.VERIFICATION: 1,
    ErrorType.INVALID_INPUT: 2,
    ErrorType.NUMERICAL: 3,
    ErrorType.PERMANENT: 3,
}


class LelongError(Exception):
    """Base class of every error raised on purpose by lelong."""


class InvalidInputError(LelongError, ValueError):
    """A spec, radius or option is outside the admissible class."""


class UnsupportedConfigurationError(InvalidInputError):
    """No computation path exists for this combination of current, weight and engine."""


class NumericalError(LelongError, ArithmeticError):
    """A numerical method failed to reach its tolerance within its budget."""


class ErrorCategory:
    """Categorizes errors for exit codes and report handling."""

    INVALID_INPUT_EXCEPTIONS = (
        InvalidInputError,
        ValidationError,
        json.JSONDecodeError,
        ValueError,
        KeyError,
        TypeError,
        FileNotFoundError,
    )

    NUMERICAL_EXCEPTIONS = (
        NumericalError,
        FloatingPointError,
        OverflowError,
        ZeroDivisionError,
        np.linalg.LinAlgError,
    )

    @classmethod
    def categorize_error(cls, error: Exception, node_name: str = "") -> ErrorType:
        """Categorize an error based on its type and message.

        Args:
            error: The exception that was raised
            node_name: Name of the graph node that raised the error (for context)

        Returns:
            ErrorType indicating the exit code and report handling
        """
        error_msg = str(error).lower()

        # Numerical failures are checked first: NumericalError is also an ArithmeticError
        if isinstance(error, cls.NUMERICAL_EXCEPTIONS):
            return ErrorType.NUMERICAL

        if isinstance(error, cls.INVALID_INPUT_EXCEPTIONS):
            return ErrorType.INVALID_INPUT

        if any(indicator in error_msg for indicator in ["did not converge", "budget", "variance", "nan"]):
            return ErrorType.NUMERICAL

        if any(indicator in error_msg for indicator in ["schema", "invalid", "must", "out of range"]):
            return ErrorType.INVALID_INPUT

        return ErrorType.PERMANENT

    @classmethod
    def create_error_dict(
        cls, error: Exception, node_name: str, error_type: ErrorType | None = None
    ) -> dict[str, Any]:
        """Create a structured error dictionary for state.

        Args:
            error: The exception that was raised
            node_name: Name of the graph node that raised the error
            error_type: Optional pre-categorized error type

        Returns:
            Dictionary with error information
        """
        if error_type is None:
            error_type = cls.categorize_error(error, node_name)

        return {
            "node": node_name,
            "type": error_type.value,
            "message": str(error).splitlines()[0] if str(error) else type(error).__name__,
            "error_class": type(error).__name__,
        }


def exit_code_for(error_type: ErrorType | str) -> int:
    """Return the CLI exit code of an error type."""
    return _EXIT_CODES[ErrorType(error_type)]


def is_numerical_error(error: Exception) -> bool:
    """Check if an error is a numerical failure (exit code 3)."""
    return ErrorCategory.categorize_error(error) == ErrorType.NUMERICAL


def is_input_error(error: Exception) -> bool:
    """Check if an error requires the user to fix the input (exit code 2)."""
    return ErrorCategory.categorize_error(error) == ErrorType.INVALID_INPUT
