"""Unit tests for error categorisation and exit codes."""

import json

import numpy as np
import pytest
from pydantic import BaseModel, ValidationError

from lelong.error_handling import (
    ErrorCategory,
    ErrorType,
    InvalidInputError,
    NumericalError,
    UnsupportedConfigurationError,
    exit_code_for,
    is_input_error,
    is_numerical_error,
)


class _Model(BaseModel):
    n: int


class TestCategorizeError:
    """Test ErrorCategory.categorize_error."""

    def test_numerical_error(self):
        """NumericalError is numerical even though it is an ArithmeticError."""
        assert ErrorCategory.categorize_error(NumericalError("quad did not converge")) is ErrorType.NUMERICAL

    def test_linalg_error(self):
        assert ErrorCategory.categorize_error(np.linalg.LinAlgError("singular")) is ErrorType.NUMERICAL

    def test_invalid_input(self):
        assert ErrorCategory.categorize_error(InvalidInputError("r out of range")) is ErrorType.INVALID_INPUT

    def test_unsupported_configuration_is_input(self):
        """Unsupported configurations are fixed by the user."""
        error = UnsupportedConfigurationError("no closed form")
        assert ErrorCategory.categorize_error(error) is ErrorType.INVALID_INPUT

    def test_validation_and_json_errors(self):
        with pytest.raises(ValidationError) as info:
            _Model(n="x")
        assert is_input_error(info.value)
        assert is_input_error(json.JSONDecodeError("bad", "{", 0))

    def test_message_keywords(self):
        """Unknown exception classes fall back to message keywords."""
        assert ErrorCategory.categorize_error(RuntimeError("evaluation budget exhausted")) is ErrorType.NUMERICAL
        assert ErrorCategory.categorize_error(RuntimeError("schema mismatch")) is ErrorType.INVALID_INPUT
        assert ErrorCategory.categorize_error(RuntimeError("boom")) is ErrorType.PERMANENT


class TestErrorDict:
    """Test ErrorCategory.create_error_dict."""

    def test_fields(self):
        detail = ErrorCategory.create_error_dict(NumericalError("first line\nsecond line"), "profile")
        assert detail == {
            "node": "profile",
            "type": "numerical",
            "message": "first line",
            "error_class": "NumericalError",
        }

    def test_empty_message_uses_class_name(self):
        detail = ErrorCategory.create_error_dict(KeyError(), "parse_inputs")
        assert detail["message"] == "KeyError"


class TestExitCodes:
    """Test the exit-code contract."""

    @pytest.mark.parametrize(
        ("error_type", "code"),
        [
            (ErrorType.VERIFICATION, 1),
            (ErrorType.INVALID_INPUT, 2),
            (ErrorType.NUMERICAL, 3),
            (ErrorType.PERMANENT, 3),
            ("invalid_input", 2),
        ],
    )
    def test_exit_code_for(self, error_type, code):
        assert exit_code_for(error_type) == code

    def test_is_numerical_error(self):
        assert is_numerical_error(OverflowError())
        assert not is_numerical_error(InvalidInputError("bad"))
