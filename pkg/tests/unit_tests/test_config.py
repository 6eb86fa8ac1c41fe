"""Unit tests for configuration."""

import os
from importlib import reload
from unittest.mock import patch

import lelong.config


def _reloaded():
    reload(lelong.config)
    return lelong.config.Config


class TestConfig:
    """Test Config class."""

    def teardown_method(self):
        reload(lelong.config)

    def test_default_tolerances(self):
        """Test default identity tolerances."""
        with patch.dict(os.environ, {}, clear=True):
            config = _reloaded()
            assert config.TOL_DETERMINISTIC == 1e-9
            assert config.TOL_LIMIT == 1e-5
            assert config.MC_SIGMAS == 3.0

    def test_default_budgets(self):
        """Test default quadrature and Monte Carlo budgets."""
        with patch.dict(os.environ, {}, clear=True):
            config = _reloaded()
            assert config.MAX_EVALS == 200000
            assert config.MC_SAMPLES == 1000000
            assert config.MAX_CONCURRENCY is None

    def test_max_evals_from_environment(self):
        """Test LELONG_MAX_EVALS caps the quadrature budget."""
        with patch.dict(os.environ, {"LELONG_MAX_EVALS": "2100"}):
            config = _reloaded()
            assert config.MAX_EVALS == 2100
            assert config.quad_limit() == 100

    def test_caching_flag(self):
        """Test boolean parsing of LELONG_ENABLE_CACHING."""
        with patch.dict(os.environ, {"LELONG_ENABLE_CACHING": "False"}):
            assert _reloaded().ENABLE_CACHING is False
        with patch.dict(os.environ, {"LELONG_ENABLE_CACHING": "true"}):
            assert _reloaded().ENABLE_CACHING is True

    def test_log_level_uppercased(self):
        """Test the log level is normalised."""
        with patch.dict(os.environ, {"LELONG_LOG_LEVEL": "debug"}):
            assert _reloaded().LOG_LEVEL == "DEBUG"

    def test_validate_defaults(self):
        """Test the defaults validate cleanly."""
        with patch.dict(os.environ, {}, clear=True):
            assert _reloaded().validate() == []

    def test_validate_reports_problems(self):
        """Test validation of out-of-range settings."""
        env = {"LELONG_TOL_LIMIT": "0", "LELONG_R_FACTOR": "1.5", "LELONG_MAX_EVALS": "10"}
        with patch.dict(os.environ, env):
            problems = _reloaded().validate()
            assert "TOL_LIMIT must be positive" in problems
            assert "R_FACTOR must lie in (0, 1)" in problems
            assert any("MAX_EVALS" in problem for problem in problems)
