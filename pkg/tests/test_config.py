"""Tests for config module."""

import pytest

from autfa.config import DEFAULT_INNER_BOUND, DEFAULT_SEED, DEFAULT_TRIALS, Config, OutputFormat
from autfa.errors import ValidationError


class TestConfig:
    """Tests for run configuration validation."""

    def test_defaults(self):
        """Test the default configuration."""
        config = Config()
        assert config.seed == DEFAULT_SEED
        assert config.trials == DEFAULT_TRIALS
        assert config.inner_bound == DEFAULT_INNER_BOUND
        assert config.output_format is OutputFormat.TEXT
        assert config.jobs == 1

    @pytest.mark.parametrize("name", ["trials", "search_bound", "inner_bound", "jobs"])
    def test_positive_bounds(self, name):
        """Test counts and bounds must be positive."""
        with pytest.raises(ValidationError, match=f"{name} must be positive"):
            Config(**{name: 0})

    def test_radius_may_be_zero(self):
        """Test radius 0 is a single vertex but negative radii are refused."""
        assert Config(radius=0).radius == 0
        with pytest.raises(ValidationError, match="non-negative"):
            Config(radius=-1)

    def test_format_from_string(self):
        """Test output formats are coerced from strings."""
        assert Config(output_format="json").output_format is OutputFormat.JSON
        with pytest.raises(ValidationError, match="unknown output format"):
            Config(output_format="yaml")
