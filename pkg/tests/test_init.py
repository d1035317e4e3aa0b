"""
Test package metadata and configuration loading
"""

import os
from typing import Generator
from unittest.mock import patch

import pytest

import flt_verify
from flt_verify.config import ToolkitConfig, load_config
from flt_verify.constants import DEFAULT_PRECISION_BITS, MAX_PRECISION_BITS


@pytest.fixture
def mock_env() -> Generator[None, None, None]:
    """Set up environment variables for tests"""
    with patch.dict(
        os.environ,
        {
            "FLT_VERIFY_PRECISION_BITS": "512",
            "FLT_VERIFY_JOBS": "3",
            "FLT_VERIFY_LOG_LEVEL": "debug",
        },
    ):
        yield


def test_version() -> None:
    """Test that the package exposes its version"""
    assert flt_verify.__version__ == "0.3.0"


def test_defaults() -> None:
    """Test configuration without arguments or environment"""
    config = load_config()
    assert config == ToolkitConfig()
    assert config.precision_bits == DEFAULT_PRECISION_BITS
    assert config.max_precision_bits == MAX_PRECISION_BITS
    assert config.jobs == 1
    assert config.log_level == "WARNING"


def test_env_fallback(mock_env: None) -> None:
    """Test that environment variables fill in missing arguments"""
    config = load_config()
    assert config.precision_bits == 512
    assert config.jobs == 3
    assert config.log_level == "DEBUG"


def test_arguments_override_env(mock_env: None) -> None:
    """Test that explicit arguments win over the environment"""
    config = load_config(precision_bits=128, jobs=2, log_level="error")
    assert config.precision_bits == 128
    assert config.jobs == 2
    assert config.log_level == "ERROR"


def test_invalid_settings() -> None:
    """Test validation of configuration values"""
    with pytest.raises(ValueError):
        load_config(precision_bits=16)
    with pytest.raises(ValueError):
        load_config(precision_bits=1024, max_precision_bits=512)
    with pytest.raises(ValueError):
        load_config(log_level="TRACE")
    with patch.dict(os.environ, {"FLT_VERIFY_JOBS": "many"}):
        with pytest.raises(ValueError, match="FLT_VERIFY_JOBS"):
            load_config()
