"""
Shared fixtures for unit tests
"""

import os
from typing import Generator
from unittest.mock import patch

import pytest


@pytest.fixture(autouse=True)
def clean_env() -> Generator[None, None, None]:
    """Drop FLT_VERIFY_* settings from the environment"""
    env = {k: v for k, v in os.environ.items() if not k.startswith("FLT_VERIFY_")}
    with patch.dict(os.environ, env, clear=True):
        yield
