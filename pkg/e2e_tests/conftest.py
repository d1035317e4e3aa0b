"""
Test fixtures for e2e tests
"""

import io
import json
import os
from contextlib import redirect_stderr, redirect_stdout
from dataclasses import dataclass
from typing import Any, Dict, Generator, List, Sequence
from unittest.mock import patch

import pytest

from flt_verify.__main__ import main


@dataclass
class CliResult:
    exit_code: int
    stdout: str
    stderr: str

    @property
    def records(self) -> List[Dict[str, Any]]:
        """JSON lines printed on stdout"""
        return [json.loads(line) for line in self.stdout.splitlines() if line.strip()]


class CliRunner:
    """Runs flt-verify in-process and captures its streams and exit code"""

    def invoke(self, argv: Sequence[str]) -> CliResult:
        out, err = io.StringIO(), io.StringIO()
        code = 0
        with redirect_stdout(out), redirect_stderr(err):
            try:
                main(list(argv))
            except SystemExit as e:
                code = e.code if isinstance(e.code, int) else 1
        return CliResult(exit_code=code, stdout=out.getvalue(), stderr=err.getvalue())


@pytest.fixture(autouse=True)
def clean_env() -> Generator[None, None, None]:
    """Drop FLT_VERIFY_* settings from the environment"""
    env = {k: v for k, v in os.environ.items() if not k.startswith("FLT_VERIFY_")}
    with patch.dict(os.environ, env, clear=True):
        yield


@pytest.fixture(scope="session")
def cli() -> CliRunner:
    """Initialize a runner for the command-line front end"""
    return CliRunner()
