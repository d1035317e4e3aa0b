"""
Test utilities
"""

import asyncio
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

from .conftest import CliResult, CliRunner


def read_jsonl(path: "str | Path") -> List[Dict[str, Any]]:
    """Parse a JSON-lines file written by a scan"""
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def deterministic(records: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    """Records without their timestamps"""
    return [{k: v for k, v in record.items() if k != "timestamp"} for record in records]


async def invoke_with_timeout(runner: CliRunner, argv: Sequence[str], timeout: int = 600) -> CliResult:
    """Run a command in a worker thread, failing if it exceeds the timeout"""
    return await asyncio.wait_for(asyncio.to_thread(runner.invoke, argv), timeout=timeout)
