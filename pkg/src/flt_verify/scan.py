"""
Range scans written as JSON lines, resumable through a cursor side-file
"""

import asyncio
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional

from pydantic import BaseModel, Field

from .arith.integers import is_prime, is_squarefree
from .constants import ELL_MODULUS, ELL_RESIDUE, MAX_FORM_DISCRIMINANT
from .errors import CrossCheckError, DomainError, VerificationError
from .formclass import class_group, conditions_abc_direct, two_rank
from .genus import classify_conditions, compare_sets, is_fundamental, two_ranks
from .models import ScanRecord, ScanRequest, ScanSummary
from .sunit import KrausStatus, kraus_verify
from .unitsq import compcrit_test
from .utils import dumps_record

logger = logging.getLogger(__name__)

# keys merged into the output per round
BATCH_SIZE = 256


class GenusCheck(BaseModel):
    """2-rank of the narrow class group by genus theory and by form enumeration"""

    D: int = Field(..., description="Fundamental discriminant")
    genus_rank: int = Field(..., description="t - 1")
    form_rank: int = Field(..., description="2-rank of the enumerated form class group")
    h_plus: int = Field(..., description="Narrow class number")


class AbcCheck(BaseModel):
    """Conditions (a)(b)(c) by genus theory next to the direct form-class evaluation"""

    d: int
    all_hold: bool = Field(..., description="(a), (b) and (c) all hold")
    genus: Dict[str, Any] = Field(..., description="Genus-theory report")
    direct: Dict[str, Any] = Field(..., description="Form class group evaluation")


def genus_item(D: int) -> GenusCheck:
    rank_plus, _ = two_ranks(D)
    group = class_group(D)
    form_rank = two_rank(group)
    if form_rank != rank_plus:
        raise CrossCheckError(f"D = {D}: genus 2-rank {rank_plus}, forms give {form_rank}", stage="genus")
    return GenusCheck(D=D, genus_rank=rank_plus, form_rank=form_rank, h_plus=group.h_plus)


def abc_item(d: int) -> AbcCheck:
    report = classify_conditions(d)
    direct = conditions_abc_direct(d)
    theirs = (direct.cond_a, direct.cond_b, direct.cond_c)
    ours = (report.cond_a, report.cond_b, report.cond_c)
    if ours != theirs:
        raise CrossCheckError(f"d = {d}: genus gives {ours}, forms give {theirs}", stage="abc")
    return AbcCheck(
        d=d,
        all_hold=report.all_hold,
        genus=report.model_dump(mode="json"),
        direct=direct.model_dump(mode="json"),
    )


def scan_keys(request: ScanRequest) -> List[int]:
    """Keys a scan visits, in increasing order."""
    what = request.what
    if what == "genus":
        if request.dmax >= MAX_FORM_DISCRIMINANT:
            logger.warning("D above %d will be recorded as unsupported", MAX_FORM_DISCRIMINANT)
        return [D for D in range(5, request.dmax + 1) if is_fundamental(D)]
    if what == "abc":
        return [d for d in range(2, request.dmax + 1) if d % 4 != 1 and is_squarefree(d)]
    if what == "compcrit":
        return [d for d in range(2, request.dmax + 1) if d % 8 != 1 and is_squarefree(d)]
    if what == "kraus":
        return [
            ell
            for ell in range(ELL_RESIDUE, request.lmax + 1, ELL_MODULUS)
            if is_prime(ell)
        ]
    if what == "compare":
        return [request.dmax] if request.dmax >= 2 else []
    raise DomainError(f"unknown scan kind {what!r}")


def _compute(request: ScanRequest) -> Callable[[int], Any]:
    if request.what == "genus":
        return genus_item
    if request.what == "abc":
        return abc_item
    if request.what == "compcrit":
        return compcrit_test
    if request.what == "kraus":
        return lambda ell: kraus_verify(ell, request.r1max)
    return compare_sets


def scan_item(request: ScanRequest, key: int) -> ScanRecord:
    """Compute one record; toolkit errors become error records."""
    try:
        report = _compute(request)(key)
    except VerificationError as e:
        logger.warning("%s %d: %s", request.what, key, e)
        return ScanRecord.failed(request.what, key, e)
    logger.debug("%s %d done", request.what, key)
    return ScanRecord.of(request.what, key, report)


def cursor_path(out: str) -> Path:
    return Path(f"{out}.cursor")


def part_path(out: str, index: int) -> Path:
    return Path(f"{out}.part{index}")


class ScanCursor(BaseModel):
    """Progress saved after each merged batch"""

    what: str = Field(..., description="Scan kind that wrote the cursor")
    last_key: int = Field(..., description="Last key merged into the output")
    size: int = Field(..., description="Byte length of the output after that merge")


def read_cursor(request: ScanRequest) -> Optional[ScanCursor]:
    """Cursor of an earlier run of the same scan, or None."""
    path = cursor_path(request.out)
    if not path.exists():
        return None
    cursor = ScanCursor(**json.loads(path.read_text(encoding="utf-8")))
    if cursor.what != request.what:
        raise DomainError(f"cursor {path} belongs to a {cursor.what!r} scan")
    return cursor


def _rewind(request: ScanRequest, cursor: ScanCursor) -> None:
    """Drop output written after the cursor, e.g. a batch merged just before a crash."""
    out = Path(request.out)
    size = out.stat().st_size if out.exists() else 0
    if size < cursor.size:
        raise DomainError(f"{out} holds {size} bytes but its cursor records {cursor.size}")
    if size > cursor.size:
        logger.warning("discarding %d bytes written after the cursor", size - cursor.size)
        os.truncate(out, cursor.size)


def _write_cursor(request: ScanRequest, last_key: int, size: int) -> None:
    path = cursor_path(request.out)
    tmp = path.with_suffix(".cursor.tmp")
    cursor = ScanCursor(what=request.what, last_key=last_key, size=size)
    tmp.write_text(cursor.model_dump_json(), encoding="utf-8")
    os.replace(tmp, path)


def _shard(keys: List[int], jobs: int) -> List[List[int]]:
    jobs = max(1, min(jobs, len(keys)))
    step = -(-len(keys) // jobs)
    return [keys[i : i + step] for i in range(0, len(keys), step)]


def _run_shard(request: ScanRequest, index: int, keys: Iterable[int]) -> List[ScanRecord]:
    records = []
    with open(part_path(request.out, index), "w", encoding="utf-8") as handle:
        for key in keys:
            record = scan_item(request, key)
            handle.write(dumps_record(record) + "\n")
            records.append(record)
    return records


def _merge(request: ScanRequest, parts: int) -> int:
    """Append the segment files to the output; returns the new output size."""
    with open(request.out, "ab") as out:
        for index in range(parts):
            path = part_path(request.out, index)
            out.write(path.read_bytes())
            path.unlink()
        return out.tell()


def _tally(summary: ScanSummary, request: ScanRequest, record: ScanRecord) -> None:
    summary.records += 1
    if record.error is not None:
        summary.errors += 1
        if record.error_kind == CrossCheckError.__name__:
            summary.cross_check_failures += 1
        return
    payload = record.payload or {}
    if request.what == "abc" and payload.get("all_hold"):
        summary.counts["all_hold"] = summary.counts.get("all_hold", 0) + 1
    elif request.what == "compcrit" and payload.get("all_squares"):
        summary.counts["all_squares"] = summary.counts.get("all_squares", 0) + 1
    elif request.what == "kraus":
        status = payload.get("status", "")
        summary.counts[status] = summary.counts.get(status, 0) + 1
        if status == KrausStatus.EXCEPTIONAL_ORBIT.value:
            summary.counts.setdefault("exceptional_ell", record.key)


class ScanRunner:
    """Runs a scan in batches; each batch is sharded over worker threads and merged by one writer."""

    def __init__(self, request: ScanRequest):
        self.request = request

    async def run(self) -> ScanSummary:
        request = self.request
        summary = ScanSummary(what=request.what, out=request.out)
        keys = scan_keys(request)
        cursor = read_cursor(request) if request.resume else None
        if cursor is not None:
            _rewind(request, cursor)
            before = len(keys)
            keys = [k for k in keys if k > cursor.last_key]
            summary.skipped = before - len(keys)
            logger.info("resuming %s scan after key %d", request.what, cursor.last_key)
        else:
            Path(request.out).write_text("", encoding="utf-8")
            cursor_path(request.out).unlink(missing_ok=True)

        logger.info("%s scan over %d keys with %d jobs", request.what, len(keys), request.jobs)
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=request.jobs) as pool:
            for start in range(0, len(keys), BATCH_SIZE):
                batch = keys[start : start + BATCH_SIZE]
                shards = _shard(batch, request.jobs)
                results = await asyncio.gather(
                    *(loop.run_in_executor(pool, _run_shard, request, i, shard) for i, shard in enumerate(shards))
                )
                size = _merge(request, len(shards))
                _write_cursor(request, batch[-1], size)
                for records in results:
                    for record in records:
                        _tally(summary, request, record)
        logger.info("%s scan wrote %d records (%d errors)", request.what, summary.records, summary.errors)
        return summary


def run_scan(request: ScanRequest) -> ScanSummary:
    return asyncio.run(ScanRunner(request).run())
