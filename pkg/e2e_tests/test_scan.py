"""
E2E tests for resumable range scans
"""

import json
from pathlib import Path

import pytest

from flt_verify import scan
from flt_verify.errors import CrossCheckError, DomainError, UnsupportedError
from flt_verify.genus import is_fundamental
from flt_verify.models import ScanRequest
from flt_verify.scan import GenusCheck, ScanRunner, cursor_path, part_path, scan_keys
from flt_verify.sunit import KrausStatus

from .utils import deterministic, read_jsonl


def request(tmp_path: Path, name: str = "out.jsonl", **kwargs: object) -> ScanRequest:
    return ScanRequest(out=str(tmp_path / name), **kwargs)


@pytest.mark.asyncio(loop_scope="session")
async def test_genus_scan(tmp_path: Path) -> None:
    """Test that genus theory and form enumeration agree on every D up to 400"""
    req = request(tmp_path, what="genus", dmax=400)
    summary = await ScanRunner(req).run()
    expected = [D for D in range(5, 401) if is_fundamental(D)]
    records = read_jsonl(req.out)
    assert [r["key"] for r in records] == expected
    assert summary.records == len(expected)
    assert summary.errors == 0
    assert all(r["payload"]["genus_rank"] == r["payload"]["form_rank"] for r in records)
    assert json.loads(cursor_path(req.out).read_text(encoding="utf-8")) == {
        "what": "genus",
        "last_key": expected[-1],
        "size": Path(req.out).stat().st_size,
    }
    assert not part_path(req.out, 0).exists()


@pytest.mark.asyncio(loop_scope="session")
async def test_jobs_do_not_change_output(tmp_path: Path) -> None:
    """Test that sharding over threads keeps the serial output order"""
    serial = request(tmp_path, "serial.jsonl", what="compcrit", dmax=120)
    sharded = request(tmp_path, "sharded.jsonl", what="compcrit", dmax=120, jobs=4)
    await ScanRunner(serial).run()
    summary = await ScanRunner(sharded).run()
    assert deterministic(read_jsonl(serial.out)) == deterministic(read_jsonl(sharded.out))
    assert summary.counts.get("all_squares", 0) > 0


@pytest.mark.asyncio(loop_scope="session")
async def test_resume(tmp_path: Path) -> None:
    """Test that a resumed scan appends only the keys past the cursor"""
    first = request(tmp_path, "abc.jsonl", what="abc", dmax=60)
    await ScanRunner(first).run()
    resumed = request(tmp_path, "abc.jsonl", what="abc", dmax=120, resume=True)
    summary = await ScanRunner(resumed).run()
    assert summary.skipped == len(scan_keys(first))
    assert summary.records == len(scan_keys(resumed)) - len(scan_keys(first))

    fresh = request(tmp_path, "fresh.jsonl", what="abc", dmax=120)
    await ScanRunner(fresh).run()
    assert deterministic(read_jsonl(resumed.out)) == deterministic(read_jsonl(fresh.out))


@pytest.mark.asyncio(loop_scope="session")
async def test_resume_without_cursor(tmp_path: Path) -> None:
    """Test that resuming with no cursor starts from the beginning"""
    req = request(tmp_path, what="abc", dmax=20, resume=True)
    summary = await ScanRunner(req).run()
    assert summary.skipped == 0
    assert summary.records == len(scan_keys(req))


@pytest.mark.asyncio(loop_scope="session")
async def test_fresh_run_truncates(tmp_path: Path) -> None:
    """Test that a run without resume replaces earlier output"""
    req = request(tmp_path, what="abc", dmax=20)
    await ScanRunner(req).run()
    await ScanRunner(req).run()
    assert len(read_jsonl(req.out)) == len(scan_keys(req))


@pytest.mark.asyncio(loop_scope="session")
async def test_empty_range(tmp_path: Path) -> None:
    """Test scans whose range holds no keys"""
    req = request(tmp_path, what="compare", dmax=1)
    summary = await ScanRunner(req).run()
    assert summary.records == 0
    assert read_jsonl(req.out) == []
    assert not cursor_path(req.out).exists()


@pytest.mark.asyncio(loop_scope="session")
async def test_failed_items_become_error_records(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that per-item failures are recorded and the scan continues"""
    real = scan.genus_item

    def flaky(D: int) -> GenusCheck:
        if D == 12:
            raise CrossCheckError("forced mismatch", stage="genus")
        if D == 13:
            raise UnsupportedError("forced envelope")
        return real(D)

    monkeypatch.setattr(scan, "genus_item", flaky)
    req = request(tmp_path, what="genus", dmax=40)
    summary = await ScanRunner(req).run()
    records = {r["key"]: r for r in read_jsonl(req.out)}
    assert records[12]["error_kind"] == "CrossCheckError"
    assert records[12]["error"] == "[genus] forced mismatch"
    assert records[13]["error_kind"] == "UnsupportedError"
    assert records[13]["payload"] is None
    assert records[40]["error"] is None
    assert summary.errors == 2
    assert summary.cross_check_failures == 1


@pytest.mark.asyncio(loop_scope="session")
async def test_resume_after_crash_between_merge_and_cursor(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    """Test that a batch merged but not yet recorded in the cursor is written once"""
    monkeypatch.setattr(scan, "BATCH_SIZE", 5)
    real = scan._write_cursor
    calls = []

    def dies_on_second(req: ScanRequest, last_key: int, size: int) -> None:
        calls.append(last_key)
        if len(calls) == 2:
            raise OSError("killed")
        real(req, last_key, size)

    monkeypatch.setattr(scan, "_write_cursor", dies_on_second)
    crashed = request(tmp_path, "abc.jsonl", what="abc", dmax=40, jobs=2)
    with pytest.raises(OSError):
        await ScanRunner(crashed).run()

    resumed = request(tmp_path, "abc.jsonl", what="abc", dmax=40, jobs=2, resume=True)
    summary = await ScanRunner(resumed).run()
    keys = [r["key"] for r in read_jsonl(resumed.out)]
    assert len(keys) == len(set(keys))
    assert keys == scan_keys(resumed)
    assert summary.skipped == 5


@pytest.mark.asyncio(loop_scope="session")
async def test_resume_rejects_output_shorter_than_cursor(tmp_path: Path) -> None:
    """Test that resuming over a truncated output file fails instead of losing records"""
    req = request(tmp_path, what="abc", dmax=20)
    await ScanRunner(req).run()
    Path(req.out).write_text("", encoding="utf-8")
    with pytest.raises(DomainError):
        await ScanRunner(request(tmp_path, what="abc", dmax=40, resume=True)).run()


@pytest.mark.slow
@pytest.mark.asyncio(loop_scope="session")
async def test_kraus_scan(tmp_path: Path) -> None:
    """Test that l = 73 is the only prime up to 400 with an exceptional orbit"""
    req = request(tmp_path, what="kraus", lmax=400, r1max=40)
    summary = await ScanRunner(req).run()
    records = {r["key"]: r["payload"] for r in read_jsonl(req.out)}
    assert sorted(records) == [73, 97, 193, 241, 313, 337]
    assert records[73]["status"] == KrausStatus.EXCEPTIONAL_ORBIT.value
    assert all(p["status"] == KrausStatus.NO_EXCEPTIONAL.value for k, p in records.items() if k != 73)
    assert summary.counts["exceptional_ell"] == 73


@pytest.mark.slow
@pytest.mark.asyncio(loop_scope="session")
async def test_compare_counts(tmp_path: Path) -> None:
    """Test the nested criterion counts over d <= 1000"""
    req = request(tmp_path, what="compare", dmax=1000)
    await ScanRunner(req).run()
    (record,) = read_jsonl(req.out)
    counts = record["payload"]
    assert counts["h_plus_odd"] == 1
    assert counts["h_plus_odd"] <= counts["b_and_h_odd"] <= counts["b_holds"] <= counts["total"]


@pytest.mark.slow
@pytest.mark.asyncio(loop_scope="session")
async def test_abc_scan_acceptance(tmp_path: Path) -> None:
    """Test that genus theory and forms agree on every ramified d up to 5000"""
    req = request(tmp_path, what="abc", dmax=5000, jobs=4)
    summary = await ScanRunner(req).run()
    assert summary.errors == 0
    assert summary.records == len(scan_keys(req))
