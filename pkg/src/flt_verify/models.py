"""
Persistent record and request models shared by the CLI and the scan runner
"""

from datetime import datetime, timezone
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, Field

from .__version__ import __version__
from .constants import SCHEMA_VERSION
from .utils import to_serializable

ScanKind = Literal["genus", "abc", "compcrit", "kraus", "compare"]
SCAN_KINDS = ("genus", "abc", "compcrit", "kraus", "compare")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class ScanRecord(BaseModel):
    """One JSON line of scan or command output"""

    schema_version: int = Field(SCHEMA_VERSION, description="Output schema version")
    toolkit_version: str = Field(__version__, description="flt-verify version that produced the record")
    kind: str = Field(..., description="Report kind: genus, abc, compcrit, kraus, compare, dio, cubic, ...")
    key: int = Field(..., description="d, D, l or n the record is about")
    payload: Optional[Dict[str, Any]] = Field(None, description="Serialized report")
    error: Optional[str] = Field(None, description="Error message when the item failed")
    error_kind: Optional[str] = Field(None, description="Exception class of the failure")
    timestamp: str = Field(default_factory=_now, description="UTC time the record was written")

    @classmethod
    def of(cls, kind: str, key: int, report: Any) -> "ScanRecord":
        return cls(kind=kind, key=key, payload=to_serializable(report))

    @classmethod
    def failed(cls, kind: str, key: int, error: Exception) -> "ScanRecord":
        return cls(kind=kind, key=key, error=str(error), error_kind=type(error).__name__)

    def deterministic_view(self) -> Dict[str, Any]:
        """Everything but the timestamp."""
        return self.model_dump(exclude={"timestamp"})


class ScanRequest(BaseModel):
    """Parameters of a range scan"""

    what: ScanKind = Field(..., description="Which report to compute per key")
    dmax: int = Field(0, description="Upper bound on d (or D for genus scans)")
    lmax: int = Field(0, description="Upper bound on l for kraus scans")
    r1max: int = Field(40, description="Enumeration bound on r1 for kraus scans")
    out: str = Field(..., description="JSON-lines output file")
    jobs: int = Field(1, description="Worker threads; each writes its own segment file")
    resume: bool = Field(False, description="Continue after the last key recorded in the cursor file")


class ScanSummary(BaseModel):
    """Counts printed after a scan"""

    what: ScanKind
    out: str
    records: int = Field(0, description="Records written by this run")
    errors: int = Field(0, description="Records carrying an error")
    cross_check_failures: int = Field(0, description="Records whose error is a cross-check disagreement")
    skipped: int = Field(0, description="Keys skipped because the cursor was already past them")
    counts: Dict[str, int] = Field(default_factory=dict, description="Kind-specific tallies")
