"""
Exception hierarchy for verification failures
"""

from typing import Optional


class VerificationError(Exception):
    """Base class for all toolkit errors"""


class DomainError(VerificationError, ValueError):
    """An input violates a documented precondition"""


class UnsupportedError(VerificationError):
    """A performance envelope was exceeded"""


class PrecisionExhaustedError(VerificationError):
    """An enclosure still straddles its threshold at the maximum precision"""


class CrossCheckError(VerificationError, AssertionError):
    """Two independent computations disagree, or an asserted lemma failed"""

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(f"[{stage}] {message}" if stage else message)
        self.stage = stage
