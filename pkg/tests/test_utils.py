"""
Tests for report serialization and the error hierarchy
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict

from flt_verify.errors import CrossCheckError, DomainError, VerificationError
from flt_verify.utils import dumps_record, to_serializable


class Color(str, Enum):
    RED = "red"


class Inner(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    z: int
    a: Fraction


@dataclass
class Holder:
    name: str
    items: List[Any] = field(default_factory=list)
    _cache: Dict[str, int] = field(default_factory=dict)


def test_field_order_is_preserved() -> None:
    """Test that model keys follow the class definition"""
    assert list(to_serializable(Inner(z=1, a=Fraction(1, 3)))) == ["z", "a"]
    assert dumps_record(Inner(z=1, a=Fraction(1, 3))) == '{"z":1,"a":"1/3"}'


def test_nested_values() -> None:
    """Test dataclasses, enums, tuples, sets and private fields"""
    holder = Holder(name="x", items=[Color.RED, (1, Fraction(4, 2)), {3, 1}])
    assert to_serializable(holder) == {"name": "x", "items": ["red", [1, "2"], [1, 3]]}


def test_circular_reference() -> None:
    """Test that cycles are cut instead of recursing forever"""
    items: List[Any] = []
    items.append(items)
    assert to_serializable(items) == ["<circular reference>"]


def test_dumps_record_is_json() -> None:
    """Test that records parse back as JSON"""
    text = dumps_record({"key": 5, "ratio": Fraction(-7, 2)})
    assert json.loads(text) == {"key": 5, "ratio": "-7/2"}


def test_error_hierarchy() -> None:
    """Test error classes and stage prefixes"""
    error = CrossCheckError("mismatch", stage="genus")
    assert str(error) == "[genus] mismatch"
    assert error.stage == "genus"
    assert isinstance(error, (VerificationError, AssertionError))
    assert isinstance(DomainError("bad"), ValueError)
    assert str(CrossCheckError("plain")) == "plain"
