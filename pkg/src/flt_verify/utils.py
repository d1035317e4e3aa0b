"""
Utility functions for flt-verify
"""

import dataclasses
import json
from enum import Enum
from fractions import Fraction
from typing import Any, Optional, Set

from pydantic import BaseModel


def to_serializable(
    obj: Any, visited: Optional[Set[int]] = None, max_depth: int = 32, current_depth: int = 0
) -> Any:
    """
    Recursively convert a report object to JSON-serializable form with cycle detection.

    Pydantic models and dataclasses keep their field order, so the output key order is
    fixed by the class definition.

    Args:
        obj: Object to serialize
        visited: Set of object IDs already visited (for cycle detection)
        max_depth: Maximum recursion depth
        current_depth: Current recursion depth

    Returns:
        JSON-serializable representation of the object
    """
    if visited is None:
        visited = set()

    if current_depth > max_depth:
        return str(obj)

    obj_id = id(obj)
    if obj_id in visited:
        return "<circular reference>"

    if obj is None or isinstance(obj, (str, bool)):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, int):
        return int(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        # exact, and unambiguous for integers too
        return str(obj)

    visited.add(obj_id)
    try:
        if isinstance(obj, BaseModel):
            return {
                name: to_serializable(getattr(obj, name), visited, max_depth, current_depth + 1)
                for name in type(obj).model_fields
            }
        if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return {
                f.name: to_serializable(getattr(obj, f.name), visited, max_depth, current_depth + 1)
                for f in dataclasses.fields(obj)
                if not f.name.startswith("_")
            }
        if isinstance(obj, dict):
            return {
                str(k): to_serializable(v, visited, max_depth, current_depth + 1)
                for k, v in obj.items()
            }
        if isinstance(obj, (list, tuple)):
            return [to_serializable(item, visited, max_depth, current_depth + 1) for item in obj]
        if isinstance(obj, (set, frozenset)):
            items = [to_serializable(item, visited, max_depth, current_depth + 1) for item in obj]
            return sorted(items, key=lambda item: json.dumps(item, sort_keys=True))
    finally:
        visited.discard(obj_id)

    if hasattr(obj, "numerator") and hasattr(obj, "denominator"):
        # gmpy2 mpz/mpq leak through some kernels
        value = Fraction(int(obj.numerator), int(obj.denominator))
        return value.numerator if value.denominator == 1 else str(value)
    return str(obj)


def dumps_record(obj: Any) -> str:
    """Serialize to one compact JSON line with field order preserved"""
    return json.dumps(to_serializable(obj), ensure_ascii=False, separators=(",", ":"))
