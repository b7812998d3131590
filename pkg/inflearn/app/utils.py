# inflearn/app/utils.py
from __future__ import annotations

import hashlib
import json
import math
from typing import Any, Dict, Union

_INF_WORDS = {"inf", "infinity", "∞", "omega"}


def parse_count(v: Any) -> Union[int, float]:
    """
    - naturals stay ints
    - 'inf' / 'infinity' / '∞' / 'omega' (any case) and float('inf') become math.inf
    """
    if isinstance(v, bool):
        raise ValueError(f"not a count: {v!r}")
    if isinstance(v, int):
        if v < 0:
            raise ValueError(f"counts are naturals, got {v}")
        return v
    if isinstance(v, float):
        if v == math.inf:
            return math.inf
        if v.is_integer() and v >= 0:
            return int(v)
        raise ValueError(f"not a count: {v!r}")
    if isinstance(v, str):
        s = v.strip().lower()
        if s in _INF_WORDS:
            return math.inf
        if s.isdigit():
            return int(s)
    raise ValueError(f"not a count: {v!r}")


def _jsonable(v: Any) -> Any:
    if isinstance(v, float) and v == math.inf:
        return "inf"
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def canonical_json(d: Dict[str, Any]) -> str:
    return json.dumps(_jsonable(d), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def config_hash(d: Dict[str, Any]) -> str:
    """First 16 hex digits of sha256 over the sorted-key JSON of d."""
    raw = json.dumps(_jsonable(d), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(raw.encode("utf-8")).hexdigest()[:16]


def package_version() -> str:
    from inflearn import __version__
    return __version__
