import logging
import math
import os
from typing import Dict, List, Sequence

from core.errors import ScenarioError

# Configure logging
logger = logging.getLogger(__name__)

THREADS_ENV = "SWARMWAVE_THREADS"

TRACE_FORMATS = ("csv", "json", "svg")


def format_float(value: float) -> str:
    """Shortest decimal that reads back to the same double"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    return repr(float(value))


def parse_overrides(pairs: Sequence[str]) -> Dict[str, str]:
    """--set key=value pairs, later pairs winning"""
    overrides: Dict[str, str] = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ScenarioError(pair, "expected key=value")
        overrides[key] = value.strip()
    return overrides


def parse_formats(raw: str) -> List[str]:
    formats = [f.strip().lower() for f in raw.split(",") if f.strip()]
    unknown = [f for f in formats if f not in TRACE_FORMATS]
    if unknown:
        raise ValueError(f"unknown trace format(s) {unknown}; expected a subset of {list(TRACE_FORMATS)}")
    return formats


def thread_hint() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning(f"Ignoring {THREADS_ENV}={raw!r}; expected an integer")
        return 1


def parse_setting(key: str, raw: str):
    """Typed value for a `config --set key=value` pair; raises ValueError"""
    if key in ("audit_every", "frames_every"):
        value = int(raw)
        if value < 1:
            raise ValueError(f"{key} must be positive, got {value}")
        return value
    if key == "formats":
        return parse_formats(raw)
    if key == "theme" and raw not in ("light", "dark"):
        raise ValueError(f"theme must be 'light' or 'dark', got {raw!r}")
    return raw
