"""
JSON reports.

Every report carries the config digest, build identifier and master seed.
Run-dependent timing lives under ``timing`` so the rest of the document is
byte-identical across single-threaded reruns.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ..config import ReportConstants, build_identifier

logger = logging.getLogger(__name__)

# payload fields moved under "timing"
TIMING_FIELDS = ("wall_clock_seconds", "diagnostics", "seconds")


def to_jsonable(obj):
    """Convert dataclasses, numpy values, paths and tuples into plain JSON types."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else None
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, Path):
        return str(obj)
    return str(obj)


def canonical_json(data) -> str:
    return json.dumps(to_jsonable(data), sort_keys=True, separators=(",", ":"))


def config_digest(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def build_report(
    kind: str,
    payload: dict,
    config: dict,
    seed: int | None,
    started_at: datetime | None = None,
    wall_clock_seconds: float | None = None,
) -> dict:
    result = to_jsonable(payload)
    timing = {name: result.pop(name) for name in TIMING_FIELDS if name in result}
    timing["started_at"] = (started_at or datetime.now(timezone.utc)).isoformat()
    if wall_clock_seconds is not None:
        timing["wall_clock_seconds"] = wall_clock_seconds
    return {
        "report_kind": kind,
        "format_version": ReportConstants.REPORT_FORMAT_VERSION,
        "build_id": build_identifier(),
        "config_digest": config_digest(config),
        "master_seed": seed,
        "config": to_jsonable(config),
        "result": result,
        "timing": timing,
    }


def write_report(report: dict, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {report['report_kind']} report to {path}")
    return path
