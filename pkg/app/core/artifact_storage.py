"""
Storage for JSON artifacts (reports, certificates, matrices, samples).

All writes funnel through one lock so concurrent producers never interleave a file.
"""
import logging
from pathlib import Path
from threading import Lock
from typing import Any, Optional

import orjson

logger = logging.getLogger(__name__)

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2

_write_lock = Lock()


def dumps(payload: Any) -> bytes:
    """Canonical JSON bytes: sorted keys, two-space indent, trailing newline."""
    return orjson.dumps(payload, option=JSON_OPTIONS) + b"\n"


def write_artifact(path: str, payload: Any) -> bool:
    """
    Write one JSON artifact.

    Args:
        path: Target file; parent directories are created
        payload: JSON-serializable document

    Returns:
        True if written, False otherwise
    """
    data = dumps(payload)
    try:
        with _write_lock:
            target = Path(path)
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(data)
            logger.debug(f"[ArtifactStorage] Wrote {target}, size={len(data)}")
        return True
    except OSError as e:
        logger.error(f"[ArtifactStorage] Error writing {path}: {e}", exc_info=True)
        return False


def read_artifact(path: str) -> Optional[Any]:
    """Parsed JSON content of an artifact, or None if it cannot be read."""
    try:
        return orjson.loads(Path(path).read_bytes())
    except (OSError, orjson.JSONDecodeError) as e:
        logger.error(f"[ArtifactStorage] Error reading {path}: {e}", exc_info=True)
        return None
