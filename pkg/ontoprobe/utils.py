"""
Utility functions for Ontoprobe
"""
import json
import os
import platform
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterator, TextIO, Union

from loguru import logger

# Track start time for run metadata
START_TIME = datetime.now()


def write_json(path: Union[str, Path], data: Any) -> None:
    """Write JSON with sorted keys and a trailing newline so reruns are byte-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def append_line(handle: TextIO, line: str) -> None:
    """Append one record and force it to disk."""
    handle.write(line.rstrip("\n") + "\n")
    handle.flush()
    os.fsync(handle.fileno())


def drop_torn_tail(path: Union[str, Path]) -> int:
    """
    Make a JSONL file end on a line break before appending to it.

    A final line that is valid JSON only gets its missing newline; anything
    else after the last newline is cut off. Returns the number of bytes removed.
    """
    path = Path(path)
    if not path.exists():
        return 0
    data = path.read_bytes()
    if not data or data.endswith(b"\n"):
        return 0
    keep = data.rfind(b"\n") + 1
    try:
        json.loads(data[keep:])
    except (json.JSONDecodeError, UnicodeDecodeError):
        pass
    else:
        with open(path, "ab") as f:
            f.write(b"\n")
        return 0
    with open(path, "r+b") as f:
        f.truncate(keep)
    logger.warning(f"Removed an incomplete last line ({len(data) - keep} bytes) from {path}")
    return len(data) - keep


def iter_json_lines(path: Union[str, Path]) -> Iterator[Dict[str, Any]]:
    """Yield JSON objects from a JSONL file; a torn final line is skipped."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError:
            if number == len(lines):
                logger.warning(f"Ignoring incomplete last line of {path}")
                continue
            raise


def host_description() -> Dict[str, Any]:
    return {
        "platform": platform.platform(),
        "machine": platform.machine(),
        "processor": platform.processor() or "unknown",
        "python": platform.python_version(),
        "cpus": os.cpu_count() or 1,
    }


def format_elapsed(since: datetime = START_TIME) -> str:
    seconds = int((datetime.now() - since).total_seconds())
    hours, rest = divmod(seconds, 3600)
    minutes, seconds = divmod(rest, 60)
    return f"{hours}h {minutes}m {seconds}s" if hours else f"{minutes}m {seconds}s"
