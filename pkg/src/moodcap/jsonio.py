"""JSONL helpers used by every stage that persists per-clip records."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator


class JsonlError(ValueError):
    """Malformed JSONL input, carrying the offending line number."""

    def __init__(self, path: str | Path, line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.line_no = line_no


def dump_jsonl(objects: Iterable[dict[str, Any]], path: str | Path) -> None:
    """Write one compact JSON object per line, atomically."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            for obj in objects:
                fh.write(json.dumps(obj, ensure_ascii=False))
                fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_jsonl(path: str | Path) -> Iterator[dict[str, Any]]:
    """Yield one dict per line; blank lines rejected, errors carry line numbers."""
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                raise JsonlError(path, line_no, "blank line")
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise JsonlError(path, line_no, f"invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise JsonlError(path, line_no, "expected a JSON object")
            yield obj
