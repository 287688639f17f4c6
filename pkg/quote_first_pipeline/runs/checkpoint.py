"""Append-only progress files that let batch stages resume where they stopped."""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence

from ..errors import DataError
from ..storage import append_jsonl, atomic_write_text, dumps_jsonl, read_jsonl, write_jsonl

logger = logging.getLogger(__name__)

PROGRESS_SUFFIX = ".progress"


def read_progress(path: Path) -> List[Dict[str, Any]]:
    """Rows of a progress file. A truncated last line (killed mid-append) is dropped and the file repaired."""
    if not path.exists():
        return []
    lines = path.read_text(encoding="utf-8").splitlines()
    rows: List[Dict[str, Any]] = []
    for number, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rows.append(json.loads(line))
        except json.JSONDecodeError as exc:
            if number < len(lines):
                raise DataError(f"{path}: line {number} is not valid JSON ({exc.msg})") from exc
            logger.warning("Dropping truncated last line of %s: %s", path.name, exc.msg)
            atomic_write_text(path, dumps_jsonl(rows))
    return rows


class JsonlCheckpoint:
    """Rows land in ``<output>.progress`` as they complete; ``finalize`` writes them in input order.

    Rows already in the finalized output count as done, so a finished stage
    rerun against the same output does no work.
    """

    def __init__(self, output: Path, key: str = "id"):
        self.output = output
        self.progress = output.with_name(output.name + PROGRESS_SUFFIX)
        self.key = key
        self.rows: Dict[str, Dict[str, Any]] = {}
        for row in read_jsonl(self.output) + read_progress(self.progress):
            self.rows[row[key]] = row
        if self.rows:
            logger.info("Checkpoint %s: %d rows already complete", output.name, len(self.rows))

    def done(self, ids: Sequence[str]) -> List[str]:
        return [i for i in ids if i in self.rows]

    def pending(self, ids: Sequence[str]) -> List[str]:
        return [i for i in ids if i not in self.rows]

    def record(self, row: Dict[str, Any]) -> None:
        self.rows[row[self.key]] = row
        append_jsonl(self.progress, row)

    def finalize(self, order: Sequence[str]) -> int:
        count = write_jsonl(self.output, [self.rows[i] for i in order if i in self.rows])
        if self.progress.exists():
            self.progress.unlink()
        return count
