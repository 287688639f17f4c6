"""Offline backend serving recorded responses keyed by request digest.

A transcript is either a JSON file mapping digests to stored entries, or a
cache directory (same entry format, one file per digest).
"""
from __future__ import annotations

import difflib
import json
import threading
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple

from ..errors import ReplayMissError
from ..storage import atomic_write_text
from .messages import ChatRequest, ChatResponse, request_digest, stored_entry


class ReplayBackend:
    def __init__(self, entries: Dict[str, Dict[str, Any]], source: str = ""):
        self.entries = entries
        self.source = source
        self.calls = 0
        self._lock = threading.Lock()

    def send(self, req: ChatRequest, endpoint: Any = None) -> ChatResponse:
        with self._lock:
            self.calls += 1
        key = request_digest(req)
        entry = self.entries.get(key)
        if entry is None:
            raise ReplayMissError(key, self.nearest_digest(req))
        return ChatResponse.from_dict(entry["response"], cached=False)

    def nearest_digest(self, req: ChatRequest) -> Optional[str]:
        """Recorded digest whose request text is most similar to ``req``."""
        if not self.entries:
            return None
        wanted = json.dumps(req.to_dict(), sort_keys=True, ensure_ascii=False)

        def similarity(item: Tuple[str, Dict[str, Any]]) -> float:
            recorded = item[1].get("request")
            if recorded is None:
                return 0.0
            candidate = json.dumps(recorded, sort_keys=True, ensure_ascii=False)
            return difflib.SequenceMatcher(None, wanted, candidate, autojunk=False).quick_ratio()

        return max(sorted(self.entries.items()), key=similarity)[0]


def replay_backend(transcript_path: Path) -> ReplayBackend:
    path = Path(transcript_path)
    if path.is_dir():
        entries = {p.stem: json.loads(p.read_text(encoding="utf-8")) for p in sorted(path.glob("*.json"))}
    else:
        entries = json.loads(path.read_text(encoding="utf-8"))
    return ReplayBackend(entries, source=str(path))


def record_transcript(path: Path, pairs: Iterable[Tuple[ChatRequest, str]], merge: bool = True) -> int:
    """Write (request, response text) pairs as a replay transcript file."""
    path = Path(path)
    entries: Dict[str, Dict[str, Any]] = {}
    if merge and path.exists():
        entries = json.loads(path.read_text(encoding="utf-8"))
    for req, text in pairs:
        entries[request_digest(req)] = stored_entry(req, ChatResponse(text))
    atomic_write_text(path, json.dumps(entries, ensure_ascii=False, sort_keys=True, indent=1))
    return len(entries)
