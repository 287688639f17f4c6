"""Content-addressed on-disk response cache: one JSON file per request digest."""
from __future__ import annotations

import json
import logging
import threading
from pathlib import Path
from typing import Any, Dict, Optional

from ..storage import atomic_write_text
from .messages import ChatRequest, ChatResponse, request_digest, stored_entry

logger = logging.getLogger(__name__)


class ResponseCache:
    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self._locks: Dict[str, threading.RLock] = {}
        self._locks_guard = threading.Lock()

    def lock_for(self, req: ChatRequest) -> threading.RLock:
        """One re-entrant lock per request digest; holders see a consistent get-then-put."""
        key = request_digest(req)
        with self._locks_guard:
            return self._locks.setdefault(key, threading.RLock())

    def path_for(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, req: ChatRequest) -> Optional[ChatResponse]:
        path = self.path_for(request_digest(req))
        if not path.exists():
            return None
        try:
            entry: Dict[str, Any] = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            logger.warning("Ignoring unreadable cache entry %s: %s", path.name, exc)
            return None
        return ChatResponse.from_dict(entry["response"], cached=True)

    def put(self, req: ChatRequest, resp: ChatResponse) -> None:
        key = request_digest(req)
        text = json.dumps(stored_entry(req, resp), ensure_ascii=False, sort_keys=True, indent=1)
        with self.lock_for(req):
            try:
                atomic_write_text(self.path_for(key), text)
            except OSError as exc:
                logger.warning("Could not write cache entry %s: %s", key, exc)
