"""Run manifests: one YAML file per run, written by a single process."""
from __future__ import annotations

import logging
import secrets
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import yaml

from ..errors import DataError, UsageError
from ..pipeline.records import FailureRecord
from ..storage import atomic_write_text

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.yaml"
STAGES = ("distill", "export-train", "quote", "eval-quotes", "ab-test")

_CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"


class RunStatus(Enum):
    RUNNING = "running"
    COMPLETED = "completed"
    PARTIAL = "partial"  # some ids failed with a retryable error
    FAILED = "failed"


def _encode(value: int, length: int) -> str:
    chars = []
    for _ in range(length):
        value, rem = divmod(value, 32)
        chars.append(_CROCKFORD[rem])
    return "".join(reversed(chars))


def new_run_id(now_ms: Optional[int] = None) -> str:
    """26-char ULID-style id: 48-bit millisecond time then 80 random bits."""
    ms = int(time.time() * 1000) if now_ms is None else now_ms
    return _encode(ms, 10) + _encode(secrets.randbits(80), 16)


def _now() -> datetime:
    return datetime.now(timezone.utc)


@dataclass
class RunManifest:
    run_id: str
    stage: str
    config_digest: str
    config: Dict[str, Any] = field(default_factory=dict)
    template_digests: Dict[str, str] = field(default_factory=dict)
    endpoint_models: Dict[str, str] = field(default_factory=dict)
    input_digest: str = ""
    input_ids: List[str] = field(default_factory=list)
    processed: List[str] = field(default_factory=list)
    failed: List[Dict[str, Any]] = field(default_factory=list)
    outputs: Dict[str, str] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)
    status: RunStatus = RunStatus.RUNNING
    started_at: datetime = field(default_factory=_now)
    finished_at: Optional[datetime] = None

    def __post_init__(self) -> None:
        if self.stage not in STAGES:
            raise ValueError(f"stage must be one of {STAGES}, got '{self.stage}'")

    @property
    def failed_ids(self) -> List[str]:
        return [f["id"] for f in self.failed]

    @property
    def pending(self) -> int:
        return sum(1 for f in self.failed if f.get("retryable"))

    def record(self, processed: Iterable[str], failures: Iterable[FailureRecord]) -> None:
        """Replace the processed/failed lists; every input id ends up in exactly one."""
        failures = list(failures)
        failed_ids = {f.id for f in failures}
        self.processed = [i for i in processed if i not in failed_ids]
        self.failed = [{**f.to_dict(), "retryable": f.retryable} for f in failures]

    def check_complete(self) -> None:
        seen = self.processed + self.failed_ids
        if sorted(seen) != sorted(self.input_ids):
            missing = sorted(set(self.input_ids) - set(seen))
            doubled = sorted({i for i in seen if seen.count(i) > 1})
            raise DataError(
                f"Manifest {self.run_id} is inconsistent: missing {missing}, listed twice {doubled}"
            )

    def finish(self) -> RunStatus:
        self.check_complete()
        if self.pending:
            self.status = RunStatus.PARTIAL
        elif self.input_ids and not self.processed:
            self.status = RunStatus.FAILED
        else:
            self.status = RunStatus.COMPLETED
        self.finished_at = _now()
        return self.status

    def to_dict(self) -> Dict[str, Any]:
        return {
            "run_id": self.run_id,
            "stage": self.stage,
            "status": self.status.value,
            "started_at": self.started_at.isoformat(),
            "finished_at": self.finished_at.isoformat() if self.finished_at else None,
            "config_digest": self.config_digest,
            "template_digests": dict(self.template_digests),
            "endpoint_models": dict(self.endpoint_models),
            "input_digest": self.input_digest,
            "input_ids": list(self.input_ids),
            "processed": list(self.processed),
            "failed": list(self.failed),
            "outputs": dict(self.outputs),
            "summary": dict(self.summary),
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        data = data.copy()
        data["status"] = RunStatus(data.get("status", "running"))
        data["started_at"] = datetime.fromisoformat(data["started_at"])
        if data.get("finished_at"):
            data["finished_at"] = datetime.fromisoformat(data["finished_at"])
        return cls(**data)


def manifest_path(runs_dir: Path, run_id: str) -> Path:
    return runs_dir / run_id / MANIFEST_FILE


def save_manifest(manifest: RunManifest, runs_dir: Path) -> Path:
    path = manifest_path(runs_dir, manifest.run_id)
    atomic_write_text(path, yaml.safe_dump(manifest.to_dict(), sort_keys=False, allow_unicode=True))
    return path


def load_manifest(runs_dir: Path, run_id: str) -> RunManifest:
    path = manifest_path(runs_dir, run_id)
    if not path.exists():
        raise UsageError(f"Unknown run id '{run_id}' (no manifest at {path})")
    with path.open("r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    return RunManifest.from_dict(raw)


def list_runs(runs_dir: Path) -> List[str]:
    if not runs_dir.exists():
        return []
    return sorted(p.parent.name for p in runs_dir.glob(f"*/{MANIFEST_FILE}"))
