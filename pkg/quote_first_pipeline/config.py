"""Configuration constants and the structured run config."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .errors import ConfigError
from .llm.endpoint import EndpointConfig

BASE_DIR = Path(__file__).resolve().parent
PROMPTS_DIR = BASE_DIR / "prompts"
DEFAULT_OUTPUT_DIR = Path("runs_output")
DEFAULT_CACHE_DIR = Path(".llm_cache")
DEFAULT_TEST_SIZE = 600
DEFAULT_SEED = 42

CORPUS_FORMATS = ("flat-jsonl", "nested-json")
PARSE_MODES = ("strict", "lenient")
JUDGE_KINDS = ("oracle", "llm")

_TOP_LEVEL_KEYS = {
    "corpus", "split", "output_dir", "cache_dir", "parse_mode",
    "endpoints", "judge", "eval",
}


@dataclass
class JudgeSettings:
    kind: str = "oracle"
    threshold: Optional[float] = None
    set_level: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "threshold": self.threshold, "set_level": self.set_level}


@dataclass
class PipelineConfig:
    corpus_path: Optional[Path] = None
    corpus_format: str = "flat-jsonl"
    test_size: int = DEFAULT_TEST_SIZE
    seed: int = DEFAULT_SEED
    output_dir: Path = DEFAULT_OUTPUT_DIR
    cache_dir: Optional[Path] = None
    parse_mode: str = "lenient"
    teacher: Optional[EndpointConfig] = None
    quoter: Optional[EndpointConfig] = None
    judge_endpoint: Optional[EndpointConfig] = None
    base_models: List[EndpointConfig] = field(default_factory=list)
    judge: JudgeSettings = field(default_factory=JudgeSettings)
    predictions: List[Path] = field(default_factory=list)
    prediction_labels: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.corpus_format not in CORPUS_FORMATS:
            raise ConfigError(f"corpus.format must be one of {CORPUS_FORMATS}, got '{self.corpus_format}'")
        if self.parse_mode not in PARSE_MODES:
            raise ConfigError(f"parse_mode must be one of {PARSE_MODES}, got '{self.parse_mode}'")
        if self.judge.kind not in JUDGE_KINDS:
            raise ConfigError(f"judge.kind must be one of {JUDGE_KINDS}, got '{self.judge.kind}'")
        if self.judge.kind == "llm" and self.judge_endpoint is None:
            raise ConfigError("judge.kind 'llm' needs endpoints.judge.")
        if self.test_size < 0:
            raise ConfigError("split.test_size must be >= 0.")
        if self.prediction_labels and len(self.prediction_labels) != len(self.predictions):
            raise ConfigError("eval.labels must match eval.predictions one to one.")
        if len(set(self.prediction_labels)) != len(self.prediction_labels):
            raise ConfigError(f"eval.labels must be distinct, got {self.prediction_labels}")

    # Layout of everything a run writes under output_dir.
    @property
    def split_dir(self) -> Path:
        return self.output_dir / "split"

    @property
    def gold_dir(self) -> Path:
        return self.output_dir / "gold"

    @property
    def runs_dir(self) -> Path:
        return self.output_dir / "runs"

    def require(self, attribute: str, stage: str) -> Any:
        value = getattr(self, attribute)
        if value is None or value == []:
            raise ConfigError(f"Stage '{stage}' needs '{attribute}' in the config.")
        return value

    def with_overrides(
        self,
        judge_kind: Optional[str] = None,
        parse_mode: Optional[str] = None,
        parallelism: Optional[int] = None,
        cache_dir: Optional[str] = None,
    ) -> "PipelineConfig":
        updated = self
        if judge_kind:
            updated = replace(updated, judge=replace(updated.judge, kind=judge_kind))
        if parse_mode:
            updated = replace(updated, parse_mode=parse_mode)
        if cache_dir:
            updated = replace(updated, cache_dir=Path(cache_dir))
        if parallelism:
            def bump(ep: Optional[EndpointConfig]) -> Optional[EndpointConfig]:
                return replace(ep, parallelism=parallelism) if ep else None

            updated = replace(
                updated,
                teacher=bump(updated.teacher),
                quoter=bump(updated.quoter),
                judge_endpoint=bump(updated.judge_endpoint),
                base_models=[bump(ep) for ep in updated.base_models],
            )
        return updated

    def to_dict(self) -> Dict[str, Any]:
        def ep(e: Optional[EndpointConfig]) -> Optional[Dict[str, Any]]:
            return e.to_dict() if e else None

        return {
            "corpus": {"path": str(self.corpus_path) if self.corpus_path else None, "format": self.corpus_format},
            "split": {"test_size": self.test_size, "seed": self.seed},
            "output_dir": str(self.output_dir),
            "cache_dir": str(self.cache_dir) if self.cache_dir else None,
            "parse_mode": self.parse_mode,
            "endpoints": {
                "teacher": ep(self.teacher),
                "quoter": ep(self.quoter),
                "judge": ep(self.judge_endpoint),
                "base": [e.to_dict() for e in self.base_models],
            },
            "judge": self.judge.to_dict(),
            "eval": {
                "predictions": [str(p) for p in self.predictions],
                "labels": list(self.prediction_labels),
            },
        }

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> "PipelineConfig":
        unknown = set(data) - _TOP_LEVEL_KEYS
        if unknown:
            raise ConfigError(f"Unknown config keys: {sorted(unknown)}")
        base_dir = base_dir or Path.cwd()

        def resolve(value: Optional[str]) -> Optional[Path]:
            if value is None:
                return None
            path = Path(value)
            return path if path.is_absolute() else base_dir / path

        corpus = data.get("corpus") or {}
        split = data.get("split") or {}
        endpoints = data.get("endpoints") or {}
        judge = data.get("judge") or {}
        evaluation = data.get("eval") or {}

        def endpoint(name: str, raw: Optional[Dict[str, Any]]) -> Optional[EndpointConfig]:
            if raw is None:
                return None
            if not isinstance(raw, dict):
                raise ConfigError(f"endpoints.{name} must be a mapping.")
            raw = dict(raw)
            if raw.get("replay"):
                raw["replay"] = str(resolve(raw["replay"]))
            return EndpointConfig.from_dict(name, raw)

        base = endpoints.get("base") or []
        if not isinstance(base, list):
            raise ConfigError("endpoints.base must be a list.")

        try:
            return cls(
                corpus_path=resolve(corpus.get("path")),
                corpus_format=corpus.get("format", "flat-jsonl"),
                test_size=int(split.get("test_size", DEFAULT_TEST_SIZE)),
                seed=int(split.get("seed", DEFAULT_SEED)),
                output_dir=resolve(data.get("output_dir")) or base_dir / DEFAULT_OUTPUT_DIR,
                cache_dir=resolve(data.get("cache_dir")),
                parse_mode=data.get("parse_mode", "lenient"),
                teacher=endpoint("teacher", endpoints.get("teacher")),
                quoter=endpoint("quoter", endpoints.get("quoter")),
                judge_endpoint=endpoint("judge", endpoints.get("judge")),
                base_models=[endpoint(f"base[{i}]", raw) for i, raw in enumerate(base)],
                judge=JudgeSettings(
                    kind=judge.get("kind", "oracle"),
                    threshold=judge.get("threshold"),
                    set_level=bool(judge.get("set_level", False)),
                ),
                predictions=[resolve(p) for p in evaluation.get("predictions", [])],
                prediction_labels=list(evaluation.get("labels", [])),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"Invalid config value: {exc}") from exc


def load_config(path: Path) -> PipelineConfig:
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    with path.open("r", encoding="utf-8") as f:
        try:
            raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"Config file is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("Config file must contain a mapping.")
    return PipelineConfig.from_dict(raw, base_dir=path.resolve().parent)
