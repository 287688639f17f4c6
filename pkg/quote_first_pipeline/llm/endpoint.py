"""Endpoint settings shared by the HTTP and replay backends."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional

from ..errors import ConfigError
from .messages import ChatRequest


@dataclass(frozen=True)
class EndpointConfig:
    name: str
    model: str
    base_url: str = ""
    credential_env: Optional[str] = None
    timeout: float = 60.0
    max_retries: int = 3
    parallelism: int = 4
    temperature: float = 0.0
    max_tokens: int = 512
    backoff_seconds: float = 1.0
    replay: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.model:
            raise ConfigError(f"Endpoint '{self.name}' needs a model.")
        if self.parallelism < 1:
            raise ConfigError(f"Endpoint '{self.name}': parallelism must be >= 1.")
        if self.max_retries < 0:
            raise ConfigError(f"Endpoint '{self.name}': max_retries must be >= 0.")
        if self.temperature < 0:
            raise ConfigError(f"Endpoint '{self.name}': temperature must be >= 0.")
        if not self.replay and not self.base_url:
            raise ConfigError(f"Endpoint '{self.name}' needs base_url or replay.")

    @property
    def is_replay(self) -> bool:
        return bool(self.replay)

    def request(self, prompt: str) -> ChatRequest:
        return ChatRequest.user(self.model, prompt, self.temperature, self.max_tokens)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, name: str, data: Dict[str, Any]) -> "EndpointConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Endpoint '{name}': unknown keys {sorted(unknown)}")
        data = {**data, "name": data.get("name", name)}
        return cls(**data)
