"""Chat request/response carriers and the request digest used as a cache key."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

from ..storage import canonical_json, text_digest

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"Unknown chat role '{self.role}'")

    def to_dict(self) -> Dict[str, str]:
        return {"role": self.role, "content": self.content}


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: Tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_tokens: int = 512

    def __post_init__(self) -> None:
        if not any(m.role == "user" for m in self.messages):
            raise ValueError("ChatRequest needs at least one user message.")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    @classmethod
    def user(cls, model: str, content: str, temperature: float = 0.0, max_tokens: int = 512) -> "ChatRequest":
        return cls(model, (ChatMessage("user", content),), temperature, max_tokens)

    def followed_by(self, assistant_text: str, user_text: str) -> "ChatRequest":
        extra = (ChatMessage("assistant", assistant_text), ChatMessage("user", user_text))
        return ChatRequest(self.model, self.messages + extra, self.temperature, self.max_tokens)

    @property
    def prompt(self) -> str:
        return "\n".join(m.content for m in self.messages if m.role == "user")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "messages": [m.to_dict() for m in self.messages],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ChatRequest":
        return cls(
            model=data["model"],
            messages=tuple(ChatMessage(m["role"], m["content"]) for m in data["messages"]),
            temperature=float(data.get("temperature", 0.0)),
            max_tokens=int(data.get("max_tokens", 512)),
        )


def request_digest(req: ChatRequest) -> str:
    """SHA-256 over (model, messages, temperature, max_tokens)."""
    return text_digest(canonical_json(req.to_dict()))


@dataclass(frozen=True)
class ChatResponse:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    cached: bool = False

    @property
    def usage(self) -> Tuple[int, int]:
        return (self.prompt_tokens, self.completion_tokens)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "text": self.text,
            "usage": {"prompt_tokens": self.prompt_tokens, "completion_tokens": self.completion_tokens},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], cached: bool = False) -> "ChatResponse":
        usage = data.get("usage") or {}
        return cls(
            text=data.get("text", ""),
            prompt_tokens=int(usage.get("prompt_tokens", 0)),
            completion_tokens=int(usage.get("completion_tokens", 0)),
            cached=cached,
        )


def stored_entry(req: ChatRequest, resp: ChatResponse) -> Dict[str, Any]:
    """Shape of one cache file and of one transcript entry."""
    return {"request": req.to_dict(), "response": resp.to_dict()}
