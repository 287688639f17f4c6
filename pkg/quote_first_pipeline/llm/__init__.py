"""Chat-completion client, response cache and offline replay backend."""
from .endpoint import EndpointConfig
from .messages import ChatMessage, ChatRequest, ChatResponse, request_digest
from .cache import ResponseCache
from .replay import ReplayBackend, record_transcript, replay_backend
from .client import ChatEndpoint, HttpBackend, build_endpoint, cached_complete, complete

__all__ = [
    "ChatEndpoint",
    "ChatMessage",
    "ChatRequest",
    "ChatResponse",
    "EndpointConfig",
    "HttpBackend",
    "ReplayBackend",
    "ResponseCache",
    "build_endpoint",
    "cached_complete",
    "complete",
    "record_transcript",
    "replay_backend",
    "request_digest",
]
