"""OpenAI-compatible chat-completions client with retries, caching and bounded parallelism."""
from __future__ import annotations

import logging
import os
import threading
import time
from typing import Any, Dict, Optional, Protocol

import requests

from ..errors import CredentialError, RequestError, TransportError
from .cache import ResponseCache
from .endpoint import EndpointConfig
from .messages import ChatRequest, ChatResponse
from .replay import ReplayBackend, replay_backend

logger = logging.getLogger(__name__)

RETRYABLE_STATUS = {429, 500, 502, 503, 504}


class ChatBackend(Protocol):
    def send(self, req: ChatRequest, endpoint: EndpointConfig) -> ChatResponse: ...


def resolve_credential(ep: EndpointConfig) -> Optional[str]:
    if not ep.credential_env:
        return None
    value = os.getenv(ep.credential_env, "").strip()
    if not value:
        raise CredentialError(ep.credential_env, ep.name)
    return value


class HttpBackend:
    """POST {base_url}/chat/completions and return choices[0].message.content."""

    def __init__(self, ep: EndpointConfig, session: Optional[requests.Session] = None):
        self.api_key = resolve_credential(ep)
        self.session = session

    def _post(self, url: str, payload: Dict[str, Any], headers: Dict[str, str], timeout: float) -> requests.Response:
        poster = self.session.post if self.session is not None else requests.post
        return poster(url, json=payload, headers=headers, timeout=timeout)

    def send(self, req: ChatRequest, endpoint: EndpointConfig) -> ChatResponse:
        url = endpoint.base_url.rstrip("/") + "/chat/completions"
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        last_error: Optional[str] = None
        for attempt in range(endpoint.max_retries + 1):
            if attempt:
                delay = endpoint.backoff_seconds * (2 ** (attempt - 1))
                logger.warning("Retrying %s (attempt %d/%d) in %.1fs: %s",
                               endpoint.name, attempt + 1, endpoint.max_retries + 1, delay, last_error)
                time.sleep(delay)
            try:
                response = self._post(url, req.to_dict(), headers, endpoint.timeout)
            except requests.RequestException as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                continue
            if response.status_code in RETRYABLE_STATUS:
                last_error = f"HTTP {response.status_code}"
                continue
            if response.status_code >= 400:
                raise RequestError(response.status_code, response.text[:300])
            return self._parse(response)

        raise TransportError(
            f"Endpoint '{endpoint.name}' failed after {endpoint.max_retries + 1} attempts: {last_error}"
        )

    @staticmethod
    def _parse(response: requests.Response) -> ChatResponse:
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"Malformed chat-completions response: {exc}") from exc
        usage = body.get("usage") or {}
        return ChatResponse(
            text=text,
            prompt_tokens=int(usage.get("prompt_tokens", 0) or 0),
            completion_tokens=int(usage.get("completion_tokens", 0) or 0),
        )


def backend_for(ep: EndpointConfig) -> ChatBackend:
    if ep.is_replay:
        return replay_backend(ep.replay)
    return HttpBackend(ep)


def complete(req: ChatRequest, ep: EndpointConfig, backend: Optional[ChatBackend] = None) -> ChatResponse:
    backend = backend or backend_for(ep)
    return backend.send(req, ep)


def cached_complete(
    req: ChatRequest,
    ep: EndpointConfig,
    cache: ResponseCache,
    backend: Optional[ChatBackend] = None,
) -> ChatResponse:
    with cache.lock_for(req):
        hit = cache.get(req)
        if hit is not None:
            return hit
        response = complete(req, ep, backend)
        cache.put(req, response)
    return response


class ChatEndpoint:
    """A configured model behind a backend, shared by all workers of a stage."""

    def __init__(
        self,
        config: EndpointConfig,
        backend: Optional[ChatBackend] = None,
        cache: Optional[ResponseCache] = None,
    ):
        self.config = config
        self.backend = backend or backend_for(config)
        self.cache = cache
        self._slots = threading.BoundedSemaphore(config.parallelism)
        self._counter_lock = threading.Lock()
        self.backend_calls = 0
        self.cache_hits = 0

    @property
    def model(self) -> str:
        return self.config.model

    @property
    def parallelism(self) -> int:
        return self.config.parallelism

    def request(self, prompt: str) -> ChatRequest:
        return self.config.request(prompt)

    def _send(self, req: ChatRequest) -> ChatResponse:
        with self._slots:
            with self._counter_lock:
                self.backend_calls += 1
            return self.backend.send(req, self.config)

    def complete(self, req: ChatRequest) -> ChatResponse:
        if self.cache is None:
            return self._send(req)
        # Identical requests in flight wait for the first one and then hit the cache.
        with self.cache.lock_for(req):
            hit = self.cache.get(req)
            if hit is not None:
                with self._counter_lock:
                    self.cache_hits += 1
                return hit
            response = self._send(req)
            self.cache.put(req, response)
        return response

    def ask(self, prompt: str) -> ChatResponse:
        return self.complete(self.request(prompt))


def build_endpoint(config: EndpointConfig, cache: Optional[ResponseCache] = None) -> ChatEndpoint:
    """Create the endpoint; live endpoints resolve their credential here, before any request."""
    return ChatEndpoint(config, backend_for(config), cache)


__all__ = [
    "ChatBackend",
    "ChatEndpoint",
    "HttpBackend",
    "ReplayBackend",
    "backend_for",
    "build_endpoint",
    "cached_complete",
    "complete",
    "resolve_credential",
]
