import threading
import time

import pytest
import requests

from quote_first_pipeline.errors import ConfigError, CredentialError, ReplayMissError, RequestError, TransportError
from quote_first_pipeline.llm import (
    ChatEndpoint,
    ChatRequest,
    ChatResponse,
    EndpointConfig,
    HttpBackend,
    ResponseCache,
    build_endpoint,
    cached_complete,
    complete,
    record_transcript,
    replay_backend,
    request_digest,
)
from quote_first_pipeline.pipeline.batch import run_batch


class FakeResponse:
    def __init__(self, status_code=200, body=None, text=""):
        self.status_code = status_code
        self._body = body
        self.text = text

    def json(self):
        if self._body is None:
            raise ValueError("no body")
        return self._body


def _ok(text):
    return FakeResponse(200, {"choices": [{"message": {"content": text}}], "usage": {"prompt_tokens": 3, "completion_tokens": 1}})


class CountingBackend:
    def __init__(self, text="ok"):
        self.text = text
        self.calls = 0

    def send(self, req, endpoint=None):
        self.calls += 1
        return ChatResponse(f"{self.text}:{req.prompt}")


def _http(**overrides):
    settings = dict(name="live", model="m", base_url="http://llm.test/v1", max_retries=2, backoff_seconds=0)
    settings.update(overrides)
    return EndpointConfig(**settings)


def test_replay_serves_recorded_text(tmp_path):
    req = ChatRequest.user("m", "hello")
    path = tmp_path / "t.json"
    record_transcript(path, [(req, "world")])
    backend = replay_backend(path)
    response = backend.send(req)
    assert response.text == "world"
    assert response.cached is False
    assert backend.send(req) == response


def test_replay_miss_names_nearest(tmp_path):
    path = tmp_path / "t.json"
    record_transcript(path, [(ChatRequest.user("m", "hello there"), "a"), (ChatRequest.user("m", "zzz"), "b")])
    with pytest.raises(ReplayMissError) as err:
        replay_backend(path).send(ChatRequest.user("m", "hello there!"))
    assert err.value.nearest == request_digest(ChatRequest.user("m", "hello there"))


def test_cache_directory_doubles_as_transcript(tmp_path):
    cache = ResponseCache(tmp_path / "cache")
    req = ChatRequest.user("m", "q")
    cached_complete(req, _http(), cache, backend=CountingBackend())
    assert replay_backend(tmp_path / "cache").send(req).text == "ok:q"


def test_cached_complete_miss_then_hit(tmp_path):
    cache = ResponseCache(tmp_path)
    backend = CountingBackend()
    req = ChatRequest.user("m", "q")
    first = cached_complete(req, _http(), cache, backend)
    second = cached_complete(req, _http(), cache, backend)
    assert (first.cached, second.cached) == (False, True)
    assert first.text == second.text
    assert backend.calls == 1


def test_request_digest_is_field_sensitive():
    base = ChatRequest.user("m", "q", temperature=0.0, max_tokens=10)
    variants = [
        ChatRequest.user("m", "q", temperature=0.5, max_tokens=10),
        ChatRequest.user("m2", "q", temperature=0.0, max_tokens=10),
        ChatRequest.user("m", "q2", temperature=0.0, max_tokens=10),
        ChatRequest.user("m", "q", temperature=0.0, max_tokens=11),
        base.followed_by("a", "again"),
    ]
    digests = {request_digest(base)} | {request_digest(v) for v in variants}
    assert len(digests) == len(variants) + 1


def test_second_pass_hits_cache_only(tmp_path):
    backend = CountingBackend()
    endpoint = ChatEndpoint(_http(), backend, ResponseCache(tmp_path))
    prompts = [f"prompt {i}" for i in range(100)]
    first = [endpoint.ask(p).text for p in prompts]
    calls = backend.calls
    second = [endpoint.ask(p).text for p in prompts]
    assert calls == 100
    assert backend.calls == 100
    assert first == second
    assert endpoint.cache_hits == 100


def test_concurrent_identical_requests_reach_backend_once(tmp_path):
    class SlowBackend(CountingBackend):
        def send(self, req, endpoint=None):
            time.sleep(0.05)
            return super().send(req, endpoint)

    backend = SlowBackend()
    endpoint = ChatEndpoint(_http(parallelism=4), backend, ResponseCache(tmp_path))
    texts = []
    workers = [threading.Thread(target=lambda: texts.append(endpoint.ask("same question").text)) for _ in range(4)]
    for w in workers:
        w.start()
    for w in workers:
        w.join()
    assert backend.calls == 1
    assert endpoint.backend_calls == 1
    assert endpoint.cache_hits == 3
    assert len(set(texts)) == 1


def test_cache_write_failure_is_a_warning(tmp_path, caplog):
    blocker = tmp_path / "not_a_dir"
    blocker.write_text("x", encoding="utf-8")
    response = cached_complete(ChatRequest.user("m", "q"), _http(), ResponseCache(blocker), CountingBackend())
    assert response.text == "ok:q"
    assert "Could not write cache entry" in caplog.text


def test_http_posts_chat_completions_payload(monkeypatch):
    seen = {}

    def fake_post(url, json, headers, timeout):
        seen.update(url=url, json=json, headers=headers, timeout=timeout)
        return _ok("Nantong")

    monkeypatch.setattr(requests, "post", fake_post)
    monkeypatch.setenv("TEST_LLM_KEY", "secret")
    ep = _http(credential_env="TEST_LLM_KEY", timeout=5.0)
    response = complete(ep.request("Where?"), ep)
    assert response.text == "Nantong"
    assert response.usage == (3, 1)
    assert seen["url"] == "http://llm.test/v1/chat/completions"
    assert seen["json"] == {
        "model": "m",
        "messages": [{"role": "user", "content": "Where?"}],
        "temperature": 0.0,
        "max_tokens": 512,
    }
    assert seen["headers"]["Authorization"] == "Bearer secret"
    assert seen["timeout"] == 5.0


def test_http_retries_transient_failures(monkeypatch):
    replies = [FakeResponse(429), FakeResponse(503), _ok("done")]
    monkeypatch.setattr(requests, "post", lambda *a, **k: replies.pop(0))
    assert HttpBackend(_http()).send(ChatRequest.user("m", "q"), _http()).text == "done"
    assert replies == []


def test_http_gives_up_after_retries(monkeypatch):
    calls = []

    def unreachable(*args, **kwargs):
        calls.append(1)
        raise requests.ConnectionError("refused")

    monkeypatch.setattr(requests, "post", unreachable)
    ep = _http(max_retries=0)
    with pytest.raises(TransportError):
        complete(ep.request("q"), ep)
    assert len(calls) == 1


def test_http_client_error_is_not_retried(monkeypatch):
    calls = []

    def bad_request(*args, **kwargs):
        calls.append(1)
        return FakeResponse(400, text="model not found")

    monkeypatch.setattr(requests, "post", bad_request)
    with pytest.raises(RequestError) as err:
        complete(ChatRequest.user("m", "q"), _http())
    assert err.value.status == 400
    assert "model not found" in err.value.body_excerpt
    assert len(calls) == 1


def test_missing_credential_fails_before_any_request(monkeypatch):
    monkeypatch.delenv("MISSING_LLM_KEY", raising=False)
    with pytest.raises(CredentialError) as err:
        build_endpoint(_http(credential_env="MISSING_LLM_KEY"))
    assert err.value.exit_code == 1


def test_endpoint_config_validation():
    with pytest.raises(ConfigError):
        EndpointConfig(name="x", model="m", base_url="http://x", parallelism=0)
    with pytest.raises(ConfigError):
        EndpointConfig(name="x", model="m")


def test_in_flight_requests_bounded_by_parallelism():
    lock = threading.Lock()
    state = {"now": 0, "peak": 0}

    class SlowBackend:
        def send(self, req, endpoint=None):
            with lock:
                state["now"] += 1
                state["peak"] = max(state["peak"], state["now"])
            time.sleep(0.01)
            with lock:
                state["now"] -= 1
            return ChatResponse("x")

    endpoint = ChatEndpoint(_http(parallelism=3), SlowBackend())
    result = run_batch(list(range(40)), lambda i: endpoint.ask(str(i)), key=str, parallelism=10, progress=False)
    assert len(result.results) == 40
    assert state["peak"] <= 3
    assert endpoint.backend_calls == 40
