"""Chat-completion backends, on-disk caching, and retry handling.

A completion is cached under the SHA-256 of its request material
(variant, model, temperature, messages), so reruns of the same corpus
never touch the network.  Cache writes go through a temp file and an
atomic rename; a torn write can never be read back.  Transient HTTP
failures (429, 408, 5xx, connection errors) retry with exponential
backoff; anything else fails immediately.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import requests

from .templates import ChatExchange, ChatMessage
from .validation import CaptionResult, normalize_caption

API_KEY_ENV = "MOODCAP_API_KEY"
TRANSIENT_STATUSES = frozenset({408, 429} | set(range(500, 600)))


class CompletionError(RuntimeError):
    """A completion that cannot be served, after any retries."""

    def __init__(self, message: str, status: int | None = None, attempts: int = 1):
        self.status = status
        self.attempts = attempts
        super().__init__(message)


class TransientBackendError(CompletionError):
    """Worth retrying: rate limits, timeouts, server-side errors."""


class EmptyCompletionError(CompletionError):
    """The backend answered with no usable text."""


@dataclass(frozen=True)
class LlmConfig:
    endpoint: str = "mock"
    model: str = "mock-model"
    temperature: float = 1.0
    max_inflight: int = 4
    max_attempts: int = 3
    backoff_base: float = 0.5  # seconds; attempt n sleeps base * 2**(n-1)
    cache_dir: str | Path = ".caption_cache"

    def __post_init__(self):
        if self.max_inflight < 1:
            raise ValueError("max_inflight must be at least 1")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")


class ChatBackend(Protocol):
    def complete(self, messages: tuple[ChatMessage, ...], model: str, temperature: float) -> str:
        ...


class HttpChatBackend:
    """POSTs the standard chat-completions JSON shape and reads choice 0."""

    def __init__(self, endpoint: str, api_key_env: str = API_KEY_ENV, timeout: float = 60.0):
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.timeout = timeout

    def complete(self, messages, model, temperature):
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        body = {
            "model": model,
            "temperature": temperature,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
        }
        try:
            resp = requests.post(self.endpoint, json=body, headers=headers, timeout=self.timeout)
        except requests.Timeout as exc:
            raise TransientBackendError(f"timeout contacting {self.endpoint}", 408) from exc
        except requests.ConnectionError as exc:
            raise TransientBackendError(f"connection error: {exc}") from exc
        if resp.status_code in TRANSIENT_STATUSES:
            raise TransientBackendError(
                f"HTTP {resp.status_code} from {self.endpoint}", resp.status_code
            )
        if resp.status_code != 200:
            raise CompletionError(
                f"HTTP {resp.status_code} from {self.endpoint}", resp.status_code
            )
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise CompletionError(f"malformed completion payload: {exc}") from exc


def mock_caption(messages: tuple[ChatMessage, ...]) -> str:
    """Deterministic stand-in captions derived from the request itself.

    Single-turn requests answer "Sounds of <events joined by and>.", with
    " in a <mood> mood" appended when a mood line is present.  Rewrite
    exchanges restate the assistant's sentence with the mood appended.
    """
    last = messages[-1].content
    mood = None
    events = None
    for line in last.splitlines():
        if line.startswith("Mood: "):
            mood = line[len("Mood: "):]
        elif line.startswith("[") and line.endswith("]"):
            events = [n.strip().strip("'") for n in line[1:-1].split("', '")]

    if len(messages) >= 3 and messages[1].role == "assistant":
        base = messages[1].content.rstrip(".")
        return f"{base} in a {mood} mood." if mood else f"{base}."
    if events is None:
        raise EmptyCompletionError("mock request carried no event list")
    base = "Sounds of " + " and ".join(events)
    return f"{base} in a {mood} mood." if mood else f"{base}."


class MockChatBackend:
    """Offline backend for tests and dry runs.

    `script` overrides the reply rule; it may raise to simulate faults.
    Every attempted call is appended to `calls` so tests can assert how
    much traffic a run generated.
    """

    def __init__(self, script: Callable[[tuple[ChatMessage, ...]], str] | None = None):
        self.script = script or mock_caption
        self.calls: list[str] = []

    def complete(self, messages, model, temperature):
        self.calls.append(messages[-1].content)
        return self.script(messages)


@dataclass
class GenerateOutcome:
    result: CaptionResult
    from_cache: bool
    retries: int  # attempts beyond the first, across all steps


class LlmClient:
    """Cache-through wrapper around a backend, with retry and backoff."""

    def __init__(
        self,
        config: LlmConfig,
        backend: ChatBackend,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.backend = backend
        self.sleep = sleep
        Path(config.cache_dir).mkdir(parents=True, exist_ok=True)

    def cache_key(self, exchange: ChatExchange) -> str:
        material = {
            "variant": exchange.variant,
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [
                {"role": m.role, "content": m.content} for m in exchange.messages
            ],
        }
        blob = json.dumps(material, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def _cache_path(self, key: str) -> Path:
        return Path(self.config.cache_dir) / f"{key}.json"

    def _read_cache(self, key: str) -> str | None:
        path = self._cache_path(key)
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)["reply"]

    def _write_cache(self, key: str, exchange: ChatExchange, reply: str) -> None:
        path = self._cache_path(key)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(
                    {"variant": exchange.variant, "model": self.config.model, "reply": reply},
                    fh,
                    ensure_ascii=False,
                )
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def complete_exchange(self, exchange: ChatExchange) -> tuple[str, bool, int]:
        """Raw reply text, whether it came from cache, and retry count."""
        key = self.cache_key(exchange)
        cached = self._read_cache(key)
        if cached is not None:
            return cached, True, 0

        retries = 0
        attempt = 1
        while True:
            try:
                reply = self.backend.complete(
                    exchange.messages, self.config.model, self.config.temperature
                )
                break
            except TransientBackendError as exc:
                if attempt >= self.config.max_attempts:
                    raise CompletionError(
                        f"gave up after {attempt} attempts: {exc}",
                        status=exc.status,
                        attempts=attempt,
                    ) from exc
                self.sleep(self.config.backoff_base * 2 ** (attempt - 1))
                attempt += 1
                retries += 1
        self._write_cache(key, exchange, reply)
        return reply, False, retries

    def generate(self, clip_id: str, exchange: ChatExchange) -> GenerateOutcome:
        """One caption for one clip; raises CompletionError on failure."""
        reply, from_cache, retries = self.complete_exchange(exchange)
        caption = normalize_caption(reply)
        if not caption:
            raise EmptyCompletionError(f"empty completion for clip {clip_id}")
        return GenerateOutcome(
            result=CaptionResult.from_caption(clip_id, exchange.variant, caption),
            from_cache=from_cache,
            retries=retries,
        )
