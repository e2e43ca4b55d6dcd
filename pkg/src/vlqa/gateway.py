"""Uniform access to a chat-completion LLM.

Two implementations of the same `complete()` contract:

* `HttpLlmGateway` speaks the OpenAI-compatible chat-completions wire format
  over HTTP, with bounded retries for transient failures.
* `ScriptedLlmGateway` returns canned responses keyed on a task tag found in
  the system prompt. Fully deterministic, zero network; this is what tests
  and offline runs use.

The rest of the system only ever sees the `LlmGateway` protocol, so any
instruction-tuned model behind an OpenAI-style endpoint works.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import httpx

from vlqa import timing
from vlqa.errors import (
    AuthError,
    GatewayTimeoutError,
    RateLimitedError,
    ScriptMissError,
    UpstreamError,
)

logger = logging.getLogger(__name__)

ROLES = ("system", "user", "assistant")

ENV_ENDPOINT = "VLQA_LLM_ENDPOINT"
ENV_API_KEY = "VLQA_LLM_API_KEY"
ENV_MODEL = "VLQA_LLM_MODEL"


@dataclass(frozen=True, slots=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")
        if self.role in ("system", "user") and not self.content:
            raise ValueError(f"{self.role} message content must be non-empty")


@dataclass(frozen=True, slots=True)
class ChatRequest:
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_tokens: int = 1024
    model: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "messages", tuple(self.messages))
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True, slots=True)
class ChatResponse:
    content: str
    usage: tuple[int, int] = (0, 0)  # (prompt_tokens, completion_tokens)
    latency: float = 0.0  # milliseconds

    def __post_init__(self) -> None:
        if self.latency < 0:
            raise ValueError("latency must be >= 0")


class LlmGateway(Protocol):
    def complete(self, request: ChatRequest) -> ChatResponse: ...


@dataclass
class ScriptedLlmGateway:
    """Deterministic gateway: responses keyed on a tag in the system prompt.

    A registered response may be a single string (always returned) or a
    sequence of strings consumed one per call, the last repeating. Matching
    on a tag rather than the full prompt keeps scripts robust to prompt
    wording changes.
    """

    scripts: dict[str, list[str]] = field(default_factory=dict)
    calls: list[ChatRequest] = field(default_factory=list)
    _cursors: dict[str, int] = field(default_factory=dict)

    def register(self, tag: str, response: str | Sequence[str]) -> None:
        self.scripts[tag] = [response] if isinstance(response, str) else list(response)
        if not self.scripts[tag]:
            raise ValueError("a script needs at least one response")
        self._cursors[tag] = 0

    def complete(self, request: ChatRequest) -> ChatResponse:
        self.calls.append(request)
        system_text = "\n".join(
            m.content for m in request.messages if m.role == "system"
        )
        for tag, responses in self.scripts.items():
            if tag in system_text:
                cursor = self._cursors[tag]
                self._cursors[tag] = min(cursor + 1, len(responses) - 1)
                content = responses[cursor]
                return ChatResponse(content=content, usage=(0, 0), latency=0.0)
        raise ScriptMissError(
            f"no script matches system prompt; registered tags: {sorted(self.scripts)}"
        )


class HttpLlmGateway:
    """OpenAI-compatible chat-completions client with bounded retries.

    Transient failures (timeouts, connection errors, 5xx, 429) are retried
    up to `max_retries` times with exponential backoff before surfacing;
    auth failures (401/403) surface immediately.
    """

    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        model: str = "",
        timeout: float = 60.0,
        max_retries: int = 2,
        backoff_base: float = 0.5,
        client: httpx.Client | None = None,
        sleep=time.sleep,
    ):
        if not endpoint:
            raise ValueError("endpoint must be non-empty")
        self.endpoint = endpoint.rstrip("/")
        self.api_key = api_key
        self.model = model
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._client = client or httpx.Client(timeout=timeout)
        self._sleep = sleep

    @classmethod
    def from_env(cls, **kwargs) -> "HttpLlmGateway":
        endpoint = os.environ.get(ENV_ENDPOINT, "")
        if not endpoint:
            raise ValueError(f"{ENV_ENDPOINT} is not set")
        return cls(
            endpoint=endpoint,
            api_key=os.environ.get(ENV_API_KEY, ""),
            model=os.environ.get(ENV_MODEL, ""),
            **kwargs,
        )

    def complete(self, request: ChatRequest) -> ChatResponse:
        payload = {
            "model": request.model or self.model,
            "messages": [
                {"role": m.role, "content": m.content} for m in request.messages
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        url = f"{self.endpoint}/chat/completions"
        logger.debug("llm request to %s (auth %s)", url, "redacted" if self.api_key else "none")

        last_error: Exception | None = None
        t0 = timing.now()
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                resp = self._client.post(
                    url, json=payload, headers=headers, timeout=self.timeout
                )
            except httpx.TimeoutException as exc:
                last_error = GatewayTimeoutError(f"no response within {self.timeout}s: {exc}")
                continue
            except httpx.TransportError as exc:
                last_error = UpstreamError(f"transport failure: {exc}")
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"credentials rejected (HTTP {resp.status_code})")
            if resp.status_code == 429:
                last_error = RateLimitedError("rate limited (HTTP 429)")
                continue
            if resp.status_code >= 500:
                last_error = UpstreamError(f"upstream failure (HTTP {resp.status_code})")
                continue
            resp.raise_for_status()
            data = resp.json()
            usage = data.get("usage") or {}
            latency = (timing.now() - t0) * 1000.0
            content = data["choices"][0]["message"]["content"] or ""
            logger.debug("llm response: %d chars in %.1f ms", len(content), latency)
            return ChatResponse(
                content=content,
                usage=(
                    int(usage.get("prompt_tokens", 0)),
                    int(usage.get("completion_tokens", 0)),
                ),
                latency=latency,
            )
        assert last_error is not None
        raise last_error
