"""Service configuration: TOML file with environment-variable overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from vlqa.answer import AnswerConfig
from vlqa.gateway import ENV_API_KEY, ENV_ENDPOINT, ENV_MODEL
from vlqa.index import Bm25Params
from vlqa.retriever import RetrieverConfig


@dataclass(frozen=True, slots=True)
class GatewayConfig:
    mode: str = "http"  # "http" or "scripted"
    endpoint: str = ""
    api_key: str = ""
    model: str = ""
    timeout: float = 60.0
    script_path: str = ""  # scripted mode: JSON file of tag -> response(s)

    def __post_init__(self) -> None:
        if self.mode not in ("http", "scripted"):
            raise ValueError(f"gateway mode must be 'http' or 'scripted', got {self.mode!r}")


@dataclass(frozen=True, slots=True)
class ServiceConfig:
    port: int = 8080
    videos_path: str = ""
    moments_path: str = ""
    retriever: RetrieverConfig = field(default_factory=RetrieverConfig)
    answer: AnswerConfig = field(default_factory=AnswerConfig)
    bm25: Bm25Params = field(default_factory=Bm25Params)
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    cors_allowed_origins: tuple[str, ...] = ()
    max_inflight_llm: int = 8
    query_prompt_path: str = ""
    answer_prompt_path: str = ""

    def __post_init__(self) -> None:
        if not (1 <= self.port <= 65535):
            raise ValueError(f"port must be in [1, 65535], got {self.port}")
        if self.max_inflight_llm < 1:
            raise ValueError("max_inflight_llm must be >= 1")


def _section(data: Mapping[str, Any], name: str) -> dict[str, Any]:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ValueError(f"config section [{name}] must be a table")
    return dict(value)


def load_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
) -> ServiceConfig:
    """Assemble config from defaults, then the TOML file, then env vars."""
    env = os.environ if env is None else env
    data: dict[str, Any] = {}
    if path is not None:
        with open(path, "rb") as f:
            data = tomllib.load(f)

    service = _section(data, "service")
    retriever = _section(data, "retriever")
    answer = _section(data, "answer")
    bm25 = _section(data, "bm25")
    gateway = _section(data, "gateway")

    endpoint = env.get(ENV_ENDPOINT) or gateway.get("endpoint", "")
    api_key = env.get(ENV_API_KEY) or gateway.get("api_key", "")
    model = env.get(ENV_MODEL) or gateway.get("model", "")

    return ServiceConfig(
        port=int(service.get("port", 8080)),
        videos_path=str(service.get("videos", "")),
        moments_path=str(service.get("moments", "")),
        retriever=RetrieverConfig(
            min_queries=int(retriever.get("min_queries", 5)),
            per_query_top_k=int(retriever.get("per_query_top_k", 20)),
            max_docs=int(retriever.get("max_docs", 50)),
        ),
        answer=AnswerConfig(
            link_base_url=str(answer.get("link_base_url", "vlqa://moment")),
            max_context_docs=int(answer.get("max_context_docs", 50)),
            require_grounding=bool(answer.get("require_grounding", True)),
        ),
        bm25=Bm25Params(
            k1=float(bm25.get("k1", 1.2)),
            b=float(bm25.get("b", 0.75)),
        ),
        gateway=GatewayConfig(
            mode=str(gateway.get("mode", "http")),
            endpoint=endpoint,
            api_key=api_key,
            model=model,
            timeout=float(gateway.get("timeout", 60.0)),
            script_path=str(gateway.get("script_path", "")),
        ),
        cors_allowed_origins=tuple(service.get("cors_allowed_origins", ())),
        max_inflight_llm=int(service.get("max_inflight_llm", 8)),
        query_prompt_path=str(retriever.get("prompt_path", "")),
        answer_prompt_path=str(answer.get("prompt_path", "")),
    )
