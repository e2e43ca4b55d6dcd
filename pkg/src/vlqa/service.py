"""HTTP service exposing the question-answering pipeline, and the pipeline
orchestration shared with the CLI.

State is a loaded library plus an immutable index snapshot; re-ingesting
builds a fresh snapshot and swaps the reference atomically, so in-flight
requests keep the snapshot they started with. Concurrent upstream LLM calls
are bounded by a semaphore.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from vlqa.answer import answer
from vlqa.config import ServiceConfig
from vlqa.errors import StageError
from vlqa.gateway import HttpLlmGateway, LlmGateway, ScriptedLlmGateway
from vlqa.index import IndexSnapshot, build_index, search
from vlqa.ingest import (
    IngestDiagnostic,
    LibraryStore,
    build_documents,
    load_library,
    moment_record,
)
from vlqa.model import MomentDocument, RetrievalSet, SearchQuery
from vlqa.prompts import PromptTemplate, load_template
from vlqa.retriever import RetrieverConfig, retrieve
from vlqa.timing import StageTimer, timed


class BoundedGateway:
    """Caps concurrent in-flight completions on the wrapped gateway."""

    def __init__(self, inner: LlmGateway, limit: int):
        self._inner = inner
        self._sem = threading.Semaphore(limit)

    def complete(self, request):
        with self._sem:
            return self._inner.complete(request)


def build_gateway(config: ServiceConfig) -> LlmGateway:
    if config.gateway.mode == "scripted":
        gateway = ScriptedLlmGateway()
        if config.gateway.script_path:
            scripts = json.loads(Path(config.gateway.script_path).read_text(encoding="utf-8"))
            for tag, response in scripts.items():
                gateway.register(tag, response)
        return gateway
    return HttpLlmGateway(
        endpoint=config.gateway.endpoint,
        api_key=config.gateway.api_key,
        model=config.gateway.model,
        timeout=config.gateway.timeout,
    )


class ServiceState:
    """Everything a request needs: config, store, snapshot, gateway."""

    def __init__(self, config: ServiceConfig, gateway: LlmGateway | None = None):
        self.config = config
        self.store = LibraryStore()
        self.snapshot: IndexSnapshot | None = None
        self._gateway: LlmGateway | None = (
            BoundedGateway(gateway, config.max_inflight_llm) if gateway is not None else None
        )
        self.query_template: PromptTemplate = load_template(
            "querygen", config.query_prompt_path or None
        )
        self.answer_template: PromptTemplate = load_template(
            "answergen", config.answer_prompt_path or None
        )

    @property
    def gateway(self) -> LlmGateway:
        # built on first use so gateway-free commands (search, ingest) never
        # require LLM configuration
        if self._gateway is None:
            self._gateway = BoundedGateway(
                build_gateway(self.config), self.config.max_inflight_llm
            )
        return self._gateway

    @property
    def ready(self) -> bool:
        return self.snapshot is not None

    def load(
        self, videos_path: str | Path, moments_path: str | Path, strict: bool = False
    ) -> list[IngestDiagnostic]:
        """(Re)load the library and swap in a freshly built snapshot."""
        loaded, diagnostics = load_library(videos_path, moments_path, strict)
        self.store.replace_contents(loaded.assets, loaded.moments)
        self.snapshot = build_index(build_documents(self.store))
        return diagnostics


def _moment_summary(doc: MomentDocument, score: float) -> dict[str, Any]:
    return {
        "moment_id": doc.doc_id,
        "video_id": doc.video_id,
        "video_title": doc.video_title,
        "t_in": doc.t_in,
        "t_out": doc.t_out,
        "score": score,
    }


def _reference_payload(ref) -> dict[str, Any]:
    return {
        "video_id": ref.video_id,
        "timestamp_in": ref.timestamp_in,
        "timestamp_out": ref.timestamp_out,
        "span": list(ref.span),
        "status": ref.status,
    }


def ask_pipeline(
    state: ServiceState, user_query: str, max_docs: int | None = None
) -> dict[str, Any]:
    """Run retrieve + answer and shape the /ask response body.

    Captures the snapshot once so a concurrent re-ingest cannot change the
    documents mid-request. Raises StageError on gateway failure.
    """
    snapshot = state.snapshot
    if snapshot is None:
        raise RuntimeError("index not ready")
    retriever_config = state.config.retriever
    if max_docs is not None:
        retriever_config = RetrieverConfig(
            min_queries=retriever_config.min_queries,
            per_query_top_k=retriever_config.per_query_top_k,
            max_docs=max_docs,
        )

    timer = StageTimer()
    with timed(timer, "total"):
        retrieval: RetrievalSet = retrieve(
            user_query,
            snapshot,
            retriever_config,
            state.gateway,
            params=state.config.bm25,
            template=state.query_template,
            timer=timer,
        )
        result = answer(
            user_query,
            retrieval,
            snapshot,
            state.gateway,
            config=state.config.answer,
            assets=state.store.assets,
            template=state.answer_template,
            timer=timer,
        )

    return {
        "answer": result.rewritten_text,
        "raw_answer": result.raw_text,
        "references": [_reference_payload(r) for r in result.references],
        "external_links": list(result.external_links),
        "moments": [
            _moment_summary(snapshot.docs[moment_id], score)
            for moment_id, score in retrieval.items
        ],
        "queries": [q.keywords for q in retrieval.source_queries],
        "timings_ms": {k: round(v, 3) for k, v in timer.timings_ms.items()},
    }


class AskBody(BaseModel):
    query: str
    max_docs: int | None = None


class SearchBody(BaseModel):
    query: str
    top_k: int | None = None


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="vlqa")
    if state.config.cors_allowed_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(state.config.cors_allowed_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.post("/ask")
    def ask(body: AskBody) -> dict[str, Any]:
        if not body.query.strip():
            raise HTTPException(status_code=400, detail="query must be non-empty")
        if not state.ready:
            raise HTTPException(status_code=503, detail="index not ready")
        try:
            return ask_pipeline(state, body.query, body.max_docs)
        except StageError as exc:
            raise HTTPException(
                status_code=502,
                detail={"stage": exc.stage, "reason": str(exc.cause)},
            ) from exc

    @app.post("/search")
    def search_endpoint(body: SearchBody) -> list[dict[str, Any]]:
        if not body.query.strip():
            raise HTTPException(status_code=400, detail="query must be non-empty")
        if not state.ready:
            raise HTTPException(status_code=503, detail="index not ready")
        snapshot = state.snapshot
        assert snapshot is not None
        results = search(
            snapshot,
            SearchQuery(body.query),
            top_k=body.top_k if body.top_k is not None else 10,
            params=state.config.bm25,
        )
        return [_moment_summary(snapshot.docs[doc_id], score) for doc_id, score in results]

    @app.get("/moments/{moment_id}")
    def get_moment(moment_id: str) -> dict[str, Any]:
        snapshot = state.snapshot
        if snapshot is None:
            raise HTTPException(status_code=503, detail="index not ready")
        doc = snapshot.docs.get(moment_id)
        moment = state.store.moments.get(moment_id)
        if doc is None or moment is None:
            raise HTTPException(status_code=404, detail=f"unknown moment {moment_id!r}")
        asset = state.store.assets[moment.video_id]
        return {
            "document": {
                "doc_id": doc.doc_id,
                "video_id": doc.video_id,
                "video_title": doc.video_title,
                "t_in": doc.t_in,
                "t_out": doc.t_out,
                "transcript_text": doc.transcript_text,
                "captions_text": doc.captions_text,
                "speakers": list(doc.speakers),
            },
            "moment": moment_record(moment),
            "media_uri": asset.media_uri,
        }

    @app.get("/health")
    def health():
        if not state.ready:
            raise HTTPException(status_code=503, detail="library not loaded")
        return {
            "status": "ok",
            "docs": state.snapshot.doc_count if state.snapshot else 0,
            "generation": state.store.generation,
        }

    return app
