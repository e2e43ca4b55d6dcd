"""Query generation and multi-query retrieval.

The LLM is asked for at least `min_queries` keyword queries, one per line;
each query is searched independently and results are merged by taking the
maximum score a document earned across queries (robust to near-duplicate
queries), then capped at `max_docs`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from vlqa.errors import GatewayError, NoQueriesGeneratedError, StageError
from vlqa.gateway import ChatMessage, ChatRequest, LlmGateway
from vlqa.index import Bm25Params, EmbeddedSearchIndex, IndexSnapshot, SearchBackend
from vlqa.model import RetrievalSet, SearchQuery
from vlqa.prompts import PromptTemplate, load_template
from vlqa.timing import StageTimer, timed

_LIST_MARKER_RE = re.compile(r"^\s*(?:\d+\s*[.)]\s*|[-*]+\s+|[-*]+$)+")


@dataclass(frozen=True, slots=True)
class RetrieverConfig:
    min_queries: int = 5
    per_query_top_k: int = 20
    max_docs: int = 50

    def __post_init__(self) -> None:
        if self.min_queries < 1:
            raise ValueError("min_queries must be >= 1")
        if self.per_query_top_k < 1:
            raise ValueError("per_query_top_k must be >= 1")
        if self.max_docs < 1:
            raise ValueError("max_docs must be >= 1")


def parse_query_lines(raw: str) -> list[SearchQuery]:
    """Extract queries from model output, one per line.

    Strips leading list markers (digits with dot/paren, dashes, asterisks)
    and surrounding quotes, drops empty lines, and deduplicates
    case-insensitively keeping first occurrences.
    """
    queries: list[SearchQuery] = []
    seen: set[str] = set()
    for line in raw.splitlines():
        line = _LIST_MARKER_RE.sub("", line.strip()).strip()
        if len(line) >= 2 and line[0] == line[-1] and line[0] in "\"'":
            line = line[1:-1].strip()
        if not line:
            continue
        key = line.casefold()
        if key in seen:
            continue
        seen.add(key)
        queries.append(SearchQuery(line))
    return queries


def generate_queries(
    user_query: str,
    config: RetrieverConfig,
    gateway: LlmGateway,
    template: PromptTemplate | None = None,
) -> list[SearchQuery]:
    """Ask the model for keyword queries; retry once on under-generation.

    Returns whatever queries were obtained (at least one); proceeding with
    fewer than `min_queries` beats failing the whole request.
    """
    if not user_query.strip():
        raise ValueError("user_query must be non-empty")
    template = template or load_template("querygen")

    def ask(extra: str = "") -> list[SearchQuery]:
        user = template.render_user(
            user_query=user_query, min_queries=config.min_queries
        )
        request = ChatRequest(
            messages=(
                ChatMessage("system", template.system),
                ChatMessage("user", user + extra),
            )
        )
        return parse_query_lines(gateway.complete(request).content)

    queries = ask()
    if len(queries) < config.min_queries:
        retry = ask(
            f"\nYou wrote too few queries. Write at least {config.min_queries} "
            "distinct queries, one per line."
        )
        if len(retry) > len(queries):
            queries = retry
    if not queries:
        raise NoQueriesGeneratedError(
            "model produced no parseable search queries after one retry"
        )
    return queries


def merge_results(
    per_query: list[list[tuple[str, float]]], max_docs: int
) -> list[tuple[str, float]]:
    """Max-score fusion across result lists, capped at max_docs.

    Order-invariant: max is commutative and the (score desc, id asc) sort is
    total, so the merge result does not depend on which list came first.
    """
    best: dict[str, float] = {}
    for results in per_query:
        for doc_id, score in results:
            if score > best.get(doc_id, float("-inf")):
                best[doc_id] = score
    ranked = sorted(best.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:max_docs]


def retrieve(
    user_query: str,
    index: IndexSnapshot | SearchBackend,
    config: RetrieverConfig,
    gateway: LlmGateway,
    params: Bm25Params = Bm25Params(),
    template: PromptTemplate | None = None,
    timer: StageTimer | None = None,
) -> RetrievalSet:
    """Generate queries, fan out searches, and merge into a capped set.

    `index` is usually the embedded snapshot (ranked with `params`); any
    other SearchBackend is used as-is.
    """
    backend: SearchBackend = (
        EmbeddedSearchIndex(index, params) if isinstance(index, IndexSnapshot) else index
    )
    with timed(timer, "query_generation"):
        try:
            queries = generate_queries(user_query, config, gateway, template)
        except GatewayError as exc:
            raise StageError("query_generation", exc) from exc
    with timed(timer, "search"):
        per_query = [backend.search(q, config.per_query_top_k) for q in queries]
        items = merge_results(per_query, config.max_docs)
    return RetrievalSet(items=tuple(items), source_queries=tuple(queries))
