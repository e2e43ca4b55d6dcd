"""Question answering over large video libraries.

An LLM turns a question into keyword queries, a BM25 index over moment
metadata (titles, speech transcripts, frame captions) retrieves candidate
moments, and a second LLM call writes an answer citing moments as
`[video_id](timestamp_in;timestamp_out)`; citations are validated against
the library and the retrieval set before becoming hyperlinks.
"""

from vlqa.answer import (
    AnswerConfig,
    answer,
    build_answer_prompt,
    parse_references,
    rewrite_links,
    serialize_reference,
    validate_references,
)
from vlqa.gateway import (
    ChatMessage,
    ChatRequest,
    ChatResponse,
    HttpLlmGateway,
    ScriptedLlmGateway,
)
from vlqa.index import (
    Bm25Params,
    EmbeddedSearchIndex,
    IndexSnapshot,
    SearchBackend,
    build_index,
    search,
    tokenize,
)
from vlqa.ingest import (
    LibraryStore,
    build_documents,
    derive_moments_from_splits,
    load_library,
    write_library,
)
from vlqa.model import (
    Answer,
    FrameCaption,
    MomentDocument,
    MomentReference,
    RetrievalSet,
    SearchQuery,
    TranscriptSegment,
    VideoAsset,
    VideoMoment,
    build_document,
)
from vlqa.retriever import RetrieverConfig, generate_queries, parse_query_lines, retrieve
from vlqa.scenesplit import FrameFeature, SplitConfig, content_value, split

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "AnswerConfig",
    "Bm25Params",
    "ChatMessage",
    "ChatRequest",
    "ChatResponse",
    "EmbeddedSearchIndex",
    "SearchBackend",
    "FrameCaption",
    "FrameFeature",
    "HttpLlmGateway",
    "IndexSnapshot",
    "LibraryStore",
    "MomentDocument",
    "MomentReference",
    "RetrievalSet",
    "RetrieverConfig",
    "ScriptedLlmGateway",
    "SearchQuery",
    "SplitConfig",
    "TranscriptSegment",
    "VideoAsset",
    "VideoMoment",
    "answer",
    "build_answer_prompt",
    "build_document",
    "build_documents",
    "build_index",
    "content_value",
    "derive_moments_from_splits",
    "generate_queries",
    "load_library",
    "parse_query_lines",
    "parse_references",
    "retrieve",
    "rewrite_links",
    "search",
    "serialize_reference",
    "split",
    "tokenize",
    "validate_references",
    "write_library",
]
