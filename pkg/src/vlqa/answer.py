"""Answer generation: prompt assembly, reference parsing, grounding checks,
and hyperlink rewriting.

The citation grammar is normative for every component, including any UI:

    "[" ID "](" NUM ";" NUM ")"
    ID  = one or more characters excluding "[", "]", "(", ")" and newline
    NUM = digits, optionally "." digits

A parsed reference is validated against the library and the retrieval set:
citations of unknown videos, out-of-bounds intervals, or intervals that
overlap no retrieved moment are kept in the text but flagged, never turned
into links. Bare web URLs in the answer are collected separately; a model
that links to the open web instead of the provided moments is the failure
mode this guards against.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace
from decimal import Decimal
from typing import Mapping, Sequence

from vlqa.errors import GatewayError, StageError, UnknownDocIdError
from vlqa.gateway import ChatMessage, ChatRequest, LlmGateway
from vlqa.index import IndexSnapshot
from vlqa.model import Answer, MomentReference, RetrievalSet, VideoAsset
from vlqa.prompts import PromptTemplate, load_template
from vlqa.timing import StageTimer, timed

logger = logging.getLogger(__name__)

REFERENCE_RE = re.compile(
    r"\[([^\[\]()\n]+)\]\((\d+(?:\.\d+)?);(\d+(?:\.\d+)?)\)"
)
_URL_RE = re.compile(r"https?://\S+")
_URL_TRAILING = ").,;:!?]\"'"


@dataclass(frozen=True, slots=True)
class AnswerConfig:
    link_base_url: str = "vlqa://moment"
    max_context_docs: int = 50
    require_grounding: bool = True

    def __post_init__(self) -> None:
        if self.max_context_docs < 1:
            raise ValueError("max_context_docs must be >= 1")


def format_timestamp(value: float) -> str:
    """Minimal decimal rendering: no trailing zeros, never an exponent."""
    if value == int(value):
        return str(int(value))
    s = repr(value)
    if "e" in s or "E" in s:
        s = format(Decimal(value), "f")
    return s


def serialize_reference(ref: MomentReference) -> str:
    return (
        f"[{ref.video_id}]"
        f"({format_timestamp(ref.timestamp_in)};{format_timestamp(ref.timestamp_out)})"
    )


def parse_references(
    answer_text: str, diagnostics: list[str] | None = None
) -> list[MomentReference]:
    """Scan answer text for citations, left to right, non-overlapping.

    Malformed near-matches are left in the text and ignored. Inverted
    intervals are rejected here (with a diagnostic) so every reference
    object satisfies timestamp_in < timestamp_out unconditionally.
    """
    refs: list[MomentReference] = []
    for m in REFERENCE_RE.finditer(answer_text):
        t_in, t_out = float(m.group(2)), float(m.group(3))
        if not t_in < t_out:
            note = f"rejected reference {m.group(0)!r} at {m.start()}: interval not increasing"
            logger.debug(note)
            if diagnostics is not None:
                diagnostics.append(note)
            continue
        refs.append(
            MomentReference(
                video_id=m.group(1),
                timestamp_in=t_in,
                timestamp_out=t_out,
                span=m.span(),
            )
        )
    return refs


def extract_external_links(
    answer_text: str, reference_spans: Sequence[tuple[int, int]] = ()
) -> tuple[str, ...]:
    """Web URLs in the text that are not part of a moment reference."""
    links: list[str] = []
    for m in _URL_RE.finditer(answer_text):
        if any(s <= m.start() < e for s, e in reference_spans):
            continue
        url = m.group(0).rstrip(_URL_TRAILING)
        if url and url not in links:
            links.append(url)
    return tuple(links)


def _intervals_overlap(a_in: float, a_out: float, b_in: float, b_out: float) -> bool:
    return max(a_in, b_in) < min(a_out, b_out)


def build_answer_prompt(
    user_query: str,
    retrieval: RetrievalSet,
    snapshot: IndexSnapshot,
    config: AnswerConfig = AnswerConfig(),
    template: PromptTemplate | None = None,
) -> ChatRequest:
    """Assemble the final prompt: question plus one metadata block per
    retrieved moment, in retrieval order, capped at max_context_docs."""
    template = template or load_template("answergen")
    blocks: list[str] = []
    for i, (moment_id, _score) in enumerate(retrieval.items[: config.max_context_docs]):
        doc = snapshot.docs.get(moment_id)
        if doc is None:
            raise UnknownDocIdError(f"retrieval item {moment_id!r} not in snapshot")
        blocks.append(
            "\n".join(
                (
                    f"Moment {i + 1}:",
                    f"doc_id: {doc.doc_id}",
                    f"video_id: {doc.video_id}",
                    f"title: {doc.video_title}",
                    f"interval: {format_timestamp(doc.t_in)};{format_timestamp(doc.t_out)}",
                    "transcript:",
                    doc.transcript_text,
                    "captions:",
                    doc.captions_text,
                )
            )
        )
    if blocks:
        context = "\n\n".join(blocks)
    else:
        context = (
            "No moments were retrieved for this question. "
            "State that no relevant footage was found."
        )
    return ChatRequest(
        messages=(
            ChatMessage("system", template.system),
            ChatMessage("user", template.render_user(user_query=user_query, context=context)),
        )
    )


def validate_references(
    refs: Sequence[MomentReference],
    retrieval: RetrievalSet,
    assets: Mapping[str, VideoAsset],
    snapshot: IndexSnapshot,
    require_grounding: bool = True,
) -> list[MomentReference]:
    """Assign a status to each reference.

    unknown_video: the cited video is not in the library.
    out_of_bounds: the interval does not fit inside [0, duration].
    not_retrieved: grounding is required and the interval overlaps no
        retrieved moment of that video.
    valid: everything checks out; only these become hyperlinks.
    """
    retrieved_by_video: dict[str, list[tuple[float, float]]] = {}
    for moment_id, _score in retrieval.items:
        doc = snapshot.docs.get(moment_id)
        if doc is not None:
            retrieved_by_video.setdefault(doc.video_id, []).append((doc.t_in, doc.t_out))

    out: list[MomentReference] = []
    for ref in refs:
        asset = assets.get(ref.video_id)
        if asset is None:
            status = "unknown_video"
        elif not (0 <= ref.timestamp_in and ref.timestamp_out <= asset.duration):
            status = "out_of_bounds"
        elif require_grounding and not any(
            _intervals_overlap(ref.timestamp_in, ref.timestamp_out, t_in, t_out)
            for t_in, t_out in retrieved_by_video.get(ref.video_id, ())
        ):
            status = "not_retrieved"
        else:
            status = "valid"
        out.append(replace(ref, status=status))
    return out


def rewrite_links(
    raw_text: str,
    references: Sequence[MomentReference],
    assets: Mapping[str, VideoAsset],
    config: AnswerConfig = AnswerConfig(),
) -> str:
    """Replace each valid reference span with a markdown hyperlink.

    Invalid references stay byte-for-byte as the model wrote them.
    Replacement runs right to left so earlier spans stay valid while later
    ones are rewritten.
    """
    text = raw_text
    for ref in sorted(references, key=lambda r: r.span[0], reverse=True):
        if ref.status != "valid":
            continue
        t_in, t_out = format_timestamp(ref.timestamp_in), format_timestamp(ref.timestamp_out)
        title = assets[ref.video_id].title
        link = (
            f"[{title} ({t_in}–{t_out}s)]"
            f"({config.link_base_url}/{ref.video_id}?in={t_in}&out={t_out})"
        )
        start, end = ref.span
        text = text[:start] + link + text[end:]
    return text


def answer(
    user_query: str,
    retrieval: RetrievalSet,
    snapshot: IndexSnapshot,
    gateway: LlmGateway,
    config: AnswerConfig = AnswerConfig(),
    assets: Mapping[str, VideoAsset] | None = None,
    template: PromptTemplate | None = None,
    timer: StageTimer | None = None,
) -> Answer:
    """Full answer pipeline: prompt, completion, parse, validate, rewrite."""
    assets = assets or {}
    timer = timer or StageTimer()
    with timed(timer, "answer_prompt"):
        request = build_answer_prompt(user_query, retrieval, snapshot, config, template)
    with timed(timer, "answer_llm"):
        try:
            response = gateway.complete(request)
        except GatewayError as exc:
            raise StageError("answer_generation", exc) from exc
    with timed(timer, "reference_check"):
        refs = validate_references(
            parse_references(response.content),
            retrieval,
            assets,
            snapshot,
            config.require_grounding,
        )
        links = extract_external_links(response.content, [r.span for r in refs])
        rewritten = rewrite_links(response.content, refs, assets, config)
    return Answer(
        raw_text=response.content,
        rewritten_text=rewritten,
        references=tuple(refs),
        external_links=links,
        timings=dict(timer.timings_ms),
    )
