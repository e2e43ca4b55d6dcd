"""Core domain types: videos, moments, documents, queries, references.

Everything here is an immutable value object. Instances validate their own
invariants at construction time, so any object you hold is well-formed.
Cross-object invariants (moment inside its video, unique ids across a
library) are enforced at ingestion, see `vlqa.ingest`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from vlqa.errors import MismatchedVideoError

RefStatus = str  # "valid" | "unknown_video" | "out_of_bounds" | "not_retrieved"

REF_STATUSES = ("valid", "unknown_video", "out_of_bounds", "not_retrieved")


@dataclass(frozen=True, slots=True)
class VideoAsset:
    """One video file in the library."""

    video_id: str
    title: str
    duration: float
    media_uri: str | None = None

    def __post_init__(self) -> None:
        if not self.video_id:
            raise ValueError("video_id must be non-empty")
        if not self.duration > 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")


@dataclass(frozen=True, slots=True)
class TranscriptSegment:
    """One diarized, transcribed span of speech."""

    speaker_label: str
    t_start: float
    t_end: float
    text: str

    def __post_init__(self) -> None:
        if not (0 <= self.t_start < self.t_end):
            raise ValueError(
                f"segment needs 0 <= t_start < t_end, got [{self.t_start}, {self.t_end}]"
            )
        if not self.text:
            raise ValueError("segment text must be non-empty (empty segments are dropped)")


@dataclass(frozen=True, slots=True)
class FrameCaption:
    """Text description of a single frame."""

    t_frame: float
    caption: str

    def __post_init__(self) -> None:
        if not self.caption:
            raise ValueError("caption must be non-empty")


@dataclass(frozen=True, slots=True)
class VideoMoment:
    """A contiguous sub-interval of a video; the unit of retrieval.

    Transcript segments must lie within [t_in, t_out] and be sorted by
    t_start; captions must be sorted by t_frame and lie within the interval.
    """

    moment_id: str
    video_id: str
    t_in: float
    t_out: float
    transcript: tuple[TranscriptSegment, ...] = ()
    captions: tuple[FrameCaption, ...] = ()

    def __post_init__(self) -> None:
        if not self.moment_id:
            raise ValueError("moment_id must be non-empty")
        if not self.video_id:
            raise ValueError("video_id must be non-empty")
        if not (0 <= self.t_in < self.t_out):
            raise ValueError(
                f"moment needs 0 <= t_in < t_out, got [{self.t_in}, {self.t_out}]"
            )
        object.__setattr__(self, "transcript", tuple(self.transcript))
        object.__setattr__(self, "captions", tuple(self.captions))
        prev = None
        for seg in self.transcript:
            if seg.t_start < self.t_in or seg.t_end > self.t_out:
                raise ValueError(
                    f"segment [{seg.t_start}, {seg.t_end}] outside moment "
                    f"[{self.t_in}, {self.t_out}]"
                )
            if prev is not None and seg.t_start < prev:
                raise ValueError("transcript segments must be sorted by t_start")
            prev = seg.t_start
        prev = None
        for cap in self.captions:
            if not (self.t_in <= cap.t_frame <= self.t_out):
                raise ValueError(
                    f"caption at {cap.t_frame} outside moment [{self.t_in}, {self.t_out}]"
                )
            if prev is not None and cap.t_frame < prev:
                raise ValueError("captions must be sorted by t_frame")
            prev = cap.t_frame


@dataclass(frozen=True, slots=True)
class MomentDocument:
    """Flattened text rendering of a moment, as fed to the search index."""

    doc_id: str
    video_id: str
    video_title: str
    t_in: float
    t_out: float
    transcript_text: str
    captions_text: str
    speakers: tuple[str, ...]

    def indexed_text(self) -> str:
        """The single concatenated field the index sees."""
        return "\n".join((self.video_title, self.transcript_text, self.captions_text))


@dataclass(frozen=True, slots=True)
class SearchQuery:
    """A few space-separated keywords."""

    keywords: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "keywords", self.keywords.strip())
        if not self.keywords:
            raise ValueError("query keywords must be non-empty")


@dataclass(frozen=True, slots=True)
class RetrievalSet:
    """Merged, deduplicated, capped search results across generated queries.

    Items are (moment_id, score) sorted score-descending, ties broken by
    moment_id ascending.
    """

    items: tuple[tuple[str, float], ...]
    source_queries: tuple[SearchQuery, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "source_queries", tuple(self.source_queries))
        seen: set[str] = set()
        for i, (moment_id, score) in enumerate(self.items):
            if moment_id in seen:
                raise ValueError(f"duplicate moment_id in retrieval set: {moment_id}")
            seen.add(moment_id)
            if i > 0:
                prev_id, prev_score = self.items[i - 1]
                if score > prev_score or (score == prev_score and moment_id < prev_id):
                    raise ValueError("items must be sorted by (score desc, moment_id asc)")

    def moment_ids(self) -> list[str]:
        return [moment_id for moment_id, _ in self.items]

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True, slots=True)
class MomentReference:
    """A parsed `[video_id](timestamp_in;timestamp_out)` citation.

    `span` is the (start, end) character offsets of the citation inside the
    answer text. `status` is None until `validate_references` assigns one.
    """

    video_id: str
    timestamp_in: float
    timestamp_out: float
    span: tuple[int, int]
    status: RefStatus | None = None

    def __post_init__(self) -> None:
        if not self.timestamp_in < self.timestamp_out:
            raise ValueError(
                f"reference needs timestamp_in < timestamp_out, got "
                f"({self.timestamp_in}; {self.timestamp_out})"
            )
        if self.status is not None and self.status not in REF_STATUSES:
            raise ValueError(f"unknown reference status: {self.status}")


@dataclass(frozen=True, slots=True)
class Answer:
    """Final answer: raw model text, link-rewritten text, and its citations."""

    raw_text: str
    rewritten_text: str
    references: tuple[MomentReference, ...]
    external_links: tuple[str, ...] = ()
    timings: dict[str, float] = field(default_factory=dict)


def build_document(moment: VideoMoment, asset: VideoAsset) -> MomentDocument:
    """Render a moment as the text document the index consumes.

    Pure and deterministic: the same moment always yields byte-identical
    text. Transcript lines are "speaker_label: text", captions one per line,
    speakers deduplicated in first-appearance order.
    """
    if moment.video_id != asset.video_id:
        raise MismatchedVideoError(
            f"moment {moment.moment_id} belongs to {moment.video_id!r}, "
            f"not {asset.video_id!r}"
        )
    transcript_text = "\n".join(
        f"{seg.speaker_label}: {seg.text}" for seg in moment.transcript
    )
    captions_text = "\n".join(cap.caption for cap in moment.captions)
    speakers: list[str] = []
    for seg in moment.transcript:
        if seg.speaker_label not in speakers:
            speakers.append(seg.speaker_label)
    return MomentDocument(
        doc_id=moment.moment_id,
        video_id=moment.video_id,
        video_title=asset.title,
        t_in=moment.t_in,
        t_out=moment.t_out,
        transcript_text=transcript_text,
        captions_text=captions_text,
        speakers=tuple(speakers),
    )
