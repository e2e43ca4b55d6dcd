"""Library ingestion: JSONL interchange formats, validation, and the store.

Source of truth is a pair of line-delimited JSON files:

    videos.jsonl   {"video_id", "title", "duration", "media_uri"?}
    moments.jsonl  {"moment_id", "video_id", "t_in", "t_out",
                    "transcript": [{"speaker","t_start","t_end","text"}, ...],
                    "captions":   [{"t_frame","caption"}, ...]}

Lenient loading skips invalid lines and reports them as diagnostics; strict
loading aborts on the first invalid line. Transcript segments with empty
text are dropped during ingestion in both modes (they are never stored).
The store itself is in-memory; the index snapshot, not the store, serves
queries.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from vlqa.errors import NonTilingSplitsError, StrictValidationError
from vlqa.model import (
    FrameCaption,
    MomentDocument,
    TranscriptSegment,
    VideoAsset,
    VideoMoment,
    build_document,
)

_VIDEO_REQUIRED = ("video_id", "title", "duration")
_VIDEO_OPTIONAL = ("media_uri",)
_MOMENT_REQUIRED = ("moment_id", "video_id", "t_in", "t_out", "transcript", "captions")
_SEGMENT_KEYS = ("speaker", "t_start", "t_end", "text")
_CAPTION_KEYS = ("t_frame", "caption")

_TILE_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class IngestDiagnostic:
    path: str
    line_no: int
    reason: str

    def __str__(self) -> str:
        return f"{self.path}:{self.line_no}: {self.reason}"


@dataclass
class LibraryStore:
    """In-memory library; single writer, readers see a consistent generation."""

    assets: dict[str, VideoAsset] = field(default_factory=dict)
    moments: dict[str, VideoMoment] = field(default_factory=dict)
    generation: int = 0

    def replace_contents(
        self, assets: dict[str, VideoAsset], moments: dict[str, VideoMoment]
    ) -> None:
        self.assets = assets
        self.moments = moments
        self.generation += 1


class _LineError(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _require_number(obj: dict, key: str) -> float:
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise _LineError(f"{key} must be a number")
    return float(v)


def _require_str(obj: dict, key: str) -> str:
    v = obj.get(key)
    if not isinstance(v, str):
        raise _LineError(f"{key} must be a string")
    return v


def _check_keys(obj: dict, required: Sequence[str], optional: Sequence[str], strict: bool) -> None:
    for key in required:
        if key not in obj:
            raise _LineError(f"missing key {key!r}")
    if strict:
        unknown = set(obj) - set(required) - set(optional)
        if unknown:
            raise _LineError(f"unknown keys {sorted(unknown)}")


def _parse_video(obj: dict, strict: bool) -> VideoAsset:
    _check_keys(obj, _VIDEO_REQUIRED, _VIDEO_OPTIONAL, strict)
    duration = _require_number(obj, "duration")
    if duration <= 0:
        raise _LineError("duration must be > 0")
    media_uri = obj.get("media_uri")
    if media_uri is not None and not isinstance(media_uri, str):
        raise _LineError("media_uri must be a string")
    video_id = _require_str(obj, "video_id")
    if not video_id:
        raise _LineError("video_id must be non-empty")
    return VideoAsset(
        video_id=video_id,
        title=_require_str(obj, "title"),
        duration=duration,
        media_uri=media_uri,
    )


def _parse_moment(
    obj: dict, assets: dict[str, VideoAsset], strict: bool
) -> tuple[VideoMoment, int]:
    """Returns the moment and the count of dropped empty-text segments."""
    _check_keys(obj, _MOMENT_REQUIRED, (), strict)
    moment_id = _require_str(obj, "moment_id")
    video_id = _require_str(obj, "video_id")
    asset = assets.get(video_id)
    if asset is None:
        raise _LineError(f"unknown video {video_id!r}")
    t_in = _require_number(obj, "t_in")
    t_out = _require_number(obj, "t_out")
    if not (0 <= t_in < t_out):
        raise _LineError(f"need 0 <= t_in < t_out, got [{t_in}, {t_out}]")
    if t_out > asset.duration:
        raise _LineError(
            f"t_out {t_out} exceeds duration {asset.duration} of video {video_id!r}"
        )

    raw_transcript = obj.get("transcript")
    raw_captions = obj.get("captions")
    if not isinstance(raw_transcript, list) or not isinstance(raw_captions, list):
        raise _LineError("transcript and captions must be arrays")

    segments: list[TranscriptSegment] = []
    dropped = 0
    for entry in raw_transcript:
        if not isinstance(entry, dict):
            raise _LineError("transcript entries must be objects")
        _check_keys(entry, _SEGMENT_KEYS, (), strict)
        text = _require_str(entry, "text")
        if not text:
            dropped += 1
            continue
        segments.append(
            TranscriptSegment(
                speaker_label=_require_str(entry, "speaker"),
                t_start=_require_number(entry, "t_start"),
                t_end=_require_number(entry, "t_end"),
                text=text,
            )
        )

    captions: list[FrameCaption] = []
    for entry in raw_captions:
        if not isinstance(entry, dict):
            raise _LineError("caption entries must be objects")
        _check_keys(entry, _CAPTION_KEYS, (), strict)
        captions.append(
            FrameCaption(
                t_frame=_require_number(entry, "t_frame"),
                caption=_require_str(entry, "caption"),
            )
        )

    moment = VideoMoment(
        moment_id=moment_id,
        video_id=video_id,
        t_in=t_in,
        t_out=t_out,
        transcript=tuple(segments),
        captions=tuple(captions),
    )
    return moment, dropped


def _iter_jsonl(path: str | Path) -> Iterable[tuple[int, str]]:
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            yield line_no, line


def load_library(
    videos_path: str | Path,
    moments_path: str | Path,
    strict: bool = False,
) -> tuple[LibraryStore, list[IngestDiagnostic]]:
    """Load and validate a library from its JSONL files."""
    diagnostics: list[IngestDiagnostic] = []

    def invalid(path: str | Path, line_no: int, reason: str) -> None:
        if strict:
            raise StrictValidationError(str(path), line_no, reason)
        diagnostics.append(IngestDiagnostic(str(path), line_no, reason))

    assets: dict[str, VideoAsset] = {}
    for line_no, raw in _iter_jsonl(videos_path):
        try:
            obj = json.loads(raw)
            if not isinstance(obj, dict):
                raise _LineError("record must be a JSON object")
            asset = _parse_video(obj, strict)
            if asset.video_id in assets:
                raise _LineError(f"duplicate video_id {asset.video_id!r}")
            assets[asset.video_id] = asset
        except json.JSONDecodeError as exc:
            invalid(videos_path, line_no, f"invalid JSON: {exc.msg}")
        except (_LineError, ValueError) as exc:
            invalid(videos_path, line_no, str(exc))

    moments: dict[str, VideoMoment] = {}
    for line_no, raw in _iter_jsonl(moments_path):
        try:
            obj = json.loads(raw)
            if not isinstance(obj, dict):
                raise _LineError("record must be a JSON object")
            moment, dropped = _parse_moment(obj, assets, strict)
            if moment.moment_id in moments:
                raise _LineError(f"duplicate moment_id {moment.moment_id!r}")
            moments[moment.moment_id] = moment
            if dropped:
                diagnostics.append(
                    IngestDiagnostic(
                        str(moments_path),
                        line_no,
                        f"dropped {dropped} empty transcript segment(s)",
                    )
                )
        except json.JSONDecodeError as exc:
            invalid(moments_path, line_no, f"invalid JSON: {exc.msg}")
        except (_LineError, ValueError) as exc:
            invalid(moments_path, line_no, str(exc))

    store = LibraryStore()
    store.replace_contents(assets, moments)
    return store, diagnostics


def video_record(asset: VideoAsset) -> dict:
    record: dict = {
        "video_id": asset.video_id,
        "title": asset.title,
        "duration": asset.duration,
    }
    if asset.media_uri is not None:
        record["media_uri"] = asset.media_uri
    return record


def moment_record(moment: VideoMoment) -> dict:
    return {
        "moment_id": moment.moment_id,
        "video_id": moment.video_id,
        "t_in": moment.t_in,
        "t_out": moment.t_out,
        "transcript": [
            {
                "speaker": seg.speaker_label,
                "t_start": seg.t_start,
                "t_end": seg.t_end,
                "text": seg.text,
            }
            for seg in moment.transcript
        ],
        "captions": [
            {"t_frame": cap.t_frame, "caption": cap.caption} for cap in moment.captions
        ],
    }


def write_library(
    store: LibraryStore, videos_path: str | Path, moments_path: str | Path
) -> None:
    """Serialize the store canonically: id-sorted records, LF-terminated."""
    with open(videos_path, "w", encoding="utf-8", newline="\n") as f:
        for video_id in sorted(store.assets):
            f.write(json.dumps(video_record(store.assets[video_id]), ensure_ascii=False))
            f.write("\n")
    with open(moments_path, "w", encoding="utf-8", newline="\n") as f:
        for moment_id in sorted(store.moments):
            f.write(json.dumps(moment_record(store.moments[moment_id]), ensure_ascii=False))
            f.write("\n")


def build_documents(store: LibraryStore) -> list[MomentDocument]:
    """Render every stored moment as an indexable document, id order."""
    return [
        build_document(store.moments[moment_id], store.assets[store.moments[moment_id].video_id])
        for moment_id in sorted(store.moments)
    ]


@dataclass(frozen=True, slots=True)
class MomentSkeleton:
    """A moment-to-be produced by splitting: timing, assigned speech, and
    caption slots awaiting text from an external captioner.

    Segments keep their original timing, so one near a boundary may overhang
    its moment's interval; midpoint assignment still puts it in exactly one
    skeleton.
    """

    moment_id: str
    video_id: str
    t_in: float
    t_out: float
    transcript: tuple[TranscriptSegment, ...]
    caption_slots: tuple[float, ...]


def derive_moments_from_splits(
    video: VideoAsset,
    splits: Sequence[tuple[float, float]],
    transcript: Sequence[TranscriptSegment] = (),
    captions_per_moment: int = 3,
) -> list[MomentSkeleton]:
    """One skeleton per split interval.

    Splits must tile [0, duration]. Each transcript segment goes to the
    moment containing its midpoint; a midpoint exactly on a boundary goes to
    the later moment. Caption slots sit at the midpoints of
    `captions_per_moment` equal cells of each interval.
    """
    if captions_per_moment < 0:
        raise ValueError("captions_per_moment must be >= 0")
    if not splits:
        raise NonTilingSplitsError("no split intervals")
    if abs(splits[0][0]) > _TILE_TOL:
        raise NonTilingSplitsError(f"first interval starts at {splits[0][0]}, not 0")
    if abs(splits[-1][1] - video.duration) > _TILE_TOL:
        raise NonTilingSplitsError(
            f"last interval ends at {splits[-1][1]}, not duration {video.duration}"
        )
    for (a_in, a_out), (b_in, _b_out) in zip(splits, splits[1:]):
        if abs(a_out - b_in) > _TILE_TOL:
            raise NonTilingSplitsError(f"gap between {a_out} and {b_in}")
    for t_in, t_out in splits:
        if not t_in < t_out:
            raise NonTilingSplitsError(f"degenerate interval [{t_in}, {t_out}]")

    starts = [t_in for t_in, _ in splits]
    assigned: list[list[TranscriptSegment]] = [[] for _ in splits]
    for seg in transcript:
        midpoint = (seg.t_start + seg.t_end) / 2.0
        # rightmost interval whose start <= midpoint; an exact boundary hit
        # therefore lands in the later moment
        k = min(bisect_right(starts, midpoint) - 1, len(splits) - 1)
        assigned[max(k, 0)].append(seg)

    skeletons: list[MomentSkeleton] = []
    n = captions_per_moment
    for k, (t_in, t_out) in enumerate(splits):
        slots = tuple(t_in + (i + 0.5) * (t_out - t_in) / n for i in range(n))
        skeletons.append(
            MomentSkeleton(
                moment_id=f"{video.video_id}_m{k:04d}",
                video_id=video.video_id,
                t_in=t_in,
                t_out=t_out,
                transcript=tuple(assigned[k]),
                caption_slots=slots,
            )
        )
    return skeletons
