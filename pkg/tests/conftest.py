from __future__ import annotations

import itertools
import json
from pathlib import Path

import pytest

from vlqa.gateway import ScriptedLlmGateway
from vlqa.index import IndexSnapshot, build_index
from vlqa.ingest import LibraryStore, build_documents
from vlqa.model import FrameCaption, TranscriptSegment, VideoAsset, VideoMoment


def tiny_assets() -> dict[str, VideoAsset]:
    return {
        a.video_id: a
        for a in (
            VideoAsset("V001", "Apollo 11 Launch Coverage", 300.0, "https://media.example/v001.mp4"),
            VideoAsset("V002", "Life Aboard the Station", 240.0),
            VideoAsset("V003", "Rover Test Drive", 120.0),
        )
    }


def tiny_moments() -> dict[str, VideoMoment]:
    moments = [
        VideoMoment(
            "V001_m0",
            "V001",
            0.0,
            30.0,
            transcript=(
                TranscriptSegment("SPEAKER_00", 5.0, 10.0, "ignition sequence start"),
                TranscriptSegment("SPEAKER_01", 12.0, 20.0, "liftoff of the giant rocket"),
            ),
            captions=(
                FrameCaption(10.0, "rocket on launch pad"),
                FrameCaption(20.0, "engines igniting with smoke"),
            ),
        ),
        VideoMoment(
            "V001_m1",
            "V001",
            30.0,
            90.0,
            transcript=(
                TranscriptSegment("SPEAKER_00", 35.0, 50.0, "the rocket clears the tower"),
            ),
            captions=(FrameCaption(45.0, "rocket ascending into sky"),),
        ),
        VideoMoment(
            "V002_m0",
            "V002",
            0.0,
            60.0,
            transcript=(
                TranscriptSegment(
                    "SPEAKER_02", 5.0, 30.0, "today we show how astronauts prepare meals"
                ),
            ),
            captions=(
                FrameCaption(20.0, "astronaut opening food container"),
                FrameCaption(40.0, "floating tortilla in cabin"),
            ),
        ),
        # no speech at all; retrievable through captions only
        VideoMoment(
            "V002_m1",
            "V002",
            60.0,
            120.0,
            captions=(
                FrameCaption(80.0, "astronaut eating a tortilla"),
                FrameCaption(100.0, "crumbs floating in microgravity"),
            ),
        ),
        VideoMoment(
            "V003_m0",
            "V003",
            0.0,
            120.0,
            transcript=(
                TranscriptSegment(
                    "SPEAKER_03", 10.0, 115.0, "driving the rover across the dusty plain"
                ),
            ),
            captions=(FrameCaption(60.0, "rover wheels kicking up dust"),),
        ),
    ]
    return {m.moment_id: m for m in moments}


@pytest.fixture
def tiny_store() -> LibraryStore:
    store = LibraryStore()
    store.replace_contents(tiny_assets(), tiny_moments())
    return store


@pytest.fixture
def tiny_snapshot(tiny_store: LibraryStore) -> IndexSnapshot:
    return build_index(build_documents(tiny_store))


def write_tiny_library(directory: Path) -> tuple[Path, Path]:
    """Write the tiny fixture library as JSONL files, returning the paths."""
    from vlqa.ingest import moment_record, video_record

    videos_path = directory / "videos.jsonl"
    moments_path = directory / "moments.jsonl"
    with open(videos_path, "w", encoding="utf-8") as f:
        for asset in tiny_assets().values():
            f.write(json.dumps(video_record(asset)) + "\n")
    with open(moments_path, "w", encoding="utf-8") as f:
        for moment in tiny_moments().values():
            f.write(json.dumps(moment_record(moment)) + "\n")
    return videos_path, moments_path


FIVE_QUERIES = "\n".join(
    [
        "rocket launch pad",
        "astronaut eating tortilla",
        "rover dust plain",
        "liftoff tower",
        "astronauts prepare meals",
    ]
)


@pytest.fixture
def scripted_gateway() -> ScriptedLlmGateway:
    """Gateway scripted for the tiny library: sane queries, grounded answer."""
    gateway = ScriptedLlmGateway()
    gateway.register("QUERYGEN", FIVE_QUERIES)
    gateway.register(
        "ANSWERGEN",
        "For launch footage use [V001](0;30). Eating shots: [V002](60;120).",
    )
    return gateway


@pytest.fixture
def fixed_clock(monkeypatch: pytest.MonkeyPatch):
    """Deterministic clock: each read advances exactly 1 ms."""
    counter = itertools.count()

    def fake_now() -> float:
        return next(counter) * 0.001

    monkeypatch.setattr("vlqa.timing.now", fake_now)
    return fake_now
