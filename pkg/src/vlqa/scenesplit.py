"""Content-aware splitting of a video into moments.

Works on per-frame HSV channel means produced by any external frame
extractor; no media decoding happens here. A cut is declared where the mean
absolute HSV delta between adjacent frames crosses a threshold, subject to a
minimum scene length in frames.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from vlqa.errors import EmptyInputError, UnsortedFramesError
from vlqa.model import VideoAsset

FRAME_CSV_HEADER = ["frame_index", "t", "h_mean", "s_mean", "v_mean"]


@dataclass(frozen=True, slots=True)
class FrameFeature:
    """Channel means of one decoded frame."""

    frame_index: int
    t: float
    h_mean: float
    s_mean: float
    v_mean: float

    def __post_init__(self) -> None:
        if self.frame_index < 0:
            raise ValueError("frame_index must be >= 0")
        for name in ("h_mean", "s_mean", "v_mean"):
            v = getattr(self, name)
            if not (0.0 <= v <= 255.0):
                raise ValueError(f"{name} must be in [0, 255], got {v}")


@dataclass(frozen=True, slots=True)
class SplitConfig:
    threshold: float = 27.0
    min_scene_len: int = 15

    def __post_init__(self) -> None:
        if not self.threshold > 0:
            raise ValueError("threshold must be > 0")
        if self.min_scene_len < 1:
            raise ValueError("min_scene_len must be >= 1")


def content_value(prev: FrameFeature, cur: FrameFeature) -> float:
    """Mean absolute HSV channel delta between two frames."""
    return (
        abs(cur.h_mean - prev.h_mean)
        + abs(cur.s_mean - prev.s_mean)
        + abs(cur.v_mean - prev.v_mean)
    ) / 3.0


def split(
    frames: Sequence[FrameFeature],
    config: SplitConfig,
    video: VideoAsset,
) -> list[tuple[float, float]]:
    """Cut a frame sequence into contiguous (t_in, t_out) intervals.

    A cut lands before frame i when content_value(frames[i-1], frames[i])
    reaches the threshold and the scene being built already spans at least
    min_scene_len frames. The returned intervals tile
    [frames[0].t, video.duration]; only the last scene may be shorter than
    min_scene_len frames.
    """
    if not frames:
        raise EmptyInputError("cannot split an empty frame sequence")
    for a, b in zip(frames, frames[1:]):
        if b.frame_index <= a.frame_index:
            raise UnsortedFramesError(
                f"frame_index must strictly increase ({a.frame_index} -> {b.frame_index})"
            )
        if b.t < a.t:
            raise UnsortedFramesError(f"frame t must be non-decreasing ({a.t} -> {b.t})")
    if frames[-1].t > video.duration:
        raise ValueError(
            f"last frame at t={frames[-1].t} is past video duration {video.duration}"
        )

    cut_times: list[float] = []
    last_cut = 0  # index into frames of the first frame of the current scene
    for i in range(1, len(frames)):
        if (
            content_value(frames[i - 1], frames[i]) >= config.threshold
            and i - last_cut >= config.min_scene_len
        ):
            cut_times.append(frames[i].t)
            last_cut = i

    bounds = [frames[0].t, *cut_times, video.duration]
    return [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]


def read_frame_features_csv(path: str | Path) -> list[FrameFeature]:
    """Load frame features from a `frame_index,t,h_mean,s_mean,v_mean` CSV."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or list(reader.fieldnames) != FRAME_CSV_HEADER:
            raise ValueError(
                f"expected CSV header {','.join(FRAME_CSV_HEADER)}, "
                f"got {reader.fieldnames}"
            )
        return [
            FrameFeature(
                frame_index=int(row["frame_index"]),
                t=float(row["t"]),
                h_mean=float(row["h_mean"]),
                s_mean=float(row["s_mean"]),
                v_mean=float(row["v_mean"]),
            )
            for row in reader
        ]


def write_frame_features_csv(path: str | Path, frames: Iterable[FrameFeature]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(FRAME_CSV_HEADER)
        for fr in frames:
            writer.writerow([fr.frame_index, fr.t, fr.h_mean, fr.s_mean, fr.v_mean])
