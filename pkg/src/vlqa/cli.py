"""Command line interface: ingest, split, search, ask, serve, eval."""

from __future__ import annotations

import json
import sys

import click

from vlqa.config import load_config
from vlqa.errors import StageError, StrictValidationError, VlqaError
from vlqa.evalharness import load_eval_cases, run_eval
from vlqa.index import search as index_search
from vlqa.model import SearchQuery, VideoAsset
from vlqa.scenesplit import SplitConfig, read_frame_features_csv, split
from vlqa.service import ServiceState, ask_pipeline, create_app


def _make_state(
    config_path: str | None,
    videos: str | None,
    moments: str | None,
    strict: bool = False,
) -> ServiceState:
    config = load_config(config_path)
    state = ServiceState(config)
    videos = videos or config.videos_path
    moments = moments or config.moments_path
    if not videos or not moments:
        raise click.ClickException(
            "library paths missing: pass --videos/--moments or set them in the config"
        )
    try:
        diagnostics = state.load(videos, moments, strict=strict)
    except StrictValidationError as exc:
        raise click.ClickException(f"strict validation failed: {exc}") from exc
    for diag in diagnostics:
        click.echo(f"warning: {diag}", err=True)
    return state


@click.group()
def main() -> None:
    """Question answering over a video library."""


@main.command()
@click.option("--videos", required=True, type=click.Path(exists=True))
@click.option("--moments", required=True, type=click.Path(exists=True))
@click.option("--strict", is_flag=True, help="Abort on the first invalid record.")
def ingest(videos: str, moments: str, strict: bool) -> None:
    """Validate and load a library from JSONL files."""
    state = _make_state(None, videos, moments, strict=strict)
    click.echo(
        f"loaded {len(state.store.assets)} videos, "
        f"{len(state.store.moments)} moments (generation {state.store.generation})"
    )


@main.command("split")
@click.option("--frames", required=True, type=click.Path(exists=True))
@click.option("--video-id", required=True)
@click.option("--duration", required=True, type=float)
@click.option("--threshold", default=27.0, show_default=True, type=float)
@click.option("--min-scene-len", default=15, show_default=True, type=int)
def split_cmd(
    frames: str, video_id: str, duration: float, threshold: float, min_scene_len: int
) -> None:
    """Split a frame-feature CSV into moment intervals."""
    features = read_frame_features_csv(frames)
    video = VideoAsset(video_id=video_id, title=video_id, duration=duration)
    config = SplitConfig(threshold=threshold, min_scene_len=min_scene_len)
    try:
        intervals = split(features, config, video)
    except VlqaError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(
        json.dumps([{"t_in": a, "t_out": b} for a, b in intervals], indent=2)
    )


@main.command("search")
@click.argument("query")
@click.option("--top-k", default=10, show_default=True, type=int)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--videos", type=click.Path(exists=True))
@click.option("--moments", type=click.Path(exists=True))
def search_cmd(
    query: str, top_k: int, config_path: str | None, videos: str | None, moments: str | None
) -> None:
    """Search the moment index directly (no LLM involved)."""
    state = _make_state(config_path, videos, moments)
    assert state.snapshot is not None
    results = index_search(
        state.snapshot, SearchQuery(query), top_k=top_k, params=state.config.bm25
    )
    out = [
        {"moment_id": doc_id, "score": score, "video_id": state.snapshot.docs[doc_id].video_id}
        for doc_id, score in results
    ]
    click.echo(json.dumps(out, indent=2, ensure_ascii=False))


@main.command("ask")
@click.argument("query")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--videos", type=click.Path(exists=True))
@click.option("--moments", type=click.Path(exists=True))
@click.option("--max-docs", type=int)
def ask_cmd(
    query: str,
    config_path: str | None,
    videos: str | None,
    moments: str | None,
    max_docs: int | None,
) -> None:
    """Run the full pipeline and print the answer body as JSON."""
    state = _make_state(config_path, videos, moments)
    try:
        body = ask_pipeline(state, query, max_docs)
    except StageError as exc:
        raise click.ClickException(f"[{exc.stage}] {exc.cause}") from exc
    click.echo(json.dumps(body, indent=2, ensure_ascii=False))


@main.command()
@click.option("--port", type=int)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port: int | None, config_path: str | None, host: str) -> None:
    """Start the HTTP service."""
    import uvicorn

    config = load_config(config_path)
    state = ServiceState(config)
    if config.videos_path and config.moments_path:
        state.load(config.videos_path, config.moments_path)
    else:
        click.echo("warning: no library paths configured; serving unloaded", err=True)
    app = create_app(state)
    uvicorn.run(app, host=host, port=port if port is not None else config.port)


@main.command("eval")
@click.option("--dataset", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--videos", type=click.Path(exists=True))
@click.option("--moments", type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path())
@click.option("--no-answers", is_flag=True, help="Retrieval metrics only, skip answering.")
def eval_cmd(
    dataset: str,
    config_path: str | None,
    videos: str | None,
    moments: str | None,
    out_path: str | None,
    no_answers: bool,
) -> None:
    """Run the measurement harness over a JSONL dataset."""
    state = _make_state(config_path, videos, moments)
    cases = load_eval_cases(dataset)
    report = run_eval(cases, state, with_answers=not no_answers)
    text = json.dumps(report.to_dict(), indent=2, ensure_ascii=False)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        click.echo(f"report written to {out_path}")
    else:
        click.echo(text)


if __name__ == "__main__":
    sys.exit(main())
