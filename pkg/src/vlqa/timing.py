"""Stage timing. All wall-clock reads go through this module so tests can
swap in a deterministic clock."""

from __future__ import annotations

from time import perf_counter


def now() -> float:
    return perf_counter()


class StageTimer:
    """Accumulates per-stage durations in milliseconds."""

    def __init__(self) -> None:
        self.timings_ms: dict[str, float] = {}
        self._stack: list[tuple[str, float]] = []

    def start(self, stage: str) -> None:
        self._stack.append((stage, now()))

    def stop(self) -> None:
        stage, t0 = self._stack.pop()
        self.timings_ms[stage] = self.timings_ms.get(stage, 0.0) + (now() - t0) * 1000.0

    def __enter__(self) -> "StageTimer":
        return self

    def __exit__(self, *exc: object) -> None:
        while self._stack:
            self.stop()


def timed(timer: "StageTimer | None", stage: str):
    """Context manager timing one stage; no-op when timer is None."""
    return _Stage(timer, stage)


class _Stage:
    def __init__(self, timer: StageTimer | None, stage: str):
        self._timer = timer
        self._stage = stage

    def __enter__(self) -> None:
        if self._timer is not None:
            self._timer.start(self._stage)

    def __exit__(self, *exc: object) -> None:
        if self._timer is not None:
            self._timer.stop()
