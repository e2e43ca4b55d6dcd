"""Measurement harness: retrieval recall and answer-grounding metrics over a
dataset of questions with known-relevant moment ids.

Metrics (structural only, no judging of answer prose):

    recall@k              |top-k retrieved ∩ relevant| / |relevant|
    reference_precision   valid references / total references
    hallucination_rate    (non-valid references + external web links)
                          / (total references + external web links)

Bare web links count as hallucinations because a model reaching for the
open web instead of the provided moments is exactly the failure this
measures. Aggregates are unweighted means over cases that ran; a case whose
gateway call fails is marked failed and skipped in aggregates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from vlqa.answer import answer
from vlqa.errors import GatewayError, StageError, UnknownMomentIdError
from vlqa.retriever import retrieve
from vlqa.service import ServiceState
from vlqa.timing import StageTimer, timed

RECALL_KS = (5, 10, 50)


@dataclass(frozen=True, slots=True)
class EvalCase:
    question: str
    relevant_moment_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "relevant_moment_ids", tuple(self.relevant_moment_ids))
        if not self.question.strip():
            raise ValueError("question must be non-empty")
        if not self.relevant_moment_ids:
            raise ValueError("relevant_moment_ids must be non-empty")


@dataclass
class CaseResult:
    question: str
    recall_at: dict[int, float] = field(default_factory=dict)
    reference_precision: float | None = None
    hallucination_rate: float | None = None
    latency_ms: float = 0.0
    failed: bool = False
    error: str | None = None


@dataclass
class EvalReport:
    cases: list[CaseResult]
    recall_at: dict[int, float]
    reference_precision: float | None
    hallucination_rate: float | None
    mean_latency_ms: float

    def to_dict(self) -> dict:
        return {
            "aggregate": {
                "recall_at": {str(k): v for k, v in self.recall_at.items()},
                "reference_precision": self.reference_precision,
                "hallucination_rate": self.hallucination_rate,
                "mean_latency_ms": self.mean_latency_ms,
            },
            "cases": [
                {
                    "question": c.question,
                    "recall_at": {str(k): v for k, v in c.recall_at.items()},
                    "reference_precision": c.reference_precision,
                    "hallucination_rate": c.hallucination_rate,
                    "latency_ms": c.latency_ms,
                    "failed": c.failed,
                    "error": c.error,
                }
                for c in self.cases
            ],
        }


def load_eval_cases(path: str | Path) -> list[EvalCase]:
    """JSONL dataset: one {"question", "relevant_moment_ids"} per line."""
    cases: list[EvalCase] = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            cases.append(
                EvalCase(
                    question=obj["question"],
                    relevant_moment_ids=tuple(obj["relevant_moment_ids"]),
                )
            )
    return cases


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def run_eval(
    cases: Sequence[EvalCase],
    state: ServiceState,
    with_answers: bool = True,
    recall_ks: Sequence[int] = RECALL_KS,
) -> EvalReport:
    """Run retrieval (and optionally answering) per case and aggregate."""
    snapshot = state.snapshot
    if snapshot is None:
        raise RuntimeError("index not ready")
    for case in cases:
        for moment_id in case.relevant_moment_ids:
            if moment_id not in snapshot.docs:
                raise UnknownMomentIdError(
                    f"dataset references unknown moment {moment_id!r}"
                )

    results: list[CaseResult] = []
    for case in cases:
        result = CaseResult(question=case.question)
        timer = StageTimer()
        try:
            with timed(timer, "case"):
                retrieval = retrieve(
                    case.question,
                    snapshot,
                    state.config.retriever,
                    state.gateway,
                    params=state.config.bm25,
                    template=state.query_template,
                )
                relevant = set(case.relevant_moment_ids)
                ranked_ids = retrieval.moment_ids()
                for k in recall_ks:
                    hit = len(relevant.intersection(ranked_ids[:k]))
                    result.recall_at[k] = hit / len(relevant)
                if with_answers:
                    ans = answer(
                        case.question,
                        retrieval,
                        snapshot,
                        state.gateway,
                        config=state.config.answer,
                        assets=state.store.assets,
                        template=state.answer_template,
                    )
                    total_refs = len(ans.references)
                    valid = sum(1 for r in ans.references if r.status == "valid")
                    links = len(ans.external_links)
                    if total_refs:
                        result.reference_precision = valid / total_refs
                    if total_refs + links:
                        result.hallucination_rate = (
                            (total_refs - valid) + links
                        ) / (total_refs + links)
        except (GatewayError, StageError) as exc:
            result.failed = True
            result.error = str(exc)
        result.latency_ms = timer.timings_ms.get("case", 0.0)
        results.append(result)

    ran = [r for r in results if not r.failed]
    precisions = [r.reference_precision for r in ran if r.reference_precision is not None]
    rates = [r.hallucination_rate for r in ran if r.hallucination_rate is not None]
    return EvalReport(
        cases=results,
        recall_at={k: _mean([r.recall_at[k] for r in ran]) for k in recall_ks},
        reference_precision=_mean(precisions) if precisions else None,
        hallucination_rate=_mean(rates) if rates else None,
        mean_latency_ms=_mean([r.latency_ms for r in ran]),
    )
