from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import intervals_overlap
from vlqa.answer import (
    AnswerConfig,
    answer,
    build_answer_prompt,
    extract_external_links,
    format_timestamp,
    parse_references,
    rewrite_links,
    serialize_reference,
    validate_references,
)
from vlqa.errors import StageError, UnknownDocIdError
from vlqa.gateway import ScriptedLlmGateway
from vlqa.index import build_index
from vlqa.model import MomentDocument, MomentReference, RetrievalSet, VideoAsset


def doc(doc_id: str, video_id: str, t_in: float, t_out: float) -> MomentDocument:
    return MomentDocument(
        doc_id=doc_id,
        video_id=video_id,
        video_title=f"Title of {video_id}",
        t_in=t_in,
        t_out=t_out,
        transcript_text="S: words",
        captions_text="a frame",
        speakers=("S",),
    )


@pytest.fixture
def small_world():
    assets = {
        "A001": VideoAsset("A001", "Launch Day", 100.0),
        "B002": VideoAsset("B002", "Quiet Orbit", 50.0),
    }
    docs = [
        doc("A001_m0", "A001", 10.0, 50.0),
        doc("A001_m1", "A001", 50.0, 90.0),
        doc("B002_m0", "B002", 0.0, 25.0),
    ]
    snapshot = build_index(docs)
    retrieval = RetrievalSet(items=(("A001_m0", 2.0), ("A001_m1", 1.0)))
    return assets, snapshot, retrieval


def ref(video_id: str, t_in: float, t_out: float) -> MomentReference:
    return MomentReference(video_id, t_in, t_out, span=(0, 1))


def test_format_timestamp_minimal_decimal() -> None:
    assert format_timestamp(12.0) == "12"
    assert format_timestamp(45.5) == "45.5"
    assert format_timestamp(0.0) == "0"
    assert format_timestamp(0.001) == "0.001"


def test_format_timestamp_never_uses_exponent() -> None:
    s = format_timestamp(1e-05)
    assert "e" not in s and float(s) == 1e-05
    s = format_timestamp(1e17)
    assert "e" not in s and float(s) == 1e17


def test_parse_single_reference_with_span() -> None:
    text = "See [A001](12;45.5) for launch."
    refs = parse_references(text)
    assert len(refs) == 1
    r = refs[0]
    assert (r.video_id, r.timestamp_in, r.timestamp_out) == ("A001", 12.0, 45.5)
    assert text[r.span[0] : r.span[1]] == "[A001](12;45.5)"
    assert r.status is None


def test_parse_no_references() -> None:
    assert parse_references("no refs here") == []


def test_parse_rejects_inverted_interval_with_diagnostic() -> None:
    diagnostics: list[str] = []
    assert parse_references("[A001](45;12)", diagnostics) == []
    assert len(diagnostics) == 1
    assert "45;12" in diagnostics[0]


def test_parse_rejects_equal_timestamps() -> None:
    assert parse_references("[A001](5;5)") == []


def test_parse_ignores_malformed_near_matches() -> None:
    text = "[A001](12;45] and [A001)(1;2) and [A001](1,2) and [](1;2)"
    assert parse_references(text) == []


def test_parse_never_matches_across_newlines() -> None:
    assert parse_references("[A0\n01](1;2)") == []


def test_parse_multiple_non_overlapping_left_to_right() -> None:
    text = "[A](1;2) middle [B](3;4.5)"
    refs = parse_references(text)
    assert [r.video_id for r in refs] == ["A", "B"]
    (s1, e1), (s2, e2) = refs[0].span, refs[1].span
    assert e1 <= s2


_ID_CHARS = st.text(
    alphabet=st.characters(blacklist_characters="[]()\n", blacklist_categories=("Cs",)),
    min_size=1,
    max_size=12,
)
_TS = st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False)


@given(_ID_CHARS, _TS, _TS)
@settings(max_examples=300)
def test_reference_round_trip_property(video_id: str, a: float, b: float) -> None:
    if a == b:
        b = a + 1.0
    t_in, t_out = min(a, b), max(a, b)
    original = MomentReference(video_id, t_in, t_out, span=(0, 0))
    text = serialize_reference(original)
    parsed = parse_references(text)
    assert len(parsed) == 1
    got = parsed[0]
    assert got.video_id == video_id
    assert got.timestamp_in == t_in
    assert got.timestamp_out == t_out
    assert text[got.span[0] : got.span[1]] == text


def test_validate_exact_retrieved_interval_is_valid(small_world) -> None:
    assets, snapshot, retrieval = small_world
    [out] = validate_references([ref("A001", 10.0, 50.0)], retrieval, assets, snapshot)
    assert out.status == "valid"


def test_validate_sub_interval_of_retrieved_moment_is_valid(small_world) -> None:
    assets, snapshot, retrieval = small_world
    [out] = validate_references([ref("A001", 20.0, 30.0)], retrieval, assets, snapshot)
    assert out.status == "valid"


def test_validate_unknown_video(small_world) -> None:
    assets, snapshot, retrieval = small_world
    [out] = validate_references([ref("youtu.be/xyz", 0.0, 10.0)], retrieval, assets, snapshot)
    assert out.status == "unknown_video"


def test_validate_out_of_bounds(small_world) -> None:
    assets, snapshot, retrieval = small_world
    [out] = validate_references([ref("A001", 90.0, 150.0)], retrieval, assets, snapshot)
    assert out.status == "out_of_bounds"


def test_validate_known_video_not_retrieved(small_world) -> None:
    assets, snapshot, retrieval = small_world
    # B002 is in the library but none of its moments were retrieved
    [out] = validate_references([ref("B002", 0.0, 10.0)], retrieval, assets, snapshot)
    assert out.status == "not_retrieved"


def test_validate_touching_interval_does_not_overlap(small_world) -> None:
    assets, snapshot, retrieval = small_world
    # retrieval covers [10, 90] of A001; [90, 95] only touches
    [out] = validate_references([ref("A001", 90.0, 95.0)], retrieval, assets, snapshot)
    assert out.status == "not_retrieved"


def test_validate_without_grounding_accepts_in_bounds(small_world) -> None:
    assets, snapshot, retrieval = small_world
    [out] = validate_references(
        [ref("B002", 0.0, 10.0)], retrieval, assets, snapshot, require_grounding=False
    )
    assert out.status == "valid"


@given(
    st.lists(
        st.tuples(
            st.floats(min_value=0, max_value=90, allow_nan=False),
            st.floats(min_value=1, max_value=10, allow_nan=False),
        ),
        min_size=1,
        max_size=8,
    ),
    st.floats(min_value=0, max_value=95, allow_nan=False),
    st.floats(min_value=0.5, max_value=5, allow_nan=False),
)
@settings(max_examples=150)
def test_grounding_soundness_property(moment_specs, ref_start, ref_len) -> None:
    """Anything marked valid must overlap a retrieved moment (brute force)."""
    assets = {"V": VideoAsset("V", "t", 100.0)}
    docs = [
        doc(f"V_m{i}", "V", start, min(start + length, 100.0))
        for i, (start, length) in enumerate(moment_specs)
        if start < min(start + length, 100.0)
    ]
    if not docs:
        return
    snapshot = build_index(docs)
    items = tuple(sorted(((d.doc_id, 1.0) for d in docs), key=lambda p: p[0]))
    retrieval = RetrievalSet(items=items)
    candidate = ref("V", ref_start, min(ref_start + ref_len, 100.0))
    [validated] = validate_references([candidate], retrieval, assets, snapshot)
    hand_check = any(
        intervals_overlap(candidate.timestamp_in, candidate.timestamp_out, d.t_in, d.t_out)
        for d in docs
    )
    assert (validated.status == "valid") == hand_check


def test_external_links_extracted_and_deduped() -> None:
    text = "watch https://youtu.be/xyz or http://example.com/a. Again https://youtu.be/xyz"
    assert extract_external_links(text) == ("https://youtu.be/xyz", "http://example.com/a")


def test_external_links_skip_urls_inside_references() -> None:
    text = "[https://youtu.be/xyz](0;10) but raw https://youtu.be/other"
    refs = parse_references(text)
    links = extract_external_links(text, [r.span for r in refs])
    assert links == ("https://youtu.be/other",)


def test_build_answer_prompt_blocks_in_score_order(small_world) -> None:
    assets, snapshot, retrieval = small_world
    request = build_answer_prompt("find launch shots", retrieval, snapshot)
    user = request.messages[1].content
    assert user.count("doc_id:") == 2
    assert user.index("A001_m0") < user.index("A001_m1")
    assert "ANSWERGEN" in request.messages[0].content
    assert "find launch shots" in user


def test_build_answer_prompt_empty_retrieval_instructs_no_footage(small_world) -> None:
    _assets, snapshot, _retrieval = small_world
    request = build_answer_prompt("anything", RetrievalSet(items=()), snapshot)
    assert "no relevant footage" in request.messages[1].content.lower()


def test_build_answer_prompt_caps_context_docs() -> None:
    docs = [doc(f"m{i:03d}", "A001", float(i), float(i) + 1.0) for i in range(60)]
    snapshot = build_index(docs)
    items = tuple((f"m{i:03d}", float(60 - i)) for i in range(60))
    retrieval = RetrievalSet(items=items)
    request = build_answer_prompt(
        "q", retrieval, snapshot, AnswerConfig(max_context_docs=50)
    )
    assert request.messages[1].content.count("doc_id:") == 50


def test_build_answer_prompt_unknown_doc_id(small_world) -> None:
    _assets, snapshot, _retrieval = small_world
    retrieval = RetrievalSet(items=(("ghost", 1.0),))
    with pytest.raises(UnknownDocIdError):
        build_answer_prompt("q", retrieval, snapshot)


def test_rewrite_links_exact_url(small_world) -> None:
    assets, _snapshot, _retrieval = small_world
    text = "See [A001](12;45.5) for launch."
    reference = MomentReference("A001", 12.0, 45.5, span=(4, 19), status="valid")
    config = AnswerConfig(link_base_url="https://lib.example/m")
    rewritten = rewrite_links(text, [reference], assets, config)
    assert "https://lib.example/m/A001?in=12&out=45.5" in rewritten
    assert rewritten == (
        "See [Launch Day (12–45.5s)](https://lib.example/m/A001?in=12&out=45.5) for launch."
    )


def test_rewrite_links_leaves_invalid_verbatim(small_world) -> None:
    assets, _snapshot, _retrieval = small_world
    text = "Only [ZZZ](1;2) here."
    reference = MomentReference("ZZZ", 1.0, 2.0, span=(5, 15), status="unknown_video")
    assert rewrite_links(text, [reference], assets) == text


def test_rewrite_links_touches_only_valid_spans(small_world) -> None:
    assets, _snapshot, _retrieval = small_world
    text = "[ZZZ](1;2) and [A001](12;45.5)"
    refs = [
        MomentReference("ZZZ", 1.0, 2.0, span=(0, 10), status="unknown_video"),
        MomentReference("A001", 12.0, 45.5, span=(15, 30), status="valid"),
    ]
    rewritten = rewrite_links(text, refs, assets)
    assert rewritten.startswith("[ZZZ](1;2) and ")
    assert "[A001](12;45.5)" not in rewritten


def answer_gateway(text: str) -> ScriptedLlmGateway:
    gateway = ScriptedLlmGateway()
    gateway.register("ANSWERGEN", text)
    return gateway


def test_answer_pipeline_all_valid(small_world) -> None:
    assets, snapshot, retrieval = small_world
    gateway = answer_gateway(
        "Start [A001](10;50), then [A001](50;90), also [A001](15;20) and [A001](60;70)."
    )
    result = answer("q", retrieval, snapshot, gateway, assets=assets)
    assert len(result.references) == 4
    assert all(r.status == "valid" for r in result.references)
    assert result.rewritten_text.count("vlqa://moment/A001") == 4
    assert result.external_links == ()
    assert set(result.timings) >= {"answer_prompt", "answer_llm", "reference_check"}


def test_answer_pipeline_youtube_hallucination(small_world) -> None:
    assets, snapshot, retrieval = small_world
    gateway = answer_gateway("Try this video: https://youtu.be/dQw4w9WgXcQ")
    result = answer("q", retrieval, snapshot, gateway, assets=assets)
    assert result.references == ()
    assert result.external_links == ("https://youtu.be/dQw4w9WgXcQ",)
    assert result.rewritten_text == result.raw_text


def test_answer_pipeline_empty_retrieval(small_world) -> None:
    assets, snapshot, _retrieval = small_world
    gateway = answer_gateway("No relevant footage was found.")
    result = answer("q", RetrievalSet(items=()), snapshot, gateway, assets=assets)
    assert result.references == ()
    assert result.rewritten_text == result.raw_text


def test_answer_pipeline_gateway_failure_annotated(small_world) -> None:
    assets, snapshot, retrieval = small_world
    gateway = ScriptedLlmGateway()  # no ANSWERGEN script
    with pytest.raises(StageError) as excinfo:
        answer("q", retrieval, snapshot, gateway, assets=assets)
    assert excinfo.value.stage == "answer_generation"


def test_answer_config_validation() -> None:
    with pytest.raises(ValueError):
        AnswerConfig(max_context_docs=0)
