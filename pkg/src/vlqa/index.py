"""Embedded full-text index over moment documents with BM25 ranking.

The snapshot is immutable once built: concurrent searches need no locking,
and re-indexing means building a fresh snapshot and swapping the reference.
Indexed text per document is title + transcript + captions concatenated into
a single field. Scoring uses the smoothed IDF

    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))

and the classic tf saturation / length normalization, so every document
containing at least one query term scores strictly above zero and zero-score
documents are simply the non-matching ones.

Tokenization is deliberately plain (lowercased runs of alphanumerics, no
stemming, no stop words) so a brute-force scorer can reproduce rankings
exactly.
"""

from __future__ import annotations

import math
import pickle
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from vlqa.errors import DuplicateDocIdError, SnapshotFormatError
from vlqa.model import MomentDocument, SearchQuery

SNAPSHOT_MAGIC = b"VLQX"
SNAPSHOT_VERSION = 1

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased maximal runs of Unicode alphanumerics."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True, slots=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self) -> None:
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not (0.0 <= self.b <= 1.0):
            raise ValueError("b must be in [0, 1]")


class IndexSnapshot:
    """Searchable, immutable view over a set of moment documents.

    Attributes:
        postings: term -> [(doc_id, tf)], doc_ids ascending within each list.
        doc_lengths: doc_id -> token count of the concatenated field.
        doc_count: number of documents (N).
        avg_doc_len: mean token count, 0.0 for an empty index.
        docs: doc_id -> MomentDocument.
    """

    def __init__(self, docs: Sequence[MomentDocument]):
        by_id: dict[str, MomentDocument] = {}
        for doc in docs:
            if doc.doc_id in by_id:
                raise DuplicateDocIdError(f"duplicate doc_id: {doc.doc_id}")
            by_id[doc.doc_id] = doc

        self.docs: dict[str, MomentDocument] = by_id
        # ordinal == position in doc_id-ascending order; all tie-breaking
        # and postings ordering hangs off this
        self._doc_ids: list[str] = sorted(by_id)
        self._ordinals: dict[str, int] = {d: i for i, d in enumerate(self._doc_ids)}

        self.postings: dict[str, list[tuple[str, int]]] = {}
        int_lengths: list[int] = []
        for doc_id in self._doc_ids:
            tokens = tokenize(by_id[doc_id].indexed_text())
            int_lengths.append(len(tokens))
            for term, tf in Counter(tokens).items():
                self.postings.setdefault(term, []).append((doc_id, tf))

        self.doc_count: int = len(self._doc_ids)
        self.doc_lengths: dict[str, int] = dict(zip(self._doc_ids, int_lengths))
        # exact integer sum, single rounding on divide
        self.avg_doc_len: float = (
            sum(int_lengths) / self.doc_count if self.doc_count else 0.0
        )
        lengths = np.array(int_lengths, dtype=np.float64)

        # per-term ordinal/tf arrays for the scoring hot path
        self._term_ords: dict[str, np.ndarray] = {}
        self._term_tfs: dict[str, np.ndarray] = {}
        for term, plist in self.postings.items():
            self._term_ords[term] = np.fromiter(
                (self._ordinals[d] for d, _ in plist), dtype=np.int64, count=len(plist)
            )
            self._term_tfs[term] = np.fromiter(
                (tf for _, tf in plist), dtype=np.float64, count=len(plist)
            )
        self._rel_len: np.ndarray = (
            lengths / self.avg_doc_len if self.avg_doc_len else lengths
        )

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.docs


def build_index(docs: Sequence[MomentDocument]) -> IndexSnapshot:
    """Build a searchable snapshot; doc_ids must be unique."""
    return IndexSnapshot(docs)


def search(
    snapshot: IndexSnapshot,
    query: SearchQuery,
    top_k: int,
    params: Bm25Params = Bm25Params(),
) -> list[tuple[str, float]]:
    """Top-k documents by BM25 score, descending, ties by doc_id ascending.

    Documents matching no query term are excluded. An empty index or a query
    that tokenizes to nothing yields an empty list.
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    tokens = tokenize(query.keywords)
    if not tokens or snapshot.doc_count == 0:
        return []

    n = snapshot.doc_count
    k1, b = params.k1, params.b
    norm = k1 * (1.0 - b + b * snapshot._rel_len)
    scores = np.zeros(n, dtype=np.float64)
    for term in tokens:
        ords = snapshot._term_ords.get(term)
        if ords is None:
            continue
        tfs = snapshot._term_tfs[term]
        df = len(ords)
        idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
        scores[ords] += idf * (tfs * (k1 + 1.0)) / (tfs + norm[ords])

    candidates = np.flatnonzero(scores != 0.0)
    if candidates.size == 0:
        return []
    # lexsort: primary key last -> score descending, then ordinal (doc_id) asc
    order = np.lexsort((candidates, -scores[candidates]))[:top_k]
    return [
        (snapshot._doc_ids[candidates[i]], float(scores[candidates[i]])) for i in order
    ]


class SearchBackend(Protocol):
    """Anything that ranks documents for a keyword query.

    The embedded index is the only implementation shipped; a client for a
    remote search service can slot in behind the same method.
    """

    def search(self, query: SearchQuery, top_k: int) -> list[tuple[str, float]]: ...


@dataclass(frozen=True)
class EmbeddedSearchIndex:
    """The in-process snapshot bound to a parameter set, as a SearchBackend."""

    snapshot: IndexSnapshot
    params: Bm25Params = field(default_factory=Bm25Params)

    def search(self, query: SearchQuery, top_k: int) -> list[tuple[str, float]]:
        return search(self.snapshot, query, top_k, self.params)


def save_snapshot(snapshot: IndexSnapshot, path: str | Path) -> None:
    """Persist the snapshot's documents in the versioned binary format."""
    payload = [
        (
            d.doc_id,
            d.video_id,
            d.video_title,
            d.t_in,
            d.t_out,
            d.transcript_text,
            d.captions_text,
            d.speakers,
        )
        for d in snapshot.docs.values()
    ]
    with open(path, "wb") as f:
        f.write(SNAPSHOT_MAGIC)
        f.write(bytes([SNAPSHOT_VERSION]))
        f.write(pickle.dumps(payload, protocol=pickle.HIGHEST_PROTOCOL))


def load_snapshot(path: str | Path) -> IndexSnapshot:
    """Load a snapshot file; rejects bad magic and unknown format versions.

    Statistics are rebuilt from the stored documents, which keeps the file
    format small and independent of internal index layout.
    """
    with open(path, "rb") as f:
        magic = f.read(len(SNAPSHOT_MAGIC))
        if magic != SNAPSHOT_MAGIC:
            raise SnapshotFormatError(f"bad magic {magic!r}, expected {SNAPSHOT_MAGIC!r}")
        version = f.read(1)
        if not version or version[0] != SNAPSHOT_VERSION:
            raise SnapshotFormatError(
                f"unsupported snapshot version {version!r}, expected {SNAPSHOT_VERSION}"
            )
        payload = pickle.loads(f.read())
    docs = [
        MomentDocument(
            doc_id=row[0],
            video_id=row[1],
            video_title=row[2],
            t_in=row[3],
            t_out=row[4],
            transcript_text=row[5],
            captions_text=row[6],
            speakers=tuple(row[7]),
        )
        for row in payload
    ]
    return build_index(docs)
