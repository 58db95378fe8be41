"""Positional inverted index and keyword hit reporting.

Replaces an external search engine with a small in-memory index over the
shared tokenizer's output. Keyword phrases match as contiguous token
sequences (positional intersection), so hits are deterministic and
consistent with the feature pipeline. The index is unpruned: it covers
every token, not just the feature vocabulary.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Corpus, KeywordList, Phrase
from .featurize import tokenize


@dataclass(frozen=True)
class InvertedIndex:
    # token -> list of (doc id, ascending token positions), sorted by doc id
    postings: dict[str, list[tuple[str, tuple[int, ...]]]]

    def doc_ids(self, token: str) -> list[str]:
        return [doc_id for doc_id, _ in self.postings.get(token, [])]


@dataclass(frozen=True)
class KeywordHit:
    phrase: str
    hits: int
    positive_hits: int


@dataclass(frozen=True)
class KeywordHitReport:
    per_keyword: tuple[KeywordHit, ...]
    union_hits: int
    union_positive_hits: int
    hit_percentage: float  # 100 * union_hits / corpus total


def build_index(corpus: Corpus) -> InvertedIndex:
    postings: dict[str, dict[str, list[int]]] = {}
    for doc in corpus:
        for position, token in enumerate(tokenize(doc.text)):
            postings.setdefault(token, {}).setdefault(doc.id, []).append(position)
    return InvertedIndex(
        postings={
            token: [(doc_id, tuple(positions)) for doc_id, positions in sorted(by_doc.items())]
            for token, by_doc in postings.items()
        }
    )


def keyword_hits(index: InvertedIndex, keyword: Phrase | Sequence[str]) -> set[str]:
    """Documents containing the phrase tokens as a contiguous sequence."""
    tokens = tuple(keyword)
    if not tokens:
        raise ValueError("empty keyword phrase")
    first = index.postings.get(tokens[0])
    if first is None:
        return set()
    if len(tokens) == 1:
        return {doc_id for doc_id, _ in first}
    rest: list[dict[str, frozenset[int]]] = []
    for token in tokens[1:]:
        posting = index.postings.get(token)
        if posting is None:
            return set()
        rest.append({doc_id: frozenset(positions) for doc_id, positions in posting})
    hits: set[str] = set()
    for doc_id, positions in first:
        candidates = [p for p in positions]
        for offset, position_map in enumerate(rest, start=1):
            doc_positions = position_map.get(doc_id)
            if doc_positions is None:
                candidates = []
                break
            candidates = [p for p in candidates if p + offset in doc_positions]
            if not candidates:
                break
        if candidates:
            hits.add(doc_id)
    return hits


def keyword_report(index: InvertedIndex, keywords: KeywordList, corpus: Corpus) -> KeywordHitReport:
    """Per-keyword and union hit counts, with oracle-label positives."""
    if not len(keywords):
        raise ValueError("empty keyword list")
    per_keyword: list[KeywordHit] = []
    union: set[str] = set()
    for phrase in keywords:
        hit_set = keyword_hits(index, phrase)
        union.update(hit_set)
        per_keyword.append(
            KeywordHit(
                phrase=" ".join(phrase),
                hits=len(hit_set),
                positive_hits=sum(corpus.label_of(d) for d in hit_set),
            )
        )
    return KeywordHitReport(
        per_keyword=tuple(per_keyword),
        union_hits=len(union),
        union_positive_hits=sum(corpus.label_of(d) for d in union),
        hit_percentage=100.0 * len(union) / corpus.total,
    )


def hit_sets(index: InvertedIndex, keywords: KeywordList) -> list[tuple[str, set[str]]]:
    """(display phrase, hit set) pairs in keyword order, for seeding."""
    return [(" ".join(phrase), keyword_hits(index, phrase)) for phrase in keywords]


def write_keyword_report_csv(report: KeywordHitReport, corpus: Corpus, path: str | Path) -> None:
    """Per-keyword rows plus a union summary row."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["keyword", "documents_hit", "positive_documents_hit", "hit_percentage"])
        for row in report.per_keyword:
            writer.writerow([row.phrase, row.hits, row.positive_hits,
                             f"{100.0 * row.hits / corpus.total:.2f}"])
        writer.writerow(["<any keyword>", report.union_hits, report.union_positive_hits,
                         f"{report.hit_percentage:.2f}"])
