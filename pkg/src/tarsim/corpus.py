"""Labeled corpora and keyword lists.

A corpus is an ordered, immutable collection of labeled documents loaded
from a JSON-lines file. Labels are required for every document: the
simulation uses them as the review oracle. Keyword lists hold counsel-style
search phrases, tokenized the same way document text is.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from . import featurize
from .errors import (
    DuplicateId,
    EmptyCorpus,
    EmptyKeywordList,
    MalformedRecord,
    MissingFile,
)


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    label: int


class Corpus:
    """Ordered list of labeled documents with id lookup.

    Immutable after construction; safe to share across experiment workers.
    """

    def __init__(self, documents: list[Document] | tuple[Document, ...]):
        if not documents:
            raise EmptyCorpus("corpus holds no documents")
        self.documents: tuple[Document, ...] = tuple(documents)
        self._by_id: dict[str, Document] = {}
        for doc in self.documents:
            if not doc.id:
                raise MalformedRecord(0, "empty document id")
            if doc.id in self._by_id:
                raise DuplicateId(doc.id)
            if doc.label not in (0, 1):
                raise MalformedRecord(0, f"label {doc.label!r} not in {{0, 1}}")
            self._by_id[doc.id] = doc
        self.total: int = len(self.documents)
        self.positives: int = sum(d.label for d in self.documents)

    def __len__(self) -> int:
        return self.total

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def __getitem__(self, i: int) -> Document:
        return self.documents[i]

    def get(self, doc_id: str) -> Document:
        return self._by_id[doc_id]

    def label_of(self, doc_id: str) -> int:
        return self._by_id[doc_id].label

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.documents)

    @property
    def richness(self) -> float:
        return self.positives / self.total


# Phrases are tuples of tokens produced by the shared tokenizer.
Phrase = tuple[str, ...]


@dataclass(frozen=True)
class KeywordList:
    phrases: tuple[Phrase, ...]

    def __len__(self) -> int:
        return len(self.phrases)

    def __iter__(self) -> Iterator[Phrase]:
        return iter(self.phrases)

    def displays(self) -> tuple[str, ...]:
        return tuple(" ".join(p) for p in self.phrases)


@dataclass(frozen=True)
class CorpusStats:
    total: int
    positives: int
    negatives: int
    richness: float  # percentage, full precision; round only for display


def load_corpus(path: str | Path, format: str = "jsonl") -> Corpus:
    """Load a corpus from a JSON-lines file, one document per line.

    Each line must be an object with string ``id``, string ``text`` and
    integer ``label`` in {0, 1}. Blank lines are skipped.
    """
    if format != "jsonl":
        raise MalformedRecord(0, f"unsupported corpus format {format!r}")
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"corpus file not found: {path}")
    documents: list[Document] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(lineno, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise MalformedRecord(lineno, "record is not an object")
            doc_id = record.get("id")
            text = record.get("text")
            label = record.get("label")
            if not isinstance(doc_id, str) or not doc_id:
                raise MalformedRecord(lineno, "missing or empty string 'id'")
            if not isinstance(text, str):
                raise MalformedRecord(lineno, "missing string 'text'")
            if isinstance(label, bool) or not isinstance(label, int) or label not in (0, 1):
                raise MalformedRecord(lineno, "'label' must be integer 0 or 1")
            if doc_id in seen:
                raise DuplicateId(doc_id)
            seen.add(doc_id)
            documents.append(Document(id=doc_id, text=text, label=label))
    if not documents:
        raise EmptyCorpus(f"no records in {path}")
    return Corpus(documents)


def load_keywords(path: str | Path) -> KeywordList:
    """Load one keyword phrase per line; '#' comments and blanks ignored.

    Lines are run through the shared tokenizer, so phrases are case-folded
    and punctuation-stripped. Duplicates after tokenization are dropped,
    keeping the first occurrence. Lines that tokenize to nothing are dropped.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"keyword file not found: {path}")
    phrases: list[Phrase] = []
    seen: set[Phrase] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = tuple(featurize.tokenize(stripped))
            if not tokens or tokens in seen:
                continue
            seen.add(tokens)
            phrases.append(tokens)
    if not phrases:
        raise EmptyKeywordList(f"no usable keyword lines in {path}")
    return KeywordList(phrases=tuple(phrases))


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Exact counts plus richness as a full-precision percentage."""
    return CorpusStats(
        total=corpus.total,
        positives=corpus.positives,
        negatives=corpus.total - corpus.positives,
        richness=100.0 * corpus.positives / corpus.total,
    )


def write_corpus_stats_csv(stats: CorpusStats, path: str | Path, name: str = "corpus") -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["corpus", "total", "positives", "negatives", "richness_pct"])
        writer.writerow([name, stats.total, stats.positives, stats.negatives, f"{stats.richness:.2f}"])
