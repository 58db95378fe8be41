"""Tokenization and normalized 1-gram bag-of-words features.

Tokens are lowercase maximal runs of alphanumeric characters; runs of
length 1 are dropped to suppress punctuation-adjacent noise. The
vocabulary keeps the top ``max_features`` tokens ranked by document
frequency (ties broken lexicographically), and each document becomes a
sparse vector of token counts divided by the document's total token
count, so weights sum to at most 1.
"""

from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import NoTokens

if TYPE_CHECKING:
    from .corpus import Corpus, Document

DEFAULT_MAX_FEATURES = 20_000

# Unicode alphanumeric runs, excluding underscore.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric runs of length >= 2, in text order."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) > 1]


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    index: dict[str, int] = field(repr=False)
    document_frequency: dict[str, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def dim(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class SparseVector:
    """Feature positions (strictly increasing) and positive weights."""

    positions: tuple[int, ...]
    weights: tuple[float, ...]

    @property
    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.positions, self.weights))

    def weight_sum(self) -> float:
        return float(sum(self.weights))

    def __len__(self) -> int:
        return len(self.positions)


def build_vocabulary(corpus: "Corpus", max_features: int = DEFAULT_MAX_FEATURES) -> Vocabulary:
    """Rank tokens by document frequency (desc), then lexicographically.

    The top ``max_features`` tokens get feature positions in rank order,
    which makes the mapping deterministic for a fixed corpus.
    """
    if max_features < 1:
        raise ValueError("max_features must be >= 1")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(tokenize(doc.text)))
    if not df:
        raise NoTokens("corpus tokenizes to nothing")
    ranked = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))[:max_features]
    terms = tuple(term for term, _ in ranked)
    return Vocabulary(
        terms=terms,
        index={term: pos for pos, term in enumerate(terms)},
        document_frequency={term: count for term, count in ranked},
    )


def vectorize(doc: "Document", vocab: Vocabulary) -> SparseVector:
    """Normalized term frequencies over the vocabulary.

    Out-of-vocabulary tokens still count toward the denominator, so the
    weight sum equals (in-vocab tokens) / (all tokens) <= 1.
    """
    tokens = tokenize(doc.text)
    if not tokens:
        return SparseVector(positions=(), weights=())
    total = len(tokens)
    counts: Counter[int] = Counter()
    index = vocab.index
    for token in tokens:
        pos = index.get(token)
        if pos is not None:
            counts[pos] += 1
    positions = tuple(sorted(counts))
    weights = tuple(counts[p] / total for p in positions)
    return SparseVector(positions=positions, weights=weights)


def stack(vectors: Sequence[SparseVector], dim: int) -> sp.csr_matrix:
    """Stack sparse vectors into one CSR matrix, row order preserved."""
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    nnz = sum(len(v) for v in vectors)
    indices = np.empty(nnz, dtype=np.int32)
    data = np.empty(nnz, dtype=np.float64)
    at = 0
    for row, vec in enumerate(vectors):
        n = len(vec)
        indices[at:at + n] = vec.positions
        data[at:at + n] = vec.weights
        at += n
        indptr[row + 1] = at
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


def vectorize_corpus(corpus: "Corpus", vocab: Vocabulary) -> sp.csr_matrix:
    """Vectorize every document, rows in corpus order."""
    return stack([vectorize(doc, vocab) for doc in corpus], vocab.dim)


def write_vocabulary_csv(vocab: Vocabulary, path: str | Path) -> None:
    """Debug dump: rank, term, document frequency."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "term", "document_frequency"])
        for rank, term in enumerate(vocab.terms):
            writer.writerow([rank, term, vocab.document_frequency[term]])
