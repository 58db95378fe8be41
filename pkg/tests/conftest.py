from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tarsim.corpus import Corpus, Document

settings.register_profile(
    "suite",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def make_corpus(rows: list[tuple[str, str, int]]) -> Corpus:
    return Corpus([Document(id=i, text=t, label=l) for i, t, l in rows])


def write_jsonl(path: Path, rows: list[dict]) -> Path:
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return path


def random_text_corpus(
    n_docs: int,
    richness: float,
    seed: int,
    vocab_size: int = 200,
    doc_len: int = 12,
) -> Corpus:
    """Small random corpus; labels independent of text."""
    rng = np.random.default_rng(seed)
    vocab = [f"tok{i:03d}" for i in range(vocab_size)]
    n_pos = int(round(richness * n_docs))
    labels = np.zeros(n_docs, dtype=int)
    labels[rng.permutation(n_docs)[:n_pos]] = 1
    docs = []
    for i in range(n_docs):
        words = [vocab[j] for j in rng.integers(0, vocab_size, size=doc_len)]
        docs.append((f"d{i:05d}", " ".join(words), int(labels[i])))
    return make_corpus(docs)


@pytest.fixture
def tiny_corpus() -> Corpus:
    return make_corpus(
        [
            ("d1", "seek legal advice now", 1),
            ("d2", "quarterly audit report", 0),
            ("d3", "legal review of audit", 1),
            ("d4", "lunch menu options", 0),
            ("d5", "advice on legal privilege", 1),
            ("d6", "weekly status notes", 0),
        ]
    )
