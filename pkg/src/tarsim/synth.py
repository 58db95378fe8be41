"""Synthetic labeled corpora for experiments and tests.

Generates two-class document collections with a shared Zipfian background
vocabulary and per-class subtopics. Positive documents concentrate in a
handful of subtopics with skewed prevalence, negatives spread over more
subtopics, a contamination rate bleeds words across topics, and a small
noise fraction of documents carries topic words from the opposite class,
so the classes are not trivially separable and ranking quality has to be
earned over active-learning rounds. Keyword lists are drawn from the
positive subtopics' signature words, which makes their hit sets richer
than the corpus, mirroring counsel-drafted search terms.

Generation is fully determined by the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus, Document


@dataclass(frozen=True)
class SynthSpec:
    n_docs: int = 20_000
    richness: float = 0.25
    seed: int = 7
    pos_topics: int = 8
    neg_topics: int = 10
    topic_words: int = 120
    background_words: int = 1_500
    doc_len_mean: int = 50
    doc_len_min: int = 20
    background_fraction: float = 0.70
    contamination: float = 0.12
    # prevalence skew across positive subtopics; entry i gets weight skew^i
    pos_skew: float = 0.75
    # fraction of docs whose topic words come from the opposite class
    noise: float = 0.06
    # larger offset flattens the within-topic word distribution
    word_offset: float = 20.0


def _zipf_probs(n: int, offset: float = 8.0) -> np.ndarray:
    ranks = np.arange(n, dtype=np.float64)
    probs = 1.0 / (ranks + offset)
    return probs / probs.sum()


def _topic_vocab(prefix: str, topic: int, count: int) -> list[str]:
    return [f"{prefix}{topic:02d}x{w:03d}" for w in range(count)]


def generate_corpus(spec: SynthSpec = SynthSpec()) -> Corpus:
    """Deterministic two-class synthetic corpus with exact richness."""
    rng = np.random.default_rng([spec.seed, 11])
    n = spec.n_docs
    n_pos = int(round(spec.richness * n))

    background = [f"bg{w:04d}" for w in range(spec.background_words)]
    bg_probs = _zipf_probs(spec.background_words)
    pos_vocabs = [_topic_vocab("pt", t, spec.topic_words) for t in range(spec.pos_topics)]
    neg_vocabs = [_topic_vocab("nt", t, spec.topic_words) for t in range(spec.neg_topics)]
    all_vocabs = pos_vocabs + neg_vocabs
    word_probs = _zipf_probs(spec.topic_words, offset=spec.word_offset)

    pos_weights = spec.pos_skew ** np.arange(spec.pos_topics)
    pos_weights = pos_weights / pos_weights.sum()
    neg_weights = np.full(spec.neg_topics, 1.0 / spec.neg_topics)

    labels = np.zeros(n, dtype=np.int64)
    labels[rng.permutation(n)[:n_pos]] = 1
    pos_assignment = rng.choice(spec.pos_topics, size=n, p=pos_weights)
    neg_assignment = rng.choice(spec.neg_topics, size=n, p=neg_weights)
    flipped = rng.random(n) < spec.noise
    lengths = np.maximum(spec.doc_len_min, rng.poisson(spec.doc_len_mean, size=n))

    documents: list[Document] = []
    for i in range(n):
        length = int(lengths[i])
        n_bg = int(round(spec.background_fraction * length))
        n_topic = length - n_bg
        words = [background[j] for j in rng.choice(spec.background_words, size=n_bg, p=bg_probs)]
        looks_positive = bool(labels[i]) != bool(flipped[i])
        if looks_positive:
            vocab_index = int(pos_assignment[i])
        else:
            vocab_index = spec.pos_topics + int(neg_assignment[i])
        topic_draw = rng.choice(spec.topic_words, size=n_topic, p=word_probs)
        contaminated = rng.random(n_topic) < spec.contamination
        foreign = rng.choice(len(all_vocabs), size=n_topic)
        for j in range(n_topic):
            source = int(foreign[j]) if contaminated[j] else vocab_index
            words.append(all_vocabs[source][topic_draw[j]])
        documents.append(
            Document(id=f"d{i:06d}", text=" ".join(words), label=int(labels[i]))
        )
    return Corpus(documents)


def generate_keywords(spec: SynthSpec = SynthSpec(), per_topic: int = 4) -> list[str]:
    """Signature words of the positive subtopics, most probable first."""
    keywords: list[str] = []
    for topic in range(spec.pos_topics):
        keywords.extend(_topic_vocab("pt", topic, per_topic))
    return keywords


def write_corpus_jsonl(corpus: Corpus, path: str | Path) -> None:
    import json

    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in corpus:
            fh.write(json.dumps({"id": doc.id, "text": doc.text, "label": doc.label}))
            fh.write("\n")


def write_keyword_file(keywords: list[str], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write("# synthetic keyword list\n")
        for keyword in keywords:
            fh.write(keyword + "\n")
