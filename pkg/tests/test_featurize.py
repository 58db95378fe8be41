from __future__ import annotations

import pytest

from tarsim.errors import NoTokens
from tarsim.featurize import (
    build_vocabulary,
    stack,
    tokenize,
    vectorize,
    vectorize_corpus,
    write_vocabulary_csv,
)

from conftest import make_corpus, random_text_corpus


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []

    def test_punctuation_split_and_lowercase(self):
        assert tokenize("Attorney-Client privilege!") == ["attorney", "client", "privilege"]

    def test_alphanumeric_runs_kept(self):
        assert tokenize("Q3 2019 audit") == ["q3", "2019", "audit"]

    def test_single_char_runs_dropped(self):
        assert tokenize("a b cd e-f") == ["cd"]

    def test_order_preserved(self):
        assert tokenize("zulu alpha zulu") == ["zulu", "alpha", "zulu"]


class TestBuildVocabulary:
    def test_under_capacity_keeps_all(self):
        corpus = make_corpus([("d1", " ".join(f"tok{i}" for i in range(50)), 0)])
        vocab = build_vocabulary(corpus, max_features=20_000)
        assert len(vocab) == 50

    def test_df_ranking_with_lexicographic_ties(self):
        # df(aa) = df(bb) = 3, df(cc) = 1; capacity 2 keeps the tied pair
        corpus = make_corpus(
            [
                ("d1", "aa bb cc", 0),
                ("d2", "aa bb", 0),
                ("d3", "bb aa aa", 0),
            ]
        )
        vocab = build_vocabulary(corpus, max_features=2)
        assert vocab.terms == ("aa", "bb")
        assert vocab.document_frequency == {"aa": 3, "bb": 3}
        assert vocab.index == {"aa": 0, "bb": 1}

    def test_default_capacity_is_20k(self):
        import inspect

        from tarsim import featurize

        signature = inspect.signature(featurize.build_vocabulary)
        assert signature.parameters["max_features"].default == 20_000

    def test_no_tokens(self):
        corpus = make_corpus([("d1", "! ? .", 0)])
        with pytest.raises(NoTokens):
            build_vocabulary(corpus)

    def test_determinism(self):
        corpus = random_text_corpus(60, 0.3, seed=5)
        first = build_vocabulary(corpus, max_features=100)
        second = build_vocabulary(corpus, max_features=100)
        assert first.terms == second.terms

    def test_truncation_invariant(self):
        corpus = random_text_corpus(40, 0.5, seed=9, vocab_size=150)
        distinct = len({t for d in corpus for t in tokenize(d.text)})
        for cap in (1, 10, 149, 150, 10_000):
            vocab = build_vocabulary(corpus, max_features=cap)
            assert len(vocab) == min(distinct, cap)


class TestVectorize:
    def test_normalized_counts(self):
        corpus = make_corpus([("d1", "aa aa bb", 0)])
        vocab = build_vocabulary(corpus)
        vec = vectorize(corpus[0], vocab)
        weights = dict(zip((vocab.terms[p] for p in vec.positions), vec.weights))
        assert weights == {"aa": pytest.approx(2 / 3), "bb": pytest.approx(1 / 3)}

    def test_all_oov_gives_empty_vector(self):
        corpus = make_corpus([("d1", "aa bb", 0)])
        vocab = build_vocabulary(corpus)
        other = make_corpus([("d2", "zz yy", 0)])
        vec = vectorize(other[0], vocab)
        assert len(vec) == 0

    def test_oov_counts_in_denominator(self):
        corpus = make_corpus([("d1", "aa", 0)])
        vocab = build_vocabulary(corpus)
        doc = make_corpus([("d2", "aa zz zz zz", 0)])[0]
        vec = vectorize(doc, vocab)
        assert vec.entries == [(0, pytest.approx(1 / 4))]

    def test_weight_sum_matches_independent_recount(self):
        corpus = random_text_corpus(100, 0.2, seed=11, vocab_size=300)
        vocab = build_vocabulary(corpus, max_features=120)
        in_vocab = set(vocab.terms)
        for doc in corpus:
            tokens = tokenize(doc.text)
            vec = vectorize(doc, vocab)
            hits = sum(1 for t in tokens if t in in_vocab)
            assert vec.weight_sum() == pytest.approx(hits / len(tokens))

    def test_entries_sorted_positive_and_bounded(self):
        corpus = random_text_corpus(50, 0.2, seed=21)
        vocab = build_vocabulary(corpus, max_features=80)
        for doc in corpus:
            vec = vectorize(doc, vocab)
            assert list(vec.positions) == sorted(vec.positions)
            assert all(w > 0 for w in vec.weights)
            assert vec.weight_sum() <= 1 + 1e-12


def test_stack_preserves_rows():
    corpus = make_corpus([("d1", "aa bb", 0), ("d2", "bb bb cc", 0)])
    vocab = build_vocabulary(corpus)
    X = vectorize_corpus(corpus, vocab)
    assert X.shape == (2, 3)
    dense = X.toarray()
    assert dense[0].sum() == pytest.approx(1.0)
    assert dense[1].sum() == pytest.approx(1.0)


def test_vocabulary_csv(tmp_path):
    corpus = make_corpus([("d1", "aa bb aa", 0), ("d2", "aa", 0)])
    vocab = build_vocabulary(corpus)
    out = tmp_path / "vocab.csv"
    write_vocabulary_csv(vocab, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "rank,term,document_frequency"
    assert lines[1] == "0,aa,2"
    assert lines[2] == "1,bb,1"
