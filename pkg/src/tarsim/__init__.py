"""Active-learning predictive-coding simulator.

Simulates recall-targeted document review over fully labeled corpora:
five seed-set selection methods, six per-round selection strategies, a
deterministic logistic-regression trainer, and reporting of the
percentage of documents requiring review to reach a target recall.
"""

__version__ = "0.1.0"

from .corpus import Corpus, Document, KeywordList, corpus_stats, load_corpus, load_keywords
from .featurize import Vocabulary, build_vocabulary, tokenize, vectorize
from .harness import ExperimentConfig, ExperimentTrace, run_experiment, run_grid
from .metrics import RoundRecord, optimum_analysis, review_at_recall, summary_table

__all__ = [
    "__version__",
    "Corpus",
    "Document",
    "KeywordList",
    "corpus_stats",
    "load_corpus",
    "load_keywords",
    "Vocabulary",
    "build_vocabulary",
    "tokenize",
    "vectorize",
    "ExperimentConfig",
    "ExperimentTrace",
    "run_experiment",
    "run_grid",
    "RoundRecord",
    "optimum_analysis",
    "review_at_recall",
    "summary_table",
]
