"""Experiment driver: seed, train, score, select, repeat.

One experiment walks the full active-learning loop on a labeled corpus:
an initial seed set is drawn, a logistic-regression model is trained on
it, every document outside the training set is scored, the round's
review-percentage metric is recorded, and the selection strategy picks
the next training batch. The grid runner executes every combination of
seed method and selection strategy, optionally across worker processes,
with per-experiment rng streams derived from the master seed so results
do not depend on worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import cluster, featurize, keyword_index, seeding
from .active_selection import (
    STRATEGY_NAMES,
    CutoffContext,
    SelectionStrategy,
    apply_strategy,
)
from .corpus import Corpus, KeywordList
from .errors import ConfigInconsistent
from .metrics import RoundRecord, review_at_recall
from .model import Hyperparams, ScoredDoc, train, score

TERMINATION_EXHAUSTED = "exhausted"
TERMINATION_MAX_ROUNDS = "max_rounds"
TERMINATION_TARGET_MET = "target_met"

FLAG_DEGENERATE_SEED = "degenerate_seed_augmented"

# rng stream tags, combined with the experiment seed
_STREAM_SEED = 0
_STREAM_SELECT = 1
_STREAM_AUGMENT = 2
_STREAM_CLUSTER = 3

_AUGMENT_BATCH = 50

SEED_ENV_VAR = "TARSIM_SEED"


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_path: str = ""
    keywords_path: str | None = None
    seed_method: str = "random"
    al_strategy: str = "TOP"
    seed_size: int = 500
    batch_size: int = 250
    target_recall: float = 0.75
    max_features: int = featurize.DEFAULT_MAX_FEATURES
    max_rounds: int | None = None
    rng_seed: int = 0
    l2_lambda: float = 1e-4
    learning_rate: float = 1.0
    max_iters: int = 300
    tol: float = 1e-7
    branching: int = 3
    depth: int = 5
    min_split: int = 30
    stop_at_review_pct: float | None = None
    log_selections: bool = False

    def __post_init__(self) -> None:
        if self.seed_method not in seeding.SEED_METHODS:
            raise ConfigInconsistent(f"unknown seed method {self.seed_method!r}")
        if self.al_strategy not in STRATEGY_NAMES:
            raise ConfigInconsistent(f"unknown selection strategy {self.al_strategy!r}")
        if self.seed_size < 2:
            raise ConfigInconsistent("seed_size must be >= 2")
        if self.batch_size < 1:
            raise ConfigInconsistent("batch_size must be >= 1")
        if not 0.0 < self.target_recall <= 1.0:
            raise ConfigInconsistent("target_recall must lie in (0, 1]")
        if self.max_features < 1:
            raise ConfigInconsistent("max_features must be >= 1")
        if self.max_rounds is not None and self.max_rounds < 0:
            raise ConfigInconsistent("max_rounds must be >= 0")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigInconsistent(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigInconsistent(str(exc)) from exc

    def to_dict(self) -> dict:
        return asdict(self)

    def strategy(self) -> SelectionStrategy:
        return SelectionStrategy.from_name(self.al_strategy, target_recall=self.target_recall)

    def hyperparams(self) -> Hyperparams:
        return Hyperparams(
            l2_lambda=self.l2_lambda,
            learning_rate=self.learning_rate,
            max_iters=self.max_iters,
            tol=self.tol,
        )


@dataclass(frozen=True)
class ExperimentTrace:
    experiment_id: str
    config: dict
    seed_method: str
    strategy_name: str
    replicate: int
    rounds: tuple[RoundRecord, ...]
    termination: str
    flags: tuple[str, ...] = ()
    selections: tuple[tuple[int, str, float, int], ...] = ()


@dataclass(frozen=True)
class GridFailure:
    experiment_id: str
    error: str


@dataclass(frozen=True)
class GridResult:
    traces: tuple[ExperimentTrace, ...]
    failures: tuple[GridFailure, ...] = ()


@dataclass
class CorpusArtifacts:
    """Per-corpus state shared read-only across a grid."""

    corpus: Corpus
    vocab: featurize.Vocabulary
    vectors: list[featurize.SparseVector]
    hit_sets: list[tuple[str, set[str]]] | None = None
    leaf_assign: dict[str, str] | None = None


def _needs_keywords(methods: Iterable[str]) -> bool:
    return any(m.startswith("keyword") for m in methods)


def _needs_cluster(methods: Iterable[str]) -> bool:
    return any(m.startswith("cluster") for m in methods)


def build_artifacts(
    corpus: Corpus,
    config: ExperimentConfig,
    keywords: KeywordList | None = None,
    seed_methods: Sequence[str] | None = None,
    cluster_seed: int | None = None,
) -> CorpusArtifacts:
    """Vocabulary, vectors, and any seeding inputs the methods need.

    The cluster tree and keyword index depend only on the corpus (plus
    the master seed for the tree), so a grid builds them once.
    """
    methods = seed_methods if seed_methods is not None else [config.seed_method]
    vocab = featurize.build_vocabulary(corpus, config.max_features)
    vectors = [featurize.vectorize(doc, vocab) for doc in corpus]
    hit_sets = None
    if _needs_keywords(methods):
        if keywords is None:
            raise ConfigInconsistent("keyword seeding requires a keywords file")
        index = keyword_index.build_index(corpus)
        hit_sets = keyword_index.hit_sets(index, keywords)
    leaf_assign = None
    if _needs_cluster(methods):
        entropy = config.rng_seed if cluster_seed is None else cluster_seed
        tree = cluster.build_cluster_tree(
            corpus.ids(),
            vectors,
            branching=config.branching,
            depth=config.depth,
            min_split=config.min_split,
            rng_seed=entropy,
        )
        leaf_assign = cluster.leaf_assignments(tree)
    return CorpusArtifacts(
        corpus=corpus, vocab=vocab, vectors=vectors,
        hit_sets=hit_sets, leaf_assign=leaf_assign,
    )


def _stream(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng([seed, tag])


def run_experiment(
    config: ExperimentConfig,
    corpus: Corpus,
    keywords: KeywordList | None = None,
    artifacts: CorpusArtifacts | None = None,
    experiment_id: str | None = None,
    replicate: int = 0,
) -> ExperimentTrace:
    """Run one full active-learning experiment.

    Round r trains on seed_size + r * batch_size documents (capped at the
    corpus), scores the rest, records the review metric, then selects the
    next batch. A round-0 record is always emitted. Stops when the pool
    is empty, max_rounds is reached, or the optional review-percentage
    stop threshold is met.
    """
    if artifacts is None:
        artifacts = build_artifacts(corpus, config, keywords)
    strategy = config.strategy()
    if experiment_id is None:
        experiment_id = f"{config.seed_method}__{strategy.name}__rep{replicate:02d}"

    vectors_by_id = dict(zip(corpus.ids(), artifacts.vectors))
    total_docs = corpus.total
    total_positives = corpus.positives
    flags: list[str] = []

    seed_set = seeding.select_seed(
        corpus,
        config.seed_method,
        min(config.seed_size, total_docs),
        _stream(config.rng_seed, _STREAM_SEED),
        hit_sets=artifacts.hit_sets,
        leaf_assign=artifacts.leaf_assign,
    )
    flags.extend(seed_set.flags)
    training_ids: list[str] = list(seed_set.doc_ids)
    in_training = set(training_ids)

    # Single-class seeds stall the trainer; widen with uniform draws.
    augment_rng = _stream(config.rng_seed, _STREAM_AUGMENT)
    while len(in_training) < total_docs:
        labels_seen = {corpus.label_of(d) for d in training_ids}
        if len(labels_seen) == 2:
            break
        remaining = sorted(set(corpus.ids()) - in_training)
        extra_count = min(_AUGMENT_BATCH, len(remaining))
        draw = augment_rng.choice(len(remaining), size=extra_count, replace=False)
        for i in draw:
            training_ids.append(remaining[i])
            in_training.add(remaining[i])
        if FLAG_DEGENERATE_SEED not in flags:
            flags.append(FLAG_DEGENERATE_SEED)

    select_rng = _stream(config.rng_seed, _STREAM_SELECT)
    hp = config.hyperparams()
    records: list[RoundRecord] = []
    selections: list[tuple[int, str, float, int]] = []
    round_index = 0
    termination = TERMINATION_EXHAUSTED
    while True:
        model = train(
            [(vectors_by_id[d], corpus.label_of(d)) for d in training_ids],
            artifacts.vocab.dim,
            hp,
        )
        pool_ids = [d for d in corpus.ids() if d not in in_training]
        scored = score(
            model, [(d, vectors_by_id[d], corpus.label_of(d)) for d in pool_ids]
        )
        train_positives = sum(corpus.label_of(d) for d in training_ids)
        record = review_at_recall(
            scored,
            train_size=len(training_ids),
            train_positives=train_positives,
            total_docs=total_docs,
            total_positives=total_positives,
            target_recall=config.target_recall,
            round_index=round_index,
        )
        records.append(record)
        if (
            config.stop_at_review_pct is not None
            and 100.0 * record.review_fraction <= config.stop_at_review_pct
        ):
            termination = TERMINATION_TARGET_MET
            break
        if not pool_ids:
            termination = TERMINATION_EXHAUSTED
            break
        if config.max_rounds is not None and round_index >= config.max_rounds:
            termination = TERMINATION_MAX_ROUNDS
            break
        ctx = CutoffContext(
            total_positives=total_positives,
            training_positives=train_positives,
            target_recall=config.target_recall,
        )
        batch = apply_strategy(strategy, scored, config.batch_size, select_rng, ctx)
        if config.log_selections:
            score_by_id = {d.doc_id: d for d in scored}
            selections.extend(
                (round_index, doc_id, score_by_id[doc_id].score, score_by_id[doc_id].label)
                for doc_id in batch
            )
        training_ids.extend(batch)
        in_training.update(batch)
        round_index += 1

    return ExperimentTrace(
        experiment_id=experiment_id,
        config=config.to_dict(),
        seed_method=config.seed_method,
        strategy_name=strategy.name,
        replicate=replicate,
        rounds=tuple(records),
        termination=termination,
        flags=tuple(flags),
        selections=tuple(selections),
    )


def derive_experiment_seed(master_seed: int, experiment_index: int) -> int:
    """Deterministic per-experiment seed from (master seed, index)."""
    state = np.random.SeedSequence([master_seed, experiment_index]).generate_state(2)
    return int(state[0]) << 32 | int(state[1])


_WORKER_STATE: dict = {}


def _init_worker(corpus: Corpus, artifacts: CorpusArtifacts) -> None:
    _WORKER_STATE["corpus"] = corpus
    _WORKER_STATE["artifacts"] = artifacts


def _run_cell(args: tuple[ExperimentConfig, str, int]):
    config, experiment_id, replicate = args
    try:
        trace = run_experiment(
            config,
            _WORKER_STATE["corpus"],
            artifacts=_WORKER_STATE["artifacts"],
            experiment_id=experiment_id,
            replicate=replicate,
        )
        return ("ok", trace)
    except Exception as exc:
        return ("fail", GridFailure(experiment_id=experiment_id, error=str(exc)))


def run_grid(
    corpus: Corpus,
    base_config: ExperimentConfig,
    seed_methods: Sequence[str],
    strategies: Sequence[str],
    replicates: int = 1,
    master_seed: int = 0,
    workers: int = 1,
    keywords: KeywordList | None = None,
) -> GridResult:
    """Every (seed method, strategy, replicate) combination.

    Per-cell failures are collected, not raised, so one bad cell cannot
    abort the grid. Output ordering and content are independent of the
    worker count.
    """
    if not seed_methods or not strategies or replicates < 1:
        raise ConfigInconsistent("grid requires seed methods, strategies, replicates >= 1")
    artifacts = build_artifacts(
        corpus,
        base_config,
        keywords,
        seed_methods=seed_methods,
        cluster_seed=master_seed,
    )
    cells: list[tuple[ExperimentConfig, str, int]] = []
    index = 0
    for method in seed_methods:
        for strategy_name in strategies:
            strategy = SelectionStrategy.from_name(
                strategy_name, target_recall=base_config.target_recall
            )
            for rep in range(replicates):
                config = replace(
                    base_config,
                    seed_method=method,
                    al_strategy=strategy.name,
                    rng_seed=derive_experiment_seed(master_seed, index),
                )
                experiment_id = f"{method}__{strategy.name}__rep{rep:02d}"
                cells.append((config, experiment_id, rep))
                index += 1

    outcomes = []
    if workers <= 1:
        _init_worker(corpus, artifacts)
        outcomes = [_run_cell(cell) for cell in cells]
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(corpus, artifacts),
        ) as pool:
            outcomes = list(pool.map(_run_cell, cells))

    traces = sorted(
        (item for status, item in outcomes if status == "ok"),
        key=lambda t: t.experiment_id,
    )
    failures = sorted(
        (item for status, item in outcomes if status == "fail"),
        key=lambda f: f.experiment_id,
    )
    return GridResult(traces=tuple(traces), failures=tuple(failures))


def master_seed_from_env(default: int) -> int:
    """TARSIM_SEED overrides the configured master seed when set."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigInconsistent(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc


def seed_richness_report(
    corpus: Corpus,
    config: ExperimentConfig,
    keywords: KeywordList | None = None,
    trials: int = 20,
    master_seed: int = 0,
) -> list[tuple[str, float]]:
    """Mean seed-set richness (percent) per seeding method.

    Keyword methods are included only when a keyword list is supplied.
    """
    methods = [m for m in seeding.SEED_METHODS
               if keywords is not None or not m.startswith("keyword")]
    artifacts = build_artifacts(
        corpus, config, keywords, seed_methods=methods, cluster_seed=master_seed
    )
    rows: list[tuple[str, float]] = []
    size = min(config.seed_size, corpus.total)
    for method in methods:
        richness: list[float] = []
        for trial in range(trials):
            rng = np.random.default_rng([master_seed, 17, trial])
            seed_set = seeding.select_seed(
                corpus, method, size, rng,
                hit_sets=artifacts.hit_sets, leaf_assign=artifacts.leaf_assign,
            )
            richness.append(100.0 * seed_set.richness)
        rows.append((method, float(np.mean(richness))))
    return rows
