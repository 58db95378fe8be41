"""Initial training-set selection.

Five methods: uniform random, keyword-stratified (equal or weighted
quotas over keyword hit sets), and cluster-stratified (equal or weighted
quotas over cluster-tree leaves). Weighted quotas use largest-remainder
apportionment so they sum exactly to the requested size. Overlapping
keyword strata are deduplicated; exhausted strata hand their unfilled
quota to the strata that still have documents, proportionally to what
remains. Only when every stratum is exhausted does the sampler fall back
to non-hit documents, and the seed set is flagged when that happens.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from math import floor
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Corpus
from .errors import ConfigInconsistent, NoKeywordHits

SEED_METHODS = (
    "random",
    "keyword_method1",
    "keyword_method2",
    "cluster_method1",
    "cluster_method2",
)

FLAG_SIZE_EXCEEDS_CORPUS = "size_exceeds_corpus"
FLAG_BACKFILLED = "backfilled_from_non_hits"


@dataclass(frozen=True)
class SeedSpec:
    method: str
    size: int = 500
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.method not in SEED_METHODS:
            raise ConfigInconsistent(f"unknown seed method {self.method!r}")
        if self.size < 2:
            raise ConfigInconsistent(f"seed size must be >= 2, got {self.size}")


@dataclass(frozen=True)
class SeedSet:
    doc_ids: tuple[str, ...]
    strata: tuple[str, ...]  # aligned with doc_ids
    positives: int
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.doc_ids)) != len(self.doc_ids):
            raise ValueError("seed set contains duplicate ids")

    def __len__(self) -> int:
        return len(self.doc_ids)

    @property
    def richness(self) -> float:
        return self.positives / len(self.doc_ids)


def _finish(corpus: Corpus, picked: list[str], strata: list[str], flags: Iterable[str]) -> SeedSet:
    positives = sum(corpus.label_of(doc_id) for doc_id in picked)
    return SeedSet(
        doc_ids=tuple(picked),
        strata=tuple(strata),
        positives=positives,
        flags=tuple(flags),
    )


def _draw(pool: Sequence[str], k: int, rng: np.random.Generator) -> list[str]:
    """Uniform sample without replacement from a sorted pool."""
    ordered = sorted(pool)
    if k >= len(ordered):
        idx = rng.permutation(len(ordered))
    else:
        idx = rng.choice(len(ordered), size=k, replace=False)
    return [ordered[i] for i in idx[:k]]


def largest_remainder(weights: Sequence[float], total: int) -> list[int]:
    """Integer quotas proportional to weights, summing exactly to total.

    Ties between equal remainders are broken by list position, earliest
    first, which keeps the apportionment deterministic.
    """
    weight_sum = float(sum(weights))
    if weight_sum <= 0:
        raise ValueError("weights must have a positive sum")
    exact = [total * w / weight_sum for w in weights]
    quotas = [floor(x) for x in exact]
    leftover = total - sum(quotas)
    by_remainder = sorted(range(len(weights)), key=lambda i: (quotas[i] - exact[i], i))
    for i in by_remainder[:leftover]:
        quotas[i] += 1
    return quotas


def _equal_quotas(size: int, strata_count: int) -> list[int]:
    base, remainder = divmod(size, strata_count)
    return [base + (1 if i < remainder else 0) for i in range(strata_count)]


def _stratified_draw(
    strata: list[tuple[str, Sequence[str]]],
    size: int,
    mode: str,
    rng: np.random.Generator,
) -> tuple[list[str], list[str]]:
    """Draw up to ``size`` docs across strata; returns (ids, stratum labels).

    May return fewer than ``size`` ids when the strata are exhausted;
    the caller decides how to backfill.
    """
    if mode not in ("equal", "weighted"):
        raise ConfigInconsistent(f"unknown stratification mode {mode!r}")
    if mode == "equal":
        quotas = _equal_quotas(size, len(strata))
    else:
        quotas = largest_remainder([len(ids) for _, ids in strata], size)

    picked: list[str] = []
    labels: list[str] = []
    picked_set: set[str] = set()
    while True:
        for i, (name, ids) in enumerate(strata):
            if quotas[i] <= 0:
                continue
            available = [d for d in ids if d not in picked_set]
            for doc_id in _draw(available, quotas[i], rng):
                picked.append(doc_id)
                labels.append(name)
                picked_set.add(doc_id)
            quotas[i] = 0
        shortfall = size - len(picked)
        if shortfall <= 0:
            return picked, labels
        remaining = [sum(1 for d in ids if d not in picked_set) for _, ids in strata]
        if sum(remaining) == 0:
            return picked, labels
        quotas = largest_remainder(remaining, min(shortfall, sum(remaining)))


def seed_random(corpus: Corpus, size: int, rng: np.random.Generator) -> SeedSet:
    """Uniform sample without replacement over the whole corpus."""
    if size < 1:
        raise ValueError("size must be >= 1")
    if size >= corpus.total:
        flags = (FLAG_SIZE_EXCEEDS_CORPUS,) if size > corpus.total else ()
        ids = list(corpus.ids())
        return _finish(corpus, ids, ["random"] * len(ids), flags)
    picked = _draw(corpus.ids(), size, rng)
    return _finish(corpus, picked, ["random"] * len(picked), ())


def seed_keyword_stratified(
    corpus: Corpus,
    hit_sets: Sequence[tuple[str, Iterable[str]]],
    size: int,
    mode: str,
    rng: np.random.Generator,
) -> SeedSet:
    """Stratify over keyword hit sets, in keyword order.

    equal: floor(size / strata) each, remainder one per keyword in order.
    weighted: quotas proportional to hit-set size (largest remainder).
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    strata = [(name, sorted(set(ids))) for name, ids in hit_sets if ids]
    if not strata:
        raise NoKeywordHits("every keyword hit set is empty")
    picked, labels = _stratified_draw(strata, size, mode, rng)
    flags: list[str] = []
    shortfall = size - len(picked)
    if shortfall > 0:
        union: set[str] = set()
        for _, ids in strata:
            union.update(ids)
        non_hits = [d for d in corpus.ids() if d not in union]
        backfill = _draw(non_hits, min(shortfall, len(non_hits)), rng)
        if backfill:
            flags.append(FLAG_BACKFILLED)
            picked.extend(backfill)
            labels.extend(["non_hit"] * len(backfill))
        if len(picked) < size:
            flags.append(FLAG_SIZE_EXCEEDS_CORPUS)
    return _finish(corpus, picked, labels, flags)


def _leaf_sort_key(leaf_id: str) -> tuple[int, ...]:
    return tuple(int(p) for p in leaf_id.split(".")) if leaf_id else ()


def seed_cluster_stratified(
    corpus: Corpus,
    leaf_assignments: dict[str, str],
    size: int,
    mode: str,
    rng: np.random.Generator,
) -> SeedSet:
    """Stratify over cluster leaves; leaves are disjoint so no dedup occurs."""
    if size < 1:
        raise ValueError("size must be >= 1")
    by_leaf: dict[str, list[str]] = {}
    for doc_id, leaf_id in leaf_assignments.items():
        by_leaf.setdefault(leaf_id, []).append(doc_id)
    strata = [(leaf_id, by_leaf[leaf_id]) for leaf_id in sorted(by_leaf, key=_leaf_sort_key)]
    picked, labels = _stratified_draw(strata, size, mode, rng)
    flags = (FLAG_SIZE_EXCEEDS_CORPUS,) if len(picked) < size else ()
    return _finish(corpus, picked, labels, flags)


def select_seed(
    corpus: Corpus,
    method: str,
    size: int,
    rng: np.random.Generator,
    hit_sets: Sequence[tuple[str, Iterable[str]]] | None = None,
    leaf_assign: dict[str, str] | None = None,
) -> SeedSet:
    """Dispatch on the five method names; raises ConfigInconsistent when
    a method's inputs are missing."""
    if method == "random":
        return seed_random(corpus, size, rng)
    if method in ("keyword_method1", "keyword_method2"):
        if hit_sets is None:
            raise ConfigInconsistent(f"{method} requires keyword hit sets")
        mode = "equal" if method == "keyword_method1" else "weighted"
        return seed_keyword_stratified(corpus, hit_sets, size, mode, rng)
    if method in ("cluster_method1", "cluster_method2"):
        if leaf_assign is None:
            raise ConfigInconsistent(f"{method} requires cluster leaf assignments")
        mode = "equal" if method == "cluster_method1" else "weighted"
        return seed_cluster_stratified(corpus, leaf_assign, size, mode, rng)
    raise ConfigInconsistent(f"unknown seed method {method!r}")


def write_seed_manifest(seed: SeedSet, corpus: Corpus, path: str | Path) -> None:
    """Audit dump: doc_id, stratum, label in draw order."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "stratum", "label"])
        for doc_id, stratum in zip(seed.doc_ids, seed.strata):
            writer.writerow([doc_id, stratum, corpus.label_of(doc_id)])
