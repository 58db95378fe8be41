"""Per-round training-document selection strategies.

Six strategies over the scored pool: top-ranked, nearest-to-0.5
uncertainty, nearest-to-recall-cutoff, uniform random, and two hybrids
mixing top-ranked with random picks. The recall cutoff is the highest
score threshold at which the documents at or above it, together with
the positives already in training, cover the target fraction of all
positives. Ties are broken by document id everywhere so every selector
is deterministic given the pool and the rng seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    ConfigInconsistent,
    EmptyPool,
    InsufficientPositives,
    NoPositivesInControl,
)
from .model import ScoredDoc

STRATEGY_NAMES = ("TOP", "MID_50", "MID_75RC", "RAND", "80TOP20RD", "20TOP80RD")


@dataclass(frozen=True)
class SelectionStrategy:
    kind: str  # TOP | MID_50 | MID_75RC | RAND | HYBRID
    top_fraction: float = 1.0  # HYBRID only
    target_recall: float = 0.75  # MID_75RC only

    def __post_init__(self) -> None:
        if self.kind not in ("TOP", "MID_50", "MID_75RC", "RAND", "HYBRID"):
            raise ConfigInconsistent(f"unknown strategy kind {self.kind!r}")
        if not 0.0 <= self.top_fraction <= 1.0:
            raise ConfigInconsistent(f"top_fraction {self.top_fraction} outside [0, 1]")
        if not 0.0 < self.target_recall <= 1.0:
            raise ConfigInconsistent(f"target_recall {self.target_recall} outside (0, 1]")

    @classmethod
    def from_name(cls, name: str, target_recall: float = 0.75) -> "SelectionStrategy":
        normalized = name.strip().upper().replace("-", "_")
        if normalized == "TOP":
            return cls(kind="TOP")
        if normalized == "MID_50":
            return cls(kind="MID_50")
        if normalized == "MID_75RC":
            return cls(kind="MID_75RC", target_recall=target_recall)
        if normalized == "RAND":
            return cls(kind="RAND")
        if normalized == "80TOP20RD":
            return cls(kind="HYBRID", top_fraction=0.8)
        if normalized == "20TOP80RD":
            return cls(kind="HYBRID", top_fraction=0.2)
        raise ConfigInconsistent(f"unknown strategy name {name!r}")

    @property
    def name(self) -> str:
        if self.kind == "HYBRID":
            top = int(round(self.top_fraction * 100))
            return f"{top}TOP{100 - top}RD"
        return self.kind


@dataclass(frozen=True)
class CutoffContext:
    total_positives: int
    training_positives: int
    target_recall: float

    def __post_init__(self) -> None:
        if not 0 <= self.training_positives <= self.total_positives:
            raise ValueError(
                f"training positives {self.training_positives} outside "
                f"[0, {self.total_positives}]"
            )
        if not 0.0 < self.target_recall <= 1.0:
            raise ValueError(f"target recall {self.target_recall} outside (0, 1]")


def required_positives(ctx: CutoffContext) -> int:
    """Smallest count c with (training positives + c) / total >= target.

    Nominally ceil(target * total) - training positives, but the ceiling
    is pinned to the float comparison that defines achieved recall, so a
    target like 0.9 never demands one extra positive through rounding.
    """
    total, trained, target = ctx.total_positives, ctx.training_positives, ctx.target_recall
    if total == 0:
        return 0
    needed = max(0, math.ceil(target * total) - trained)
    while needed > 0 and (trained + needed - 1) / total >= target:
        needed -= 1
    while (trained + needed) / total < target:
        needed += 1
    return needed


def select_top(scored: Sequence[ScoredDoc], k: int) -> list[str]:
    """The k highest-scored documents; ties by doc id ascending."""
    _check_pool(scored, k)
    ranked = sorted(scored, key=lambda d: (-d.score, d.doc_id))
    return [d.doc_id for d in ranked[:k]]


def select_mid(scored: Sequence[ScoredDoc], k: int, center: float = 0.5) -> list[str]:
    """The k documents nearest the center score, either side."""
    _check_pool(scored, k)
    ranked = sorted(scored, key=lambda d: (abs(d.score - center), d.doc_id))
    return [d.doc_id for d in ranked[:k]]


def oracle_cutoff(scored: Sequence[ScoredDoc], ctx: CutoffContext) -> float:
    """Highest score t such that the positives scoring >= t, plus the
    training positives, meet the recall target.

    Returns +inf when training alone already meets the target. Raises
    InsufficientPositives when the pool holds fewer positives than needed.
    """
    needed = required_positives(ctx)
    if needed == 0:
        return math.inf
    positive_scores = sorted((d.score for d in scored if d.label == 1), reverse=True)
    if len(positive_scores) < needed:
        raise InsufficientPositives(
            f"pool has {len(positive_scores)} positives, recall target needs {needed}"
        )
    return positive_scores[needed - 1]


def select_mid_recall(scored: Sequence[ScoredDoc], ctx: CutoffContext, k: int) -> list[str]:
    """The k documents nearest the recall cutoff, either side.

    When the target is already met the cutoff sits above every score, so
    the ordering degenerates to plain top-ranked selection.
    """
    _check_pool(scored, k)
    cutoff = oracle_cutoff(scored, ctx)
    if math.isinf(cutoff):
        return select_top(scored, k)
    ranked = sorted(scored, key=lambda d: (abs(d.score - cutoff), d.doc_id))
    return [d.doc_id for d in ranked[:k]]


def estimate_cutoff_from_control(
    control: Sequence[ScoredDoc],
    target_recall: float,
) -> float:
    """Cutoff estimated from a uniform labeled control sample: the score
    of the ceil(target * positives)-th positive in descending order."""
    positive_scores = sorted((d.score for d in control if d.label == 1), reverse=True)
    if not positive_scores:
        raise NoPositivesInControl("control sample holds no positives")
    count = len(positive_scores)
    needed = min(count, max(1, math.ceil(target_recall * count)))
    while needed > 1 and (needed - 1) / count >= target_recall:
        needed -= 1
    return positive_scores[needed - 1]


def select_random(scored: Sequence[ScoredDoc], k: int, rng: np.random.Generator) -> list[str]:
    """Uniform sample without replacement from the pool."""
    _check_pool(scored, k)
    ids = sorted(d.doc_id for d in scored)
    if k >= len(ids):
        order = rng.permutation(len(ids))
    else:
        order = rng.choice(len(ids), size=k, replace=False)
    return [ids[i] for i in order[:k]]


def select_hybrid(
    scored: Sequence[ScoredDoc],
    k: int,
    top_fraction: float,
    rng: np.random.Generator,
) -> list[str]:
    """Round-half-up share of top-ranked picks, remainder random from
    the rest of the pool."""
    _check_pool(scored, k)
    if not 0.0 <= top_fraction <= 1.0:
        raise ConfigInconsistent(f"top_fraction {top_fraction} outside [0, 1]")
    k_top = int(math.floor(top_fraction * k + 0.5))
    picked = select_top(scored, k_top) if k_top > 0 else []
    if k_top >= k:
        return picked
    taken = set(picked)
    rest = [d for d in scored if d.doc_id not in taken]
    if rest:
        picked.extend(select_random(rest, k - k_top, rng))
    return picked


def apply_strategy(
    strategy: SelectionStrategy,
    scored: Sequence[ScoredDoc],
    k: int,
    rng: np.random.Generator,
    ctx: CutoffContext | None = None,
) -> list[str]:
    """Run one strategy; MID_75RC requires a cutoff context."""
    if strategy.kind == "TOP":
        return select_top(scored, k)
    if strategy.kind == "MID_50":
        return select_mid(scored, k, 0.5)
    if strategy.kind == "MID_75RC":
        if ctx is None:
            raise ConfigInconsistent("MID_75RC needs a cutoff context")
        return select_mid_recall(scored, ctx, k)
    if strategy.kind == "RAND":
        return select_random(scored, k, rng)
    return select_hybrid(scored, k, strategy.top_fraction, rng)


def _check_pool(scored: Sequence[ScoredDoc], k: int) -> None:
    if not scored:
        raise EmptyPool("selection from an empty pool")
    if k < 1:
        raise ValueError("k must be >= 1")


def write_selection_manifest(
    rows: Sequence[tuple[int, str, float, int, str]],
    path: str | Path,
) -> None:
    """Audit dump: round, doc_id, score, label, strategy."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "doc_id", "score", "label", "strategy"])
        for round_index, doc_id, doc_score, label, strategy in rows:
            writer.writerow([round_index, doc_id, repr(doc_score), label, strategy])
