"""Review-percentage metric and optimum-round analysis.

The headline cost metric for a round is (training documents + documents
scoring at or above the recall cutoff) / corpus size: the share of the
population a review team would touch to reach the target recall given
the current model's ranking. The optimum round is the earliest round
attaining the minimum of that metric; the "first round within x%"
statistics report how quickly each strategy gets close to its optimum.

All fractions are kept at full precision; rounding happens only in
report formatting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .active_selection import CutoffContext, oracle_cutoff, required_positives
from .errors import MissingRound, TargetUnreachable
from .model import ScoredDoc

DEFAULT_TOLERANCES = (0.05, 0.10, 0.15)


@dataclass(frozen=True)
class RoundRecord:
    round: int  # 0 = seed-only model
    train_size: int
    train_positives: int
    cutoff: float  # may be +inf when training already meets the target
    docs_at_or_above_cutoff: int
    positives_at_or_above_cutoff: int
    review_fraction: float
    recall_achieved: float


@dataclass(frozen=True)
class OptimumReport:
    optimum_round: int
    optimum_review: float
    first_within: dict[float, int]  # tolerance -> earliest qualifying round


def review_at_recall(
    scored: Sequence[ScoredDoc],
    train_size: int,
    train_positives: int,
    total_docs: int,
    total_positives: int,
    target_recall: float,
    round_index: int = 0,
) -> RoundRecord:
    """Score-threshold review cost for one round.

    The cutoff is the highest score that still captures enough pool
    positives to reach the recall target; every document at or above it
    counts toward the review set, on top of the training documents.
    """
    ctx = CutoffContext(
        total_positives=total_positives,
        training_positives=train_positives,
        target_recall=target_recall,
    )
    needed = required_positives(ctx)
    pool_positives = sum(1 for d in scored if d.label == 1)
    if pool_positives < needed:
        raise TargetUnreachable(
            f"{train_positives} training + {pool_positives} pool positives "
            f"cannot reach recall {target_recall} of {total_positives}"
        )
    cutoff = oracle_cutoff(scored, ctx)
    if math.isinf(cutoff):
        docs_above = 0
        positives_above = 0
    else:
        docs_above = sum(1 for d in scored if d.score >= cutoff)
        positives_above = sum(1 for d in scored if d.score >= cutoff and d.label == 1)
    recall = (
        (train_positives + positives_above) / total_positives
        if total_positives
        else 1.0  # vacuous target: nothing to find
    )
    return RoundRecord(
        round=round_index,
        train_size=train_size,
        train_positives=train_positives,
        cutoff=cutoff,
        docs_at_or_above_cutoff=docs_above,
        positives_at_or_above_cutoff=positives_above,
        review_fraction=(train_size + docs_above) / total_docs,
        recall_achieved=recall,
    )


def optimum_from_fractions(
    fractions: Sequence[float],
    tolerances: Sequence[float] = DEFAULT_TOLERANCES,
    mode: str = "relative",
) -> OptimumReport:
    """Optimum analysis over raw per-round review fractions.

    relative mode: a round qualifies at tolerance t when its review
    fraction is <= optimum * (1 + t). absolute mode: <= optimum + t,
    with t read as a fraction of the corpus.
    """
    if not fractions:
        raise ValueError("empty trace")
    if mode not in ("relative", "absolute"):
        raise ValueError(f"unknown tolerance mode {mode!r}")
    optimum_review = min(fractions)
    optimum_round = fractions.index(optimum_review)
    first_within: dict[float, int] = {}
    for tol in tolerances:
        bound = optimum_review * (1.0 + tol) if mode == "relative" else optimum_review + tol
        first_within[tol] = next(i for i, f in enumerate(fractions) if f <= bound)
    return OptimumReport(
        optimum_round=optimum_round,
        optimum_review=optimum_review,
        first_within=first_within,
    )


def optimum_analysis(
    trace: Sequence[RoundRecord],
    tolerances: Sequence[float] = DEFAULT_TOLERANCES,
    mode: str = "relative",
) -> OptimumReport:
    """Earliest minimum-review round plus first-round-within statistics."""
    return optimum_from_fractions(
        [r.review_fraction for r in trace], tolerances, mode
    )


@dataclass(frozen=True)
class SummaryTable:
    rounds: tuple[int, ...]
    strategies: tuple[str, ...]
    # review fraction per (round, strategy), full precision
    review: dict[tuple[int, str], float]
    # unrounded pairwise differences per (round, (a, b)) = review[a] - review[b]
    differences: dict[tuple[int, tuple[str, str]], float]

    def pairs(self) -> list[tuple[str, str]]:
        return [
            (a, b)
            for i, a in enumerate(self.strategies)
            for b in self.strategies[i + 1:]
        ]


def summary_table(
    traces_by_strategy: Mapping[str, Sequence[RoundRecord]],
    rounds: Sequence[int] = (10, 20, 30, 40, 50),
) -> SummaryTable:
    """Review fractions at sampled rounds per strategy, with pairwise
    differences computed on the unrounded values."""
    strategies = tuple(traces_by_strategy)
    review: dict[tuple[int, str], float] = {}
    for strategy, trace in traces_by_strategy.items():
        by_round = {r.round: r.review_fraction for r in trace}
        for round_index in rounds:
            if round_index not in by_round:
                raise MissingRound(round_index, strategy)
            review[(round_index, strategy)] = by_round[round_index]
    differences: dict[tuple[int, tuple[str, str]], float] = {}
    for round_index in rounds:
        for i, a in enumerate(strategies):
            for b in strategies[i + 1:]:
                differences[(round_index, (a, b))] = (
                    review[(round_index, a)] - review[(round_index, b)]
                )
    return SummaryTable(
        rounds=tuple(rounds),
        strategies=strategies,
        review=review,
        differences=differences,
    )


def cutoff_display(cutoff: float) -> str:
    """Cutoffs are reported on the 0-100 score scale; inf stays inf."""
    if math.isinf(cutoff):
        return "inf"
    return repr(100.0 * cutoff)
