from __future__ import annotations

import math

import numpy as np
import pytest

from tarsim.errors import MissingRound, TargetUnreachable
from tarsim.metrics import (
    RoundRecord,
    cutoff_display,
    optimum_analysis,
    optimum_from_fractions,
    review_at_recall,
    summary_table,
)
from tarsim.model import ScoredDoc


def pool(*scores_labels: tuple[float, int]) -> list[ScoredDoc]:
    return [
        ScoredDoc(doc_id=f"d{i:03d}", score=s, label=l)
        for i, (s, l) in enumerate(scores_labels)
    ]


def record(round_index: int, review_pct: float) -> RoundRecord:
    return RoundRecord(
        round=round_index,
        train_size=100,
        train_positives=10,
        cutoff=0.5,
        docs_at_or_above_cutoff=50,
        positives_at_or_above_cutoff=20,
        review_fraction=review_pct / 100.0,
        recall_achieved=0.75,
    )


def brute_force_min_review(scored, train_size, train_positives, N, P, target):
    """Exhaustive minimum over every threshold reaching the recall target."""
    best = None
    for t in [math.inf] + sorted({d.score for d in scored}, reverse=True):
        pos = sum(1 for d in scored if d.label == 1 and d.score >= t)
        docs = sum(1 for d in scored if d.score >= t)
        if (train_positives + pos) / P >= target:
            fraction = (train_size + docs) / N
            best = fraction if best is None else min(best, fraction)
    return best


class TestReviewAtRecall:
    def test_worked_example_project_scale(self):
        # N=308,621; P=46,730; 3,000 trained (2,491 positive); the pool is
        # built so exactly 82,206 docs (32,558 positive) sit at or above
        # 0.247 with the feasibility boundary exactly there.
        rng = np.random.default_rng(0)
        scores = np.concatenate([
            rng.uniform(0.2471, 0.999, 32_556),
            np.full(2, 0.247),
            rng.uniform(0.001, 0.2469, 11_681),
            rng.uniform(0.2471, 0.999, 49_648),
            rng.uniform(0.001, 0.2469, 211_734),
        ])
        labels = np.concatenate([
            np.ones(44_239, dtype=int), np.zeros(261_382, dtype=int),
        ])
        scored = [
            ScoredDoc(f"d{i}", float(s), int(l))
            for i, (s, l) in enumerate(zip(scores, labels))
        ]
        result = review_at_recall(
            scored, train_size=3_000, train_positives=2_491,
            total_docs=308_621, total_positives=46_730, target_recall=0.75,
        )
        assert result.cutoff == pytest.approx(0.247)
        assert result.docs_at_or_above_cutoff == 82_206
        assert result.positives_at_or_above_cutoff == 32_558
        assert abs(100.0 * result.review_fraction - 27.6) < 0.05
        assert result.recall_achieved == 35_049 / 46_730

    def test_everything_found_in_training(self):
        scored = pool((0.9, 0), (0.1, 0))
        result = review_at_recall(
            scored, train_size=10, train_positives=5,
            total_docs=12, total_positives=5, target_recall=0.75,
        )
        assert math.isinf(result.cutoff)
        assert result.docs_at_or_above_cutoff == 0
        assert result.review_fraction == pytest.approx(10 / 12)
        assert result.recall_achieved == pytest.approx(1.0)

    def test_matches_exhaustive_threshold_scan(self):
        rng = np.random.default_rng(50)
        for _ in range(30):
            n = int(rng.integers(10, 50))
            scored = [
                ScoredDoc(f"d{i:03d}", float(rng.uniform(0.01, 0.99)), int(rng.integers(0, 2)))
                for i in range(n)
            ]
            train_size = int(rng.integers(1, 10))
            train_pos = int(rng.integers(0, train_size + 1))
            P = sum(d.label for d in scored) + train_pos
            N = n + train_size
            if P == 0:
                continue
            result = review_at_recall(scored, train_size, train_pos, N, P, 0.75)
            expected = brute_force_min_review(scored, train_size, train_pos, N, P, 0.75)
            assert result.review_fraction == pytest.approx(expected, abs=0)
            assert result.recall_achieved >= 0.75

    def test_recall_always_met_for_finite_cutoff(self):
        rng = np.random.default_rng(60)
        for _ in range(20):
            scored = [
                ScoredDoc(f"d{i:03d}", float(rng.uniform(0.01, 0.99)), int(rng.integers(0, 2)))
                for i in range(30)
            ]
            P = sum(d.label for d in scored)
            if P == 0:
                continue
            result = review_at_recall(scored, 5, 0, 35, P, 0.9)
            if not math.isinf(result.cutoff):
                assert result.recall_achieved >= 0.9

    def test_target_unreachable(self):
        scored = pool((0.9, 0), (0.5, 0))
        with pytest.raises(TargetUnreachable):
            review_at_recall(scored, 2, 0, 4, 10, 0.75)


class TestOptimumAnalysis:
    def test_strictly_decreasing_trace(self):
        trace = [record(i, pct) for i, pct in enumerate([40.0, 30.0, 25.0, 22.0, 20.0])]
        report = optimum_analysis(trace)
        assert report.optimum_round == 4
        assert report.optimum_review == pytest.approx(0.20)
        assert report.first_within[0.05] == 4  # 22.0 > 20 * 1.05 = 21.0
        assert report.first_within[0.10] == 3  # 22.0 <= 22.0
        assert report.first_within[0.15] == 3

    def test_hand_computed_thresholds(self):
        trace = [record(i, pct) for i, pct in enumerate([30.0, 20.0, 19.5, 19.6])]
        report = optimum_analysis(trace)
        assert report.optimum_round == 2
        assert report.optimum_review == pytest.approx(0.195)
        assert report.first_within[0.05] == 1  # 20.0 <= 19.5 * 1.05 = 20.475
        assert report.first_within[0.10] == 1
        assert report.first_within[0.15] == 1

    def test_constant_trace_round_zero(self):
        trace = [record(i, 25.0) for i in range(4)]
        report = optimum_analysis(trace)
        assert report.optimum_round == 0
        assert all(report.first_within[t] == 0 for t in (0.05, 0.10, 0.15))

    def test_tie_at_minimum_resolves_earliest(self):
        trace = [record(i, pct) for i, pct in enumerate([30.0, 20.0, 25.0, 20.0])]
        assert optimum_analysis(trace).optimum_round == 1

    def test_appending_worse_round_keeps_optimum(self):
        trace = [record(i, pct) for i, pct in enumerate([30.0, 20.0])]
        extended = trace + [record(2, 35.0)]
        assert optimum_analysis(trace).optimum_round == optimum_analysis(extended).optimum_round

    def test_first_within_monotone_in_tolerance(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            fractions = rng.uniform(0.1, 0.9, size=12).tolist()
            report = optimum_from_fractions(fractions)
            assert report.first_within[0.05] >= report.first_within[0.10]
            assert report.first_within[0.10] >= report.first_within[0.15]
            assert all(v <= report.optimum_round for v in report.first_within.values())

    def test_absolute_mode(self):
        report = optimum_from_fractions([0.30, 0.22, 0.20], mode="absolute")
        # 0.22 <= 0.20 + 0.05 qualifies at round 1
        assert report.first_within[0.05] == 1

    def test_empty_trace_rejected(self):
        with pytest.raises(ValueError):
            optimum_analysis([])


class TestSummaryTable:
    def test_two_strategy_schema(self):
        traces = {
            "TOP": [record(i, 30.0 - i) for i in range(15)],
            "MID_75RC": [record(i, 25.0 - i) for i in range(15)],
        }
        table = summary_table(traces, rounds=(10,))
        assert table.rounds == (10,)
        assert table.strategies == ("TOP", "MID_75RC")
        assert table.review[(10, "TOP")] == pytest.approx(0.20)
        assert table.review[(10, "MID_75RC")] == pytest.approx(0.15)
        assert table.pairs() == [("TOP", "MID_75RC")]

    def test_difference_computed_unrounded(self):
        traces = {
            "TOP": [record(i, 28.345) for i in range(11)],
            "MID_75RC": [record(i, 18.216) for i in range(11)],
        }
        table = summary_table(traces, rounds=(10,))
        diff = table.differences[(10, ("TOP", "MID_75RC"))]
        assert diff == pytest.approx((28.345 - 18.216) / 100.0)

    def test_missing_round(self):
        traces = {"TOP": [record(0, 30.0)]}
        with pytest.raises(MissingRound):
            summary_table(traces, rounds=(10,))


def test_cutoff_display_scale():
    assert cutoff_display(0.247) == repr(24.7)
    assert cutoff_display(math.inf) == "inf"
