"""Figure rendering for experiment reports.

Renders the two standard report figures next to the CSV output: review
percentage per round (one curve per experiment, colored by strategy) and
a bar chart of each experiment's optimum round. Uses the Agg backend and
strips volatile PNG metadata so re-rendering the same data reproduces
identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SAVE_KWARGS = {"dpi": 120, "metadata": {"Software": None}}


def _strategy_colors(strategies: Sequence[str]) -> dict[str, str]:
    palette = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    ordered = sorted(set(strategies))
    return {name: palette[i % len(palette)] for i, name in enumerate(ordered)}


def render_review_curves(
    curves: Mapping[str, tuple[Sequence[int], Sequence[float], str]],
    path: str | Path,
    target_recall: float | None = None,
) -> None:
    """One line per experiment: review percentage against round.

    ``curves`` maps experiment id to (rounds, review percentages,
    strategy name). Legend entries are deduplicated per strategy.
    """
    if not curves:
        return
    colors = _strategy_colors([strategy for _, _, strategy in curves.values()])
    fig, ax = plt.subplots(figsize=(8, 5))
    labeled: set[str] = set()
    for experiment_id in sorted(curves):
        rounds, review_pct, strategy = curves[experiment_id]
        label = strategy if strategy not in labeled else None
        labeled.add(strategy)
        ax.plot(rounds, review_pct, color=colors[strategy], label=label, linewidth=1.2)
    ax.set_xlabel("Active learning round")
    if target_recall is not None:
        ax.set_ylabel(f"Review % at {100 * target_recall:g}% recall")
    else:
        ax.set_ylabel("Review % at target recall")
    ax.set_title("Required review by round")
    ax.legend(loc="upper right", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def render_optimum_bars(
    optima: Mapping[str, tuple[int, str]],
    path: str | Path,
) -> None:
    """Optimum round per experiment, colored by strategy."""
    if not optima:
        return
    colors = _strategy_colors([strategy for _, strategy in optima.values()])
    ids = sorted(optima)
    rounds = [optima[i][0] for i in ids]
    bar_colors = [colors[optima[i][1]] for i in ids]
    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(ids)), 5))
    ax.bar(range(len(ids)), rounds, color=bar_colors)
    ax.set_xticks(range(len(ids)))
    ax.set_xticklabels(ids, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("Optimum round")
    ax.set_title("Earliest round of minimum required review")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
