"""Report emission: delimited files, a run manifest, and figures.

Every run produces a per-round CSV (the authoritative record, floats at
full precision), an optimum-round CSV, a summary CSV of review
percentages at sampled rounds with pairwise strategy differences, corpus
and keyword statistics when available, a JSON manifest of the exact
configuration and library versions, and rendered PNG figures. Files are
sorted by stable keys and contain no timestamps, so emitting the same
traces twice produces identical bytes.

``analyze`` rebuilds the derived tables and figures from a previously
written per-round CSV.
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__, plots
from .corpus import Corpus, KeywordList, corpus_stats
from .errors import DataError, IoFailure, MissingFile
from .harness import ExperimentTrace, GridFailure
from .keyword_index import build_index, keyword_report
from .metrics import DEFAULT_TOLERANCES, cutoff_display, optimum_from_fractions

SUMMARY_ROUNDS = (10, 20, 30, 40, 50)

ROUNDS_CSV = "rounds.csv"
OPTIMUM_CSV = "optimum.csv"
SUMMARY_CSV = "summary.csv"
CORPUS_STATS_CSV = "corpus_stats.csv"
KEYWORD_HITS_CSV = "keyword_hits.csv"
MANIFEST_JSON = "manifest.json"
CURVES_PNG = "review_curves.png"
OPTIMUM_PNG = "optimum_rounds.png"

_ROUNDS_HEADER = [
    "experiment_id", "round", "train_size", "train_positives",
    "cutoff_display", "docs_at_cutoff", "review_pct", "recall_pct",
]


@dataclass(frozen=True)
class RoundRow:
    experiment_id: str
    seed_method: str
    strategy: str
    replicate: int
    round: int
    train_size: int
    train_positives: int
    cutoff_display: str
    docs_at_cutoff: int
    review_fraction: float
    recall: float


def split_experiment_id(experiment_id: str) -> tuple[str, str, int]:
    """Experiment ids are `<seed_method>__<strategy>__repNN`."""
    parts = experiment_id.split("__")
    if len(parts) != 3 or not parts[2].startswith("rep"):
        raise DataError(f"unparseable experiment id {experiment_id!r}")
    return parts[0], parts[1], int(parts[2][3:])


def rows_from_traces(traces: Sequence[ExperimentTrace]) -> list[RoundRow]:
    rows: list[RoundRow] = []
    for trace in traces:
        for record in trace.rounds:
            rows.append(
                RoundRow(
                    experiment_id=trace.experiment_id,
                    seed_method=trace.seed_method,
                    strategy=trace.strategy_name,
                    replicate=trace.replicate,
                    round=record.round,
                    train_size=record.train_size,
                    train_positives=record.train_positives,
                    cutoff_display=cutoff_display(record.cutoff),
                    docs_at_cutoff=record.docs_at_or_above_cutoff,
                    review_fraction=record.review_fraction,
                    recall=record.recall_achieved,
                )
            )
    rows.sort(key=lambda r: (r.experiment_id, r.round))
    return rows


def read_round_rows(path: str | Path) -> list[RoundRow]:
    """Parse a rounds.csv back into rows for re-analysis."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"no per-round file at {path}")
    rows: list[RoundRow] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != _ROUNDS_HEADER:
            raise DataError(f"unexpected columns in {path}: {reader.fieldnames}")
        for raw in reader:
            seed_method, strategy, replicate = split_experiment_id(raw["experiment_id"])
            rows.append(
                RoundRow(
                    experiment_id=raw["experiment_id"],
                    seed_method=seed_method,
                    strategy=strategy,
                    replicate=replicate,
                    round=int(raw["round"]),
                    train_size=int(raw["train_size"]),
                    train_positives=int(raw["train_positives"]),
                    cutoff_display=raw["cutoff_display"],
                    docs_at_cutoff=int(raw["docs_at_cutoff"]),
                    review_fraction=float(raw["review_pct"]) / 100.0,
                    recall=float(raw["recall_pct"]) / 100.0,
                )
            )
    rows.sort(key=lambda r: (r.experiment_id, r.round))
    return rows


def _write_rounds(rows: Sequence[RoundRow], path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_ROUNDS_HEADER)
        for r in rows:
            writer.writerow([
                r.experiment_id, r.round, r.train_size, r.train_positives,
                r.cutoff_display, r.docs_at_cutoff,
                repr(100.0 * r.review_fraction), repr(100.0 * r.recall),
            ])


def _by_experiment(rows: Sequence[RoundRow]) -> dict[str, list[RoundRow]]:
    grouped: dict[str, list[RoundRow]] = {}
    for row in rows:
        grouped.setdefault(row.experiment_id, []).append(row)
    for experiment_rows in grouped.values():
        experiment_rows.sort(key=lambda r: r.round)
    return grouped


def _write_optimum(rows: Sequence[RoundRow], path: Path) -> None:
    header = ["experiment_id", "seed_method", "strategy", "review_pct", "optimum_round"]
    header += [f"within_{int(t * 100)}pct" for t in DEFAULT_TOLERANCES]
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for experiment_id, experiment_rows in sorted(_by_experiment(rows).items()):
            report = optimum_from_fractions([r.review_fraction for r in experiment_rows])
            first = experiment_rows[0]
            writer.writerow([
                experiment_id, first.seed_method, first.strategy,
                f"{100.0 * report.optimum_review:.2f}", report.optimum_round,
                *[report.first_within[t] for t in DEFAULT_TOLERANCES],
            ])


def _write_summary(rows: Sequence[RoundRow], path: Path) -> None:
    """Review percentage at sampled rounds per strategy, one block per
    (seed method, replicate); differences computed on unrounded values."""
    groups: dict[tuple[str, int], dict[str, dict[int, float]]] = {}
    for row in rows:
        group = groups.setdefault((row.seed_method, row.replicate), {})
        group.setdefault(row.strategy, {})[row.round] = row.review_fraction
    strategies = sorted({row.strategy for row in rows})
    pairs = [(a, b) for i, a in enumerate(strategies) for b in strategies[i + 1:]]
    header = ["seed_method", "replicate", "round", *strategies]
    header += [f"{a}-{b}" for a, b in pairs]
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for (seed_method, replicate), by_strategy in sorted(groups.items()):
            common = set.intersection(*(set(v) for v in by_strategy.values()))
            for round_index in [r for r in SUMMARY_ROUNDS if r in common]:
                values = [by_strategy.get(s, {}).get(round_index) for s in strategies]
                diffs = [
                    by_strategy[a][round_index] - by_strategy[b][round_index]
                    if a in by_strategy and b in by_strategy else None
                    for a, b in pairs
                ]
                writer.writerow([
                    seed_method, replicate, round_index,
                    *[f"{100.0 * v:.2f}" if v is not None else "" for v in values],
                    *[f"{100.0 * d:.2f}" if d is not None else "" for d in diffs],
                ])


def _versions() -> dict[str, str]:
    import matplotlib
    import numpy
    import scipy

    return {
        "tarsim": __version__,
        "python": sys.version.split()[0],
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "matplotlib": matplotlib.__version__,
    }


def _write_manifest(
    traces: Sequence[ExperimentTrace],
    failures: Sequence[GridFailure],
    config: dict | None,
    path: Path,
) -> None:
    manifest = {
        "config": config,
        "experiments": [
            {
                "experiment_id": t.experiment_id,
                "seed_method": t.seed_method,
                "strategy": t.strategy_name,
                "replicate": t.replicate,
                "rounds": len(t.rounds),
                "termination": t.termination,
                "flags": list(t.flags),
                "config": t.config,
            }
            for t in sorted(traces, key=lambda t: t.experiment_id)
        ],
        "failures": [
            {"experiment_id": f.experiment_id, "error": f.error}
            for f in sorted(failures, key=lambda f: f.experiment_id)
        ],
        "versions": _versions(),
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _render_figures(rows: Sequence[RoundRow], out_dir: Path, target_recall: float | None) -> None:
    if not rows:
        return
    grouped = _by_experiment(rows)
    curves = {
        experiment_id: (
            [r.round for r in experiment_rows],
            [100.0 * r.review_fraction for r in experiment_rows],
            experiment_rows[0].strategy,
        )
        for experiment_id, experiment_rows in grouped.items()
    }
    plots.render_review_curves(curves, out_dir / CURVES_PNG, target_recall)
    optima = {
        experiment_id: (
            optimum_from_fractions([r.review_fraction for r in experiment_rows]).optimum_round,
            experiment_rows[0].strategy,
        )
        for experiment_id, experiment_rows in grouped.items()
    }
    plots.render_optimum_bars(optima, out_dir / OPTIMUM_PNG)


def emit_reports(
    traces: Sequence[ExperimentTrace],
    out_dir: str | Path,
    corpus: Corpus | None = None,
    keywords: KeywordList | None = None,
    config: dict | None = None,
    failures: Sequence[GridFailure] = (),
    figures: bool = True,
) -> list[Path]:
    """Write all report files; returns the paths written."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create output directory {out}: {exc}") from exc
    written: list[Path] = []
    rows = rows_from_traces(traces)
    try:
        _write_rounds(rows, out / ROUNDS_CSV)
        written.append(out / ROUNDS_CSV)
        _write_optimum(rows, out / OPTIMUM_CSV)
        written.append(out / OPTIMUM_CSV)
        _write_summary(rows, out / SUMMARY_CSV)
        written.append(out / SUMMARY_CSV)
        if corpus is not None:
            stats = corpus_stats(corpus)
            stats_path = out / CORPUS_STATS_CSV
            with stats_path.open("w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                if keywords is not None:
                    report = keyword_report(build_index(corpus), keywords, corpus)
                    writer.writerow([
                        "total", "positives", "negatives", "richness_pct", "keywords",
                        "documents_hit", "positive_documents_hit", "hit_pct",
                    ])
                    writer.writerow([
                        stats.total, stats.positives, stats.negatives,
                        f"{stats.richness:.2f}", len(keywords), report.union_hits,
                        report.union_positive_hits, f"{report.hit_percentage:.2f}",
                    ])
                    kw_path = out / KEYWORD_HITS_CSV
                    with kw_path.open("w", encoding="utf-8", newline="") as kw_fh:
                        kw_writer = csv.writer(kw_fh)
                        kw_writer.writerow(["keyword", "documents_hit", "positive_documents_hit"])
                        for row in report.per_keyword:
                            kw_writer.writerow([row.phrase, row.hits, row.positive_hits])
                    written.append(kw_path)
                else:
                    writer.writerow(["total", "positives", "negatives", "richness_pct"])
                    writer.writerow([
                        stats.total, stats.positives, stats.negatives, f"{stats.richness:.2f}",
                    ])
            written.append(stats_path)
        _write_manifest(traces, failures, config, out / MANIFEST_JSON)
        written.append(out / MANIFEST_JSON)
        if figures:
            target = config.get("target_recall") if config else None
            _render_figures(rows, out, target)
            if rows:
                written.extend([out / CURVES_PNG, out / OPTIMUM_PNG])
    except OSError as exc:
        raise IoFailure(f"report emission failed: {exc}") from exc
    return written


def analyze(trace_dir: str | Path, out_dir: str | Path | None = None, figures: bool = True) -> list[Path]:
    """Recompute optimum and summary tables (and figures) from rounds.csv."""
    trace_dir = Path(trace_dir)
    out = Path(out_dir) if out_dir is not None else trace_dir
    out.mkdir(parents=True, exist_ok=True)
    rows = read_round_rows(trace_dir / ROUNDS_CSV)
    _write_optimum(rows, out / OPTIMUM_CSV)
    _write_summary(rows, out / SUMMARY_CSV)
    written = [out / OPTIMUM_CSV, out / SUMMARY_CSV]
    if figures:
        _render_figures(rows, out, None)
        if rows:
            written.extend([out / CURVES_PNG, out / OPTIMUM_PNG])
    return written
