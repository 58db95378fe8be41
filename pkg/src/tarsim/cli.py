"""Command-line interface.

Subcommands: `stats` (corpus and keyword statistics, optional seed-set
richness comparison), `run` (one experiment from a JSON config), `grid`
(full seed-method x strategy grid), `analyze` (recompute reports from a
previous run's rounds.csv), and `synth` (generate a synthetic corpus).

Exit codes: 0 success, 1 configuration error, 2 data error, 3 runtime
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, harness, reports, synth
from .corpus import corpus_stats, load_corpus, load_keywords
from .errors import ConfigError, DataError, TarsimError
from .harness import ExperimentConfig
from .keyword_index import build_index, keyword_report, write_keyword_report_csv
from .seeding import SEED_METHODS

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3

_GRID_ONLY_KEYS = {"seed_methods", "al_strategies", "replicates", "workers"}


def _load_json_config(path: str) -> dict:
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError(f"config file not found: {config_path}")
    try:
        raw = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a flat JSON object")
    return raw


def _experiment_config(raw: dict) -> ExperimentConfig:
    config = ExperimentConfig.from_dict(raw)
    return replace(config, rng_seed=harness.master_seed_from_env(config.rng_seed))


def _cmd_stats(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    stats = corpus_stats(corpus)
    print(f"total documents:     {stats.total}")
    print(f"positive documents:  {stats.positives}")
    print(f"negative documents:  {stats.negatives}")
    print(f"richness:            {stats.richness:.2f}%")
    keywords = None
    if args.keywords:
        keywords = load_keywords(args.keywords)
        report = keyword_report(build_index(corpus), keywords, corpus)
        print(f"keywords:            {len(keywords)}")
        print(f"documents hit:       {report.union_hits}")
        print(f"positive docs hit:   {report.union_positive_hits}")
        print(f"keyword hit pct:     {report.hit_percentage:.2f}%")
    if args.seed_richness_trials:
        config = ExperimentConfig(seed_size=args.seed_size)
        rows = harness.seed_richness_report(
            corpus, config, keywords,
            trials=args.seed_richness_trials,
            master_seed=harness.master_seed_from_env(args.seed),
        )
        print("seed-set richness (mean % over trials):")
        for method, richness in rows:
            print(f"  {method:<18} {richness:.1f}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        from .corpus import write_corpus_stats_csv

        write_corpus_stats_csv(stats, out / "corpus_stats.csv")
        if keywords is not None:
            write_keyword_report_csv(
                keyword_report(build_index(corpus), keywords, corpus),
                corpus,
                out / "keyword_hits.csv",
            )
        if args.seed_richness_trials:
            with (out / "seed_richness.csv").open("w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["method", "mean_richness_pct"])
                for method, richness in rows:
                    writer.writerow([method, f"{richness:.2f}"])
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    config = _experiment_config(_load_json_config(args.config))
    if not config.corpus_path:
        raise ConfigError("config must set corpus_path")
    corpus = load_corpus(config.corpus_path)
    keywords = load_keywords(config.keywords_path) if config.keywords_path else None
    trace = harness.run_experiment(config, corpus, keywords)
    written = reports.emit_reports(
        [trace], args.out, corpus=corpus, keywords=keywords, config=config.to_dict()
    )
    if config.log_selections:
        from .active_selection import write_selection_manifest

        rows = [(r, d, s, l, trace.strategy_name) for r, d, s, l in trace.selections]
        write_selection_manifest(rows, Path(args.out) / "selections.csv")
    last = trace.rounds[-1]
    print(
        f"{trace.experiment_id}: {len(trace.rounds)} rounds, "
        f"termination={trace.termination}, "
        f"final review={100.0 * last.review_fraction:.2f}%"
    )
    print(f"reports written to {Path(args.out).resolve()} ({len(written)} files)")
    return EXIT_OK


def _cmd_grid(args: argparse.Namespace) -> int:
    raw = _load_json_config(args.config)
    grid_keys = {k: raw.pop(k) for k in list(raw) if k in _GRID_ONLY_KEYS}
    config = _experiment_config(raw)
    if not config.corpus_path:
        raise ConfigError("config must set corpus_path")
    seed_methods = grid_keys.get("seed_methods", list(SEED_METHODS))
    strategies = grid_keys.get("al_strategies", list(harness.STRATEGY_NAMES))
    replicates = int(grid_keys.get("replicates", 1))
    workers = args.workers if args.workers else int(grid_keys.get("workers", 1))
    corpus = load_corpus(config.corpus_path)
    keywords = load_keywords(config.keywords_path) if config.keywords_path else None
    result = harness.run_grid(
        corpus,
        config,
        seed_methods=seed_methods,
        strategies=strategies,
        replicates=replicates,
        master_seed=config.rng_seed,
        workers=workers,
        keywords=keywords,
    )
    reports.emit_reports(
        result.traces,
        args.out,
        corpus=corpus,
        keywords=keywords,
        config={**config.to_dict(), **grid_keys},
        failures=result.failures,
    )
    print(
        f"grid complete: {len(result.traces)} traces, "
        f"{len(result.failures)} failures, reports in {Path(args.out).resolve()}"
    )
    return EXIT_OK if not result.failures else EXIT_RUNTIME


def _cmd_analyze(args: argparse.Namespace) -> int:
    written = reports.analyze(args.trace_dir, args.out)
    print(f"analysis written: {', '.join(str(p) for p in written)}")
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = synth.SynthSpec(n_docs=args.docs, richness=args.richness, seed=args.seed)
    corpus = synth.generate_corpus(spec)
    synth.write_corpus_jsonl(corpus, args.out)
    print(f"wrote {corpus.total} documents ({corpus.positives} positive) to {args.out}")
    if args.keywords_out:
        synth.write_keyword_file(synth.generate_keywords(spec), args.keywords_out)
        print(f"wrote keyword list to {args.keywords_out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tarsim",
        description="Active-learning predictive-coding simulator",
    )
    parser.add_argument("--version", action="version", version=f"tarsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="corpus and keyword statistics")
    p_stats.add_argument("corpus", help="corpus JSONL file")
    p_stats.add_argument("--keywords", help="keyword file, one phrase per line")
    p_stats.add_argument("--out", help="directory for CSV output")
    p_stats.add_argument("--seed-richness-trials", type=int, default=0,
                         help="also report mean seed richness per method over N trials")
    p_stats.add_argument("--seed-size", type=int, default=500)
    p_stats.add_argument("--seed", type=int, default=0)
    p_stats.set_defaults(func=_cmd_stats)

    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("--config", required=True, help="experiment config JSON")
    p_run.add_argument("--out", default="tarsim_out", help="report directory")
    p_run.set_defaults(func=_cmd_run)

    p_grid = sub.add_parser("grid", help="run a seed-method x strategy grid")
    p_grid.add_argument("--config", required=True, help="grid config JSON")
    p_grid.add_argument("--workers", type=int, default=0,
                        help="worker processes (default: from config, else 1)")
    p_grid.add_argument("--out", default="tarsim_out", help="report directory")
    p_grid.set_defaults(func=_cmd_grid)

    p_analyze = sub.add_parser("analyze", help="recompute reports from rounds.csv")
    p_analyze.add_argument("trace_dir", help="directory holding rounds.csv")
    p_analyze.add_argument("--out", help="output directory (default: trace_dir)")
    p_analyze.set_defaults(func=_cmd_analyze)

    p_synth = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p_synth.add_argument("--out", required=True, help="corpus JSONL path")
    p_synth.add_argument("--docs", type=int, default=20_000)
    p_synth.add_argument("--richness", type=float, default=0.25)
    p_synth.add_argument("--seed", type=int, default=7)
    p_synth.add_argument("--keywords-out", help="also write a keyword list")
    p_synth.set_defaults(func=_cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TarsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
