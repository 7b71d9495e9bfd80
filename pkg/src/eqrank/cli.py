"""Command-line front end.

Subcommands cover the full workflow: ``ingest`` normalizes raw input
files into a store, ``cluster`` partitions each snapshot, ``evolve``
adds pairwise theme dynamics and the plot-ready series, ``summarize``
describes the themes of the last snapshot, and ``synth`` fabricates a
planted-evolution corpus for validation.

Exit codes: 0 success; 1 unusable input (parse errors, bad arguments,
missing files); 2 a cutoff selected an empty snapshot; 3 a TMC cut had
no eligible papers (remaining cuts still computed and written).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline
from .corpus import CorpusStore, YearMonth, ingest_files, save_store
from .errors import EmptySnapshotError, EqRankError, ParseError
from .quality import (
    default_planted_spec,
    generate_planted_series,
    synthesize_benchmark_corpus,
    write_corpus_files,
)
from .reindex import ReindexConfig
from .weights import DEFAULT_MIXING, write_weights_tsv

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_EMPTY_SNAPSHOT = 2
EXIT_NO_ELIGIBLE = 3


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message
        super().__init__(message)


def _parse_cutoffs(text: str) -> list[YearMonth]:
    cutoffs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            cutoffs.append(YearMonth.parse(part))
        except ValueError as exc:
            raise _CliError(EXIT_INPUT_ERROR, f"bad cutoff: {exc}") from exc
    if not cutoffs:
        raise _CliError(EXIT_INPUT_ERROR, "need at least one cutoff")
    for a, b in zip(cutoffs, cutoffs[1:]):
        if a.key >= b.key:
            raise _CliError(
                EXIT_INPUT_ERROR, f"cutoffs must be strictly increasing: {a} then {b}"
            )
    return cutoffs


def _parse_cuts(text: str) -> tuple[int, ...]:
    cuts = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            value = int(part)
        except ValueError as exc:
            raise _CliError(EXIT_INPUT_ERROR, f"bad TMC cut: {part!r}") from exc
        if value < 0:
            raise _CliError(EXIT_INPUT_ERROR, f"TMC cuts must be non-negative: {value}")
        cuts.append(value)
    if len(set(cuts)) != len(cuts):
        raise _CliError(EXIT_INPUT_ERROR, "TMC cuts must be distinct")
    return tuple(cuts)


def _load_store(args) -> CorpusStore:
    for path in (args.edges, args.papers):
        if not Path(path).exists():
            raise _CliError(EXIT_INPUT_ERROR, f"input file not found: {path}")
    try:
        return ingest_files(args.edges, args.papers)
    except ParseError as exc:
        raise _CliError(EXIT_INPUT_ERROR, str(exc)) from exc
    except EqRankError as exc:
        raise _CliError(EXIT_INPUT_ERROR, str(exc)) from exc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_series(args, store: CorpusStore, cutoffs: list[YearMonth]):
    config = ReindexConfig(max_iterations=args.max_iter)
    try:
        return pipeline.run_series(store, cutoffs, mixing=args.a, reindex_config=config)
    except EmptySnapshotError as exc:
        raise _CliError(EXIT_EMPTY_SNAPSHOT, str(exc)) from exc


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--edges", required=True, help="edge list file (citing<TAB>cited)")
    parser.add_argument("--papers", required=True, help="paper table (id<TAB>YYYY-MM<TAB>title)")


def _add_cluster_args(parser: argparse.ArgumentParser) -> None:
    _add_corpus_args(parser)
    parser.add_argument("--cutoffs", required=True, help="comma-separated YYYY-MM snapshot dates")
    parser.add_argument("--a", type=float, default=DEFAULT_MIXING, help="co-citation mixing weight")
    parser.add_argument("--max-iter", type=int, default=50, help="reindexing sweep cap")
    parser.add_argument("--out", required=True, help="output directory")


def cmd_ingest(args) -> int:
    store = _load_store(args)
    out = _out_dir(args)
    save_store(store, out)
    stats = store.stats
    print(f"papers: {stats.papers}")
    print(f"edges kept: {stats.edges_kept}")
    print(f"self loops dropped: {stats.self_loops_dropped}")
    print(f"duplicate edges dropped: {stats.duplicate_edges_dropped}")
    print(f"unknown endpoint edges dropped: {stats.unknown_endpoint_edges_dropped}")
    print(f"duplicate paper records collapsed: {stats.duplicate_papers_collapsed}")
    print(f"edges with undated endpoint: {stats.edges_with_undated_endpoint}")
    print(f"store written to {out}")
    return EXIT_OK


def cmd_cluster(args) -> int:
    cutoffs = _parse_cutoffs(args.cutoffs)
    if not 0.0 <= args.a <= 1.0:
        raise _CliError(EXIT_INPUT_ERROR, f"--a must be in [0, 1], got {args.a}")
    store = _load_store(args)
    out = _out_dir(args)
    results = _run_series(args, store, cutoffs)
    for res in results:
        tag = str(res.cutoff)
        pipeline.write_partition_tsv(res, out / f"partition_{tag}.tsv")
        pipeline.write_partition_summary(res, out / f"partition_{tag}.json")
        pipeline.write_trace_csv(res, out / f"reindex_trace_{tag}.csv")
        if args.write_weights:
            write_weights_tsv(res.weights, res.snapshot, out / f"weights_{tag}.tsv")
        print(
            f"{tag}: {res.snapshot.n_vertices} papers, "
            f"{res.partition.n_clusters} themes, "
            f"{res.refined.iterations} sweeps"
        )
    return EXIT_OK


def cmd_evolve(args) -> int:
    cutoffs = _parse_cutoffs(args.cutoffs)
    if len(cutoffs) < 2:
        raise _CliError(EXIT_INPUT_ERROR, "evolve needs at least two cutoffs")
    if not 0.0 <= args.a <= 1.0:
        raise _CliError(EXIT_INPUT_ERROR, f"--a must be in [0, 1], got {args.a}")
    cuts = _parse_cuts(args.tmc_cuts)
    store = _load_store(args)
    out = _out_dir(args)
    results = _run_series(args, store, cutoffs)
    pairs = pipeline.build_pairs(results)
    reports = pipeline.compare_series(pairs, cuts)

    exit_code = EXIT_OK
    for pair, report in zip(pairs, reports):
        for cut, value in sorted(report.tmc_by_cut.items()):
            if value is None:
                print(
                    f"warning: {pair.label}: no papers above citation cut {cut}",
                    file=sys.stderr,
                )
                exit_code = EXIT_NO_ELIGIBLE
        tag = pair.label.replace("->", "_")
        pipeline.write_pair_report(pair, report, out / f"pair_{tag}.json")

    for res in results:
        pipeline.write_trace_csv(res, out / f"reindex_trace_{res.cutoff}.csv")
    pipeline.write_series_csv(pairs, reports, cuts, out / "series.csv")
    pipeline.write_theme_count_csv(results, out / "theme_counts.csv")
    pipeline.write_modularity_csv(results, out / "modularity.csv")
    pipeline.write_growth_csv(results, out / "growth.csv")
    pipeline.write_tmc_growth_csv(pairs, reports, out / "tmc_growth.csv")

    lineages = pipeline.series_lineages(reports, cutoffs)
    pipeline.write_theme_summaries(
        results[-1],
        out / f"themes_{results[-1].cutoff}.json",
        lineages=lineages,
        top_papers=args.top_papers,
        top_keywords=args.top_keywords,
    )
    for pair, report in zip(pairs, reports):
        print(
            f"{pair.label}: stable {len(report.stable)}, new {len(report.new)}, "
            f"absorbed {len(report.absorbed)}, CSC1 {report.csc1:.3f}, "
            f"CSC2 {report.csc2:.3f}, TMC {report.tmc_value:.3f}"
        )
    return exit_code


def cmd_summarize(args) -> int:
    cutoffs = _parse_cutoffs(args.cutoffs)
    if not 0.0 <= args.a <= 1.0:
        raise _CliError(EXIT_INPUT_ERROR, f"--a must be in [0, 1], got {args.a}")
    store = _load_store(args)
    out = _out_dir(args)
    results = _run_series(args, store, cutoffs)
    lineages = None
    if len(results) > 1:
        pairs = pipeline.build_pairs(results)
        reports = pipeline.compare_series(pairs, cuts=())
        lineages = pipeline.series_lineages(reports, cutoffs)
    last = results[-1]
    path = out / f"themes_{last.cutoff}.json"
    pipeline.write_theme_summaries(
        last,
        path,
        lineages=lineages,
        top_papers=args.top_papers,
        top_keywords=args.top_keywords,
    )
    print(f"{last.cutoff}: {last.partition.n_clusters} themes -> {path}")
    return EXIT_OK


def cmd_synth(args) -> int:
    out = _out_dir(args)
    if args.scale_papers:
        papers, edges, cutoffs = synthesize_benchmark_corpus(
            n_papers=args.scale_papers,
            target_edges=args.scale_edges,
            n_snapshots=args.scale_snapshots,
            seed=args.seed,
        )
        write_corpus_files(papers, edges, out)
        print(f"benchmark corpus: {len(papers)} papers, {len(edges)} edges")
        print("cutoffs: " + ",".join(str(c) for c in cutoffs))
        return EXIT_OK
    try:
        spec = default_planted_spec(p_intra=args.p_intra, p_inter=args.p_inter)
        series = generate_planted_series(spec, args.seed)
    except ValueError as exc:
        raise _CliError(EXIT_INPUT_ERROR, str(exc)) from exc
    write_corpus_files(series.papers, series.edges, out)
    truth = {
        "cutoffs": [str(c) for c in spec.cutoffs],
        "labels_per_snapshot": series.truth,
        "events": {
            "chip_offs": [
                {"parent": c.parent, "name": c.name, "interval": c.interval}
                for c in spec.chip_offs
            ],
            "absorptions": [
                {"theme": a.theme, "into": a.into, "interval": a.interval}
                for a in spec.absorptions
            ],
        },
    }
    with open(out / "truth.json", "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"planted corpus: {len(series.papers)} papers, {len(series.edges)} edges")
    print("cutoffs: " + ",".join(str(c) for c in spec.cutoffs))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqrank",
        description="Theme clustering and theme evolution for citation graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="normalize raw files into a corpus store")
    _add_corpus_args(p_ingest)
    p_ingest.add_argument("--out", required=True, help="store directory")
    p_ingest.set_defaults(func=cmd_ingest)

    p_cluster = sub.add_parser("cluster", help="partition each snapshot into themes")
    _add_cluster_args(p_cluster)
    p_cluster.add_argument(
        "--write-weights", action="store_true", help="also export the weighted edge lists"
    )
    p_cluster.set_defaults(func=cmd_cluster)

    p_evolve = sub.add_parser("evolve", help="theme dynamics across consecutive snapshots")
    _add_cluster_args(p_evolve)
    p_evolve.add_argument("--tmc-cuts", default="0,40", help="comma-separated citation cuts")
    p_evolve.add_argument("--top-papers", type=int, default=5)
    p_evolve.add_argument("--top-keywords", type=int, default=4)
    p_evolve.set_defaults(func=cmd_evolve)

    p_sum = sub.add_parser("summarize", help="describe the themes of the last snapshot")
    _add_cluster_args(p_sum)
    p_sum.add_argument("--top-papers", type=int, default=5)
    p_sum.add_argument("--top-keywords", type=int, default=4)
    p_sum.set_defaults(func=cmd_summarize)

    p_synth = sub.add_parser("synth", help="generate a planted-evolution corpus")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--p-intra", type=float, default=0.65)
    p_synth.add_argument("--p-inter", type=float, default=0.012)
    p_synth.add_argument("--scale-papers", type=int, default=0, help="emit a large benchmark corpus instead")
    p_synth.add_argument("--scale-edges", type=int, default=350000)
    p_synth.add_argument("--scale-snapshots", type=int, default=6)
    p_synth.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.code
    except EqRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
