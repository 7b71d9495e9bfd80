"""End-to-end composition: corpus -> weights -> clustering -> dynamics.

Every stage is deterministic, so fixed inputs and configuration give
byte-identical output files.  The emitters here back the command-line
front end; each plot-ready series the analysis produces has exactly one
CSV writer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Partition, eqrank_partition
from .corpus import CorpusStore, Snapshot, YearMonth
from .dynamics import DynamicsReport, Lineage, SnapshotPair, lineage
from .quality import (
    ThemeSummary,
    build_theme_summaries,
    modularity,
    symmetrized_citation_graph,
)
from .reindex import ReindexConfig, ReindexResult, reindex_to_limit, write_reindex_trace_csv
from .weights import DEFAULT_MIXING, SimilarityGraph, similarity_graph


@dataclass
class SnapshotResult:
    """Everything computed for one cutoff."""

    snapshot: Snapshot
    weights: SimilarityGraph
    base: Partition
    refined: ReindexResult

    @property
    def partition(self) -> Partition:
        return self.refined.partition

    @property
    def cutoff(self) -> YearMonth:
        return self.snapshot.cutoff


def run_snapshot(
    store: CorpusStore,
    cutoff: YearMonth,
    mixing: float = DEFAULT_MIXING,
    reindex_config: ReindexConfig | None = None,
) -> SnapshotResult:
    """Cluster one snapshot: weights, base partition, refinement."""
    snap = store.snapshot(cutoff)
    graph = similarity_graph(snap, mixing)
    base = eqrank_partition(graph)
    refined = reindex_to_limit(base, graph, reindex_config)
    return SnapshotResult(snapshot=snap, weights=graph, base=base, refined=refined)


def run_series(
    store: CorpusStore,
    cutoffs: list[YearMonth],
    mixing: float = DEFAULT_MIXING,
    reindex_config: ReindexConfig | None = None,
) -> list[SnapshotResult]:
    return [run_snapshot(store, cutoff, mixing, reindex_config) for cutoff in cutoffs]


def build_pairs(results: list[SnapshotResult]) -> list[SnapshotPair]:
    """Consecutive snapshot pairs of a clustered series."""
    return [
        SnapshotPair(
            earlier=a.snapshot,
            later=b.snapshot,
            p1=a.partition,
            p2=b.partition,
        )
        for a, b in zip(results, results[1:])
    ]


def compare_series(
    pairs: list[SnapshotPair],
    cuts: tuple[int, ...] = (0, 40),
) -> list[DynamicsReport]:
    return [pair.compare(cuts) for pair in pairs]


def series_lineages(reports: list[DynamicsReport], cutoffs: list[YearMonth]) -> list[Lineage]:
    return lineage(reports, [c.year for c in cutoffs])


# ---------------------------------------------------------------------------
# Emitters.  All files are UTF-8; floats in CSVs use fixed precision so
# reruns are byte-identical.


def write_partition_tsv(result: SnapshotResult, path: str | Path) -> None:
    """One ``paper_id<TAB>cluster_id`` line per vertex, in id order."""
    snap = result.snapshot
    labels = result.partition.labels
    with open(path, "w", encoding="utf-8") as fh:
        for v in range(snap.n_vertices):
            fh.write(f"{snap.paper_id(v)}\t{int(labels[v])}\n")


def write_partition_summary(result: SnapshotResult, path: str | Path) -> None:
    refined = result.refined
    summary = {
        "cutoff": str(result.cutoff),
        "n_vertices": result.snapshot.n_vertices,
        "n_edges": result.snapshot.n_edges,
        "n_clusters": result.partition.n_clusters,
        "cluster_sizes": [int(s) for s in result.partition.sizes()],
        "base_n_clusters": result.base.n_clusters,
        "reindex": {
            "iterations": refined.iterations,
            "converged": bool(refined.converged),
            "converged_fraction": refined.converged_fraction,
            "trace": [int(c) for c in refined.trace],
        },
    }
    _write_json(summary, path)


def report_as_dict(pair: SnapshotPair, report: DynamicsReport) -> dict:
    """JSON-ready view of one pair's classification and metrics."""
    maps = report.maps
    sizes1 = np.bincount(maps.old_labels_p1, minlength=maps.n_clusters_p1)
    sizes2 = pair.p2.sizes()
    violators = [
        pair.earlier.paper_id(int(v)) for v in report.violating_vertices()
    ]
    return {
        "pair": pair.label,
        "earlier": {
            "cutoff": str(pair.earlier.cutoff),
            "n_vertices": pair.earlier.n_vertices,
            "n_themes": maps.n_clusters_p1,
        },
        "later": {
            "cutoff": str(pair.later.cutoff),
            "n_vertices": pair.later.n_vertices,
            "n_themes": maps.n_clusters_p2,
        },
        "stable": [
            {
                "id": int(t),
                "size": int(sizes1[t]),
                "maps_to": int(maps.map1[t]),
                "size_later": int(sizes2[maps.map1[t]]),
            }
            for t in report.stable
        ],
        "absorbed": [
            {
                "id": int(t),
                "size": int(sizes1[t]),
                "absorbed_by": report.absorbed_by[int(t)],
            }
            for t in report.absorbed
        ],
        "new": [
            {
                "id": int(t),
                "size_later": int(sizes2[t]),
                "broke_from": report.broke_from[int(t)],
            }
            for t in report.new
        ],
        "map1": [int(m) for m in maps.map1],
        "map2": [None if m < 0 else int(m) for m in maps.map2],
        "map1_overlap": [int(m) for m in maps.map1_overlap],
        "map2_overlap": [int(m) for m in maps.map2_overlap],
        "csc1": report.csc1,
        "csc2": report.csc2,
        "tmc": report.tmc_value,
        "tmc_by_cut": {str(k): v for k, v in sorted(report.tmc_by_cut.items())},
        "violators": violators,
    }


def write_pair_report(pair: SnapshotPair, report: DynamicsReport, path: str | Path) -> None:
    _write_json(report_as_dict(pair, report), path)


def write_series_csv(
    pairs: list[SnapshotPair],
    reports: list[DynamicsReport],
    cuts: tuple[int, ...],
    path: str | Path,
) -> None:
    """The coefficient series: one row per consecutive pair."""
    cut_cols = [f"TMC_cut_{c}" for c in cuts]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("pair,CSC1,CSC2,TMC," + ",".join(cut_cols) + "\n")
        for pair, report in zip(pairs, reports):
            cells = [
                pair.label,
                _fmt(report.csc1),
                _fmt(report.csc2),
                _fmt(report.tmc_value),
            ]
            cells += [_fmt(report.tmc_by_cut.get(int(c))) for c in cuts]
            fh.write(",".join(cells) + "\n")


def write_theme_count_csv(results: list[SnapshotResult], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("cutoff,n_themes\n")
        for res in results:
            fh.write(f"{res.cutoff},{res.partition.n_clusters}\n")


def write_modularity_csv(results: list[SnapshotResult], path: str | Path) -> None:
    """Weighted modularity of W, plus the unweighted citation-graph value."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("cutoff,q_weighted,q_citation\n")
        for res in results:
            qw = modularity(res.weights, res.partition).q
            qc = modularity(symmetrized_citation_graph(res.snapshot), res.partition).q
            fh.write(f"{res.cutoff},{qw:.6f},{qc:.6f}\n")


def write_growth_csv(results: list[SnapshotResult], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("cutoff,n_vertices,n_edges\n")
        for res in results:
            fh.write(f"{res.cutoff},{res.snapshot.n_vertices},{res.snapshot.n_edges}\n")


def write_tmc_growth_csv(
    pairs: list[SnapshotPair],
    reports: list[DynamicsReport],
    path: str | Path,
) -> None:
    """Migration rate against corpus growth over each pair interval."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("pair,new_papers,new_edges,TMC\n")
        for pair, report in zip(pairs, reports):
            dn = pair.later.n_vertices - pair.earlier.n_vertices
            de = pair.later.n_edges - pair.earlier.n_edges
            fh.write(f"{pair.label},{dn},{de},{_fmt(report.tmc_value)}\n")


def write_trace_csv(result: SnapshotResult, path: str | Path) -> None:
    write_reindex_trace_csv(result.refined, path)


def summaries_as_list(summaries: list[ThemeSummary]) -> list[dict]:
    return [
        {
            "cluster_id": s.cluster_id,
            "size": s.size,
            "keywords": [[pair, int(count)] for pair, count in s.keywords],
            "authority_papers": [
                {
                    "paper_id": p.paper_id,
                    "citation_index": p.citation_index,
                    "title": p.title,
                }
                for p in s.authorities
            ],
            "birth_year": s.birth_year,
            "first_stable_year": s.first_stable_year,
        }
        for s in summaries
    ]


def write_theme_summaries(
    result: SnapshotResult,
    path: str | Path,
    lineages: list[Lineage] | None = None,
    top_papers: int = 5,
    top_keywords: int = 4,
) -> None:
    summaries = build_theme_summaries(
        result.snapshot,
        result.partition,
        lineages=lineages,
        top_papers=top_papers,
        top_keywords=top_keywords,
    )
    _write_json(summaries_as_list(summaries), path)


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def _write_json(obj, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
