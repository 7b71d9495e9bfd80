"""End-to-end pipeline behaviour and emitter file formats.

The tiny corpus is small enough to trace by hand: at 2000-12 it splits
into three two-paper themes, and by 2001-12 each theme has gained or
kept members without any migration, so every dynamics metric is known
exactly.
"""

import json

import pytest

from eqrank.corpus import YearMonth
from eqrank.pipeline import (
    build_pairs,
    compare_series,
    report_as_dict,
    run_series,
    run_snapshot,
    series_lineages,
    write_growth_csv,
    write_modularity_csv,
    write_pair_report,
    write_partition_summary,
    write_partition_tsv,
    write_series_csv,
    write_theme_count_csv,
    write_theme_summaries,
    write_tmc_growth_csv,
    write_trace_csv,
)

T1 = YearMonth(2000, 12)
T2 = YearMonth(2001, 12)


@pytest.fixture()
def results(tiny_store):
    return run_series(tiny_store, [T1, T2])


@pytest.fixture()
def pair_and_report(results):
    pairs = build_pairs(results)
    reports = compare_series(pairs, cuts=(0, 40))
    return pairs[0], reports[0]


class TestRunSnapshot:
    def test_first_snapshot_partition(self, tiny_store):
        result = run_snapshot(tiny_store, T1)
        assert result.partition.labels.tolist() == [0, 0, 1, 1, 2, 2]
        assert result.base == result.partition
        assert result.refined.converged
        assert result.refined.trace.tolist() == [0]

    def test_second_snapshot_partition(self, tiny_store):
        result = run_snapshot(tiny_store, T2)
        assert result.partition.labels.tolist() == [0, 0, 1, 1, 2, 2, 1, 0]
        assert result.refined.converged

    def test_cutoff_carried(self, results):
        assert [r.cutoff for r in results] == [T1, T2]


class TestDynamicsOnTheSeries:
    def test_identity_evolution(self, pair_and_report):
        pair, report = pair_and_report
        assert pair.label == "2000-12->2001-12"
        assert report.csc1 == 1.0
        assert report.csc2 == 1.0
        assert report.tmc_value == 0.0
        assert report.tmc_by_cut == {0: 0.0, 40: None}

    def test_report_dict_shape(self, pair_and_report):
        pair, report = pair_and_report
        doc = report_as_dict(pair, report)
        assert doc["pair"] == "2000-12->2001-12"
        assert doc["earlier"] == {"cutoff": "2000-12", "n_vertices": 6, "n_themes": 3}
        assert doc["later"] == {"cutoff": "2001-12", "n_vertices": 8, "n_themes": 3}
        assert doc["stable"] == [
            {"id": 0, "size": 2, "maps_to": 0, "size_later": 3},
            {"id": 1, "size": 2, "maps_to": 1, "size_later": 3},
            {"id": 2, "size": 2, "maps_to": 2, "size_later": 2},
        ]
        assert doc["absorbed"] == [] and doc["new"] == []
        assert doc["map1"] == [0, 1, 2] and doc["map2"] == [0, 1, 2]
        assert doc["tmc_by_cut"] == {"0": 0.0, "40": None}
        assert doc["violators"] == []

    def test_lineages_all_stable_from_the_start(self, pair_and_report, results):
        _, report = pair_and_report
        lins = series_lineages([report], [r.cutoff for r in results])
        assert [lin.theme for lin in lins] == [0, 1, 2]
        assert all(lin.birth_year == 2000 for lin in lins)
        assert all(lin.first_stable_year == 2000 for lin in lins)


class TestEmitters:
    def test_partition_tsv(self, results, tmp_path):
        path = tmp_path / "partition.tsv"
        write_partition_tsv(results[0], path)
        assert path.read_text() == "a\t0\nb\t0\nc\t1\nd\t1\ne\t2\nf\t2\n"
        write_partition_tsv(results[1], path)
        assert (
            path.read_text()
            == "a\t0\nb\t0\nc\t1\nd\t1\ne\t2\nf\t2\ng\t1\nh\t0\n"
        )

    def test_partition_summary_json(self, results, tmp_path):
        path = tmp_path / "summary.json"
        write_partition_summary(results[0], path)
        doc = json.loads(path.read_text())
        assert doc == {
            "cutoff": "2000-12",
            "n_vertices": 6,
            "n_edges": 8,
            "n_clusters": 3,
            "cluster_sizes": [2, 2, 2],
            "base_n_clusters": 3,
            "reindex": {
                "iterations": 1,
                "converged": True,
                "converged_fraction": 1.0,
                "trace": [0],
            },
        }

    def test_trace_csv(self, results, tmp_path):
        path = tmp_path / "trace.csv"
        write_trace_csv(results[0], path)
        assert path.read_text() == (
            "iteration,reassigned_count,reassigned_fraction\n1,0,0.000000\n"
        )

    def test_series_csv_with_explicit_cut(self, results, tmp_path):
        pairs = build_pairs(results)
        reports = compare_series(pairs, cuts=(0,))
        path = tmp_path / "series.csv"
        write_series_csv(pairs, reports, (0,), path)
        assert path.read_text() == (
            "pair,CSC1,CSC2,TMC,TMC_cut_0\n"
            "2000-12->2001-12,1.000000,1.000000,0.000000,0.000000\n"
        )

    def test_series_csv_leaves_undefined_cut_empty(self, results, tmp_path):
        pairs = build_pairs(results)
        reports = compare_series(pairs, cuts=(0, 40))
        path = tmp_path / "series.csv"
        write_series_csv(pairs, reports, (0, 40), path)
        assert path.read_text() == (
            "pair,CSC1,CSC2,TMC,TMC_cut_0,TMC_cut_40\n"
            "2000-12->2001-12,1.000000,1.000000,0.000000,0.000000,\n"
        )

    def test_theme_count_csv(self, results, tmp_path):
        path = tmp_path / "themes.csv"
        write_theme_count_csv(results, path)
        assert path.read_text() == "cutoff,n_themes\n2000-12,3\n2001-12,3\n"

    def test_growth_csv(self, results, tmp_path):
        path = tmp_path / "growth.csv"
        write_growth_csv(results, path)
        assert path.read_text() == (
            "cutoff,n_vertices,n_edges\n2000-12,6,8\n2001-12,8,12\n"
        )

    def test_modularity_csv(self, results, tmp_path):
        path = tmp_path / "modularity.csv"
        write_modularity_csv(results, path)
        assert path.read_text() == (
            "cutoff,q_weighted,q_citation\n"
            "2000-12,0.545000,-0.375000\n"
            "2001-12,0.574380,-0.375000\n"
        )

    def test_tmc_growth_csv(self, results, tmp_path):
        pairs = build_pairs(results)
        reports = compare_series(pairs, cuts=())
        path = tmp_path / "tmc_growth.csv"
        write_tmc_growth_csv(pairs, reports, path)
        assert path.read_text() == (
            "pair,new_papers,new_edges,TMC\n2000-12->2001-12,2,4,0.000000\n"
        )

    def test_pair_report_roundtrips(self, pair_and_report, tmp_path):
        pair, report = pair_and_report
        path = tmp_path / "pair.json"
        write_pair_report(pair, report, path)
        assert json.loads(path.read_text()) == report_as_dict(pair, report)

    def test_theme_summaries_json(self, results, pair_and_report, tmp_path):
        _, report = pair_and_report
        lins = series_lineages([report], [r.cutoff for r in results])
        path = tmp_path / "themes.json"
        write_theme_summaries(results[1], path, lineages=lins)
        docs = json.loads(path.read_text())
        assert [d["cluster_id"] for d in docs] == [0, 1, 2]
        assert [d["size"] for d in docs] == [3, 3, 2]
        top = docs[0]
        assert [p["paper_id"] for p in top["authority_papers"]] == ["a", "b", "h"]
        assert [p["citation_index"] for p in top["authority_papers"]] == [3, 3, 0]
        assert top["keywords"] == [
            ["quark gluon", 2],
            ["dual review", 1],
            ["gluon dynamics", 1],
            ["gluon plasma", 1],
        ]
        assert docs[2]["keywords"] == [
            ["string dual", 2],
            ["dual geometry", 1],
            ["dual models", 1],
        ]
        assert all(d["birth_year"] == 2000 for d in docs)
        assert all(d["first_stable_year"] == 2000 for d in docs)


class TestDeterminism:
    def test_reruns_emit_identical_bytes(self, tiny_store, tmp_path):
        outs = []
        for tag in ("one", "two"):
            outdir = tmp_path / tag
            outdir.mkdir()
            results = run_series(tiny_store, [T1, T2])
            pairs = build_pairs(results)
            reports = compare_series(pairs, cuts=(0, 40))
            write_series_csv(pairs, reports, (0, 40), outdir / "series.csv")
            write_modularity_csv(results, outdir / "modularity.csv")
            write_pair_report(pairs[0], reports[0], outdir / "pair.json")
            write_partition_tsv(results[1], outdir / "partition.tsv")
            write_theme_summaries(results[1], outdir / "themes.json")
            outs.append(outdir)
        for name in ("series.csv", "modularity.csv", "pair.json",
                     "partition.tsv", "themes.json"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
