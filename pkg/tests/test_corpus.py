"""Corpus parsing, cleaning, and snapshot extraction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqrank.corpus import (
    CitationEdge,
    PaperRecord,
    YearMonth,
    ingest,
    ingest_files,
    load_store,
    read_edges_file,
    read_papers_file,
    save_store,
)
from eqrank.errors import DuplicatePaperError, EmptySnapshotError, ParseError


def ym(text):
    return YearMonth.parse(text)


class TestYearMonth:
    def test_parse_and_str_roundtrip(self):
        assert str(ym("1997-03")) == "1997-03"
        assert ym("2003-12") == YearMonth(2003, 12)

    def test_key_is_monotone_in_calendar_order(self):
        assert ym("1999-12").key < ym("2000-01").key
        assert YearMonth.from_key(ym("1999-12").key) == YearMonth(1999, 12)

    @pytest.mark.parametrize("bad", ["1999", "1999-13", "1999-00", "99-01", "1999/01", ""])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            YearMonth.parse(bad)


class TestParsing:
    def test_edges_skip_comments_and_blanks(self, tmp_path):
        path = tmp_path / "edges.tsv"
        path.write_text("# header\n\na\tb\nb\tc\n")
        assert list(read_edges_file(path)) == [CitationEdge("a", "b"), CitationEdge("b", "c")]

    def test_edges_error_carries_path_and_line(self, tmp_path):
        path = tmp_path / "edges.tsv"
        path.write_text("a\tb\nnot-an-edge\n")
        with pytest.raises(ParseError) as err:
            list(read_edges_file(path))
        assert f"{path}:2:" in str(err.value)

    def test_edges_reject_empty_fields(self, tmp_path):
        path = tmp_path / "edges.tsv"
        path.write_text("a\t\n")
        with pytest.raises(ParseError):
            list(read_edges_file(path))

    def test_papers_title_optional_and_date_optional(self, tmp_path):
        path = tmp_path / "papers.tsv"
        path.write_text("a\t2000-01\tSome Title\nb\t2000-02\nc\t\tundated paper\n")
        records = list(read_papers_file(path))
        assert records[0] == PaperRecord("a", YearMonth(2000, 1), "Some Title")
        assert records[1].title is None
        assert records[2].date is None and records[2].title == "undated paper"

    def test_papers_title_tab_escape_roundtrip(self, tmp_path):
        store = ingest(
            [PaperRecord("a", ym("2000-01"), "tab\there \\ slash")], []
        )
        save_store(store, tmp_path / "store")
        loaded = load_store(tmp_path / "store")
        assert loaded.titles[0] == "tab\there \\ slash"

    def test_papers_bad_date_reports_line(self, tmp_path):
        path = tmp_path / "papers.tsv"
        path.write_text("a\t2000-01\n# fine\nb\t2000-13\n")
        with pytest.raises(ParseError) as err:
            list(read_papers_file(path))
        assert f"{path}:3:" in str(err.value)


class TestIngest:
    def test_cleaning_counters(self):
        papers = [PaperRecord("a", ym("2000-01")), PaperRecord("b", ym("2000-02"))]
        edges = [
            CitationEdge("a", "b"),
            CitationEdge("a", "b"),  # duplicate
            CitationEdge("a", "a"),  # self loop
            CitationEdge("a", "zz"),  # unknown endpoint
            CitationEdge("b", "a"),
        ]
        store = ingest(papers, edges)
        assert store.stats.edges_kept == 2
        assert store.stats.duplicate_edges_dropped == 1
        assert store.stats.self_loops_dropped == 1
        assert store.stats.unknown_endpoint_edges_dropped == 1

    def test_ids_sorted_and_indexed(self):
        store = ingest([PaperRecord("b", ym("2000-01")), PaperRecord("a", ym("2000-01"))], [])
        assert store.ids == ["a", "b"]
        assert store.index_of("b") == 1
        with pytest.raises(KeyError):
            store.index_of("zz")

    def test_duplicate_paper_keeps_first_title(self):
        store = ingest(
            [
                PaperRecord("a", ym("2000-01"), "first"),
                PaperRecord("a", ym("2000-01"), "second"),
            ],
            [],
        )
        assert store.titles == ["first"]
        assert store.stats.duplicate_papers_collapsed == 1

    def test_duplicate_paper_fills_missing_title_and_date(self):
        store = ingest(
            [PaperRecord("a"), PaperRecord("a", ym("2000-01"), "late title")],
            [],
        )
        assert store.titles == ["late title"]
        assert store.date_of("a") == YearMonth(2000, 1)

    def test_conflicting_dates_rejected(self):
        with pytest.raises(DuplicatePaperError):
            ingest(
                [PaperRecord("a", ym("2000-01")), PaperRecord("a", ym("2000-02"))],
                [],
            )

    def test_edges_sorted_by_citing_then_cited(self, tiny_store):
        pairs = list(zip(tiny_store.citing.tolist(), tiny_store.cited.tolist()))
        assert pairs == sorted(pairs)


def two_wave_store():
    papers = [
        PaperRecord("x", ym("2000-01")),
        PaperRecord("c1", ym("2000-02")),
        PaperRecord("c2", ym("2000-03")),
        PaperRecord("c3", ym("2000-06")),
        PaperRecord("c4", ym("2001-05")),
        PaperRecord("c5", ym("2001-07")),
        PaperRecord("u"),  # undated
    ]
    edges = [CitationEdge(f"c{i}", "x") for i in range(1, 6)]
    edges.append(CitationEdge("u", "x"))
    return ingest(papers, edges)


class TestSnapshot:
    def test_cutoff_is_inclusive_and_citations_filtered(self):
        # x is cited by five papers; two of them sit beyond the cutoff,
        # so only three citations are visible there.
        store = two_wave_store()
        snap = store.snapshot(ym("2000-12"))
        assert snap.citation_index("x") == 3
        full = store.snapshot(ym("2001-12"))
        assert full.citation_index("x") == 5

    def test_uncited_paper_scores_zero(self):
        snap = two_wave_store().snapshot(ym("2000-12"))
        assert snap.citation_index("c1") == 0

    def test_undated_papers_never_appear(self):
        snap = two_wave_store().snapshot(ym("2001-12"))
        assert "u" not in snap.paper_ids()
        with pytest.raises(KeyError):
            snap.local_index("u")

    def test_empty_snapshot_raises(self):
        with pytest.raises(EmptySnapshotError):
            two_wave_store().snapshot(ym("1980-01"))

    def test_citation_counts_sum_to_edge_count(self, tiny_store):
        for cutoff in ("2000-12", "2001-12"):
            snap = tiny_store.snapshot(ym(cutoff))
            assert int(snap.citation_counts().sum()) == snap.n_edges

    def test_vertices_in_paper_id_order(self, tiny_store):
        snap = tiny_store.snapshot(ym("2001-12"))
        assert snap.paper_ids() == sorted(snap.paper_ids())

    def test_out_adjacency_matches_edge_list(self, tiny_store):
        snap = tiny_store.snapshot(ym("2000-12"))
        edges = set()
        for x in range(snap.n_vertices):
            lo, hi = snap.out_indptr[x], snap.out_indptr[x + 1]
            for y in snap.out_indices[lo:hi]:
                edges.add((snap.paper_id(x), snap.paper_id(int(y))))
        assert edges == {
            ("a", "e"), ("a", "f"), ("b", "e"), ("b", "f"),
            ("c", "a"), ("c", "b"), ("d", "a"), ("d", "b"),
        }

    def test_in_adjacency_mirrors_out(self, tiny_store):
        snap = tiny_store.snapshot(ym("2001-12"))
        out_edges = set()
        in_edges = set()
        for x in range(snap.n_vertices):
            for y in snap.out_indices[snap.out_indptr[x]:snap.out_indptr[x + 1]]:
                out_edges.add((x, int(y)))
            for y in snap.in_indices[snap.in_indptr[x]:snap.in_indptr[x + 1]]:
                in_edges.add((int(y), x))
        assert out_edges == in_edges


@st.composite
def random_corpus(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    month_keys = draw(
        st.lists(st.integers(min_value=24000, max_value=24023), min_size=n, max_size=n)
    )
    papers = [
        PaperRecord(f"p{i:02d}", YearMonth.from_key(k)) for i, k in enumerate(month_keys)
    ]
    n_edges = draw(st.integers(min_value=0, max_value=3 * n))
    pairs = draw(
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=n - 1),
                st.integers(min_value=0, max_value=n - 1),
            ),
            min_size=n_edges,
            max_size=n_edges,
        )
    )
    edges = [CitationEdge(f"p{i:02d}", f"p{j:02d}") for i, j in pairs if i != j]
    return ingest(papers, edges)


class TestSnapshotNesting:
    @settings(max_examples=60, deadline=None)
    @given(store=random_corpus(), months=st.tuples(
        st.integers(min_value=24000, max_value=24023),
        st.integers(min_value=0, max_value=23),
    ))
    def test_earlier_snapshot_is_contained_in_later(self, store, months):
        k1 = months[0]
        k2 = min(k1 + months[1], 24023)
        try:
            s1 = store.snapshot(YearMonth.from_key(k1))
        except EmptySnapshotError:
            return
        s2 = store.snapshot(YearMonth.from_key(k2))
        assert set(s1.vertex_ids.tolist()) <= set(s2.vertex_ids.tolist())
        assert int(s1.n_edges) <= int(s2.n_edges)
        # sum of in-degrees always equals the edge count
        assert int(s1.citation_counts().sum()) == s1.n_edges


class TestStoreRoundtrip:
    def test_save_load_preserves_everything(self, tiny_store, tmp_path):
        save_store(tiny_store, tmp_path / "store")
        loaded = load_store(tmp_path / "store")
        assert loaded.ids == tiny_store.ids
        assert np.array_equal(loaded.date_keys, tiny_store.date_keys)
        assert loaded.titles == tiny_store.titles
        assert np.array_equal(loaded.citing, tiny_store.citing)
        assert np.array_equal(loaded.cited, tiny_store.cited)
        assert loaded.stats.as_dict() == tiny_store.stats.as_dict()

    def test_resave_is_byte_identical(self, tiny_store, tmp_path):
        save_store(tiny_store, tmp_path / "one")
        save_store(load_store(tmp_path / "one"), tmp_path / "two")
        for name in ("papers.tsv", "edges.tsv", "meta.json"):
            assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()

    def test_load_rejects_foreign_meta(self, tmp_path):
        d = tmp_path / "store"
        d.mkdir()
        (d / "meta.json").write_text('{"format": "something-else"}')
        with pytest.raises(ParseError):
            load_store(d)

    def test_ingest_files_equals_ingest(self, tiny_corpus_files, tiny_store):
        papers, edges = tiny_corpus_files
        store = ingest_files(edges, papers)
        assert store.ids == tiny_store.ids
        assert np.array_equal(store.citing, tiny_store.citing)


def test_ingest_is_deterministic(tiny_corpus_files):
    papers, edges = tiny_corpus_files
    a = ingest_files(edges, papers)
    b = ingest_files(edges, papers)
    assert a.ids == b.ids
    assert np.array_equal(a.date_keys, b.date_keys)
    assert np.array_equal(a.citing, b.citing)
    assert np.array_equal(a.cited, b.cited)
