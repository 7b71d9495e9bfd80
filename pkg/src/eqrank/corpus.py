"""Citation corpus ingestion and time-sliced snapshots.

A corpus is a set of papers (id, publication month, optional title)
plus directed citation edges.  After cleaning, the corpus can be cut at
any month to produce a snapshot: the subgraph induced by papers dated
at or before the cutoff.  All ordering is by paper id, so identical
inputs always produce bit-identical stores and snapshots.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .errors import DuplicatePaperError, EmptySnapshotError, ParseError

_DATE_RE = re.compile(r"^(\d{4})-(\d{2})$")

STORE_FORMAT = "eqrank-corpus"
STORE_VERSION = 1


class YearMonth(NamedTuple):
    """A calendar month, the resolution at which papers are dated."""

    year: int
    month: int

    @classmethod
    def parse(cls, text: str) -> "YearMonth":
        m = _DATE_RE.match(text)
        if not m:
            raise ValueError(f"expected YYYY-MM, got {text!r}")
        year, month = int(m.group(1)), int(m.group(2))
        if not 1 <= month <= 12:
            raise ValueError(f"month out of range in {text!r}")
        return cls(year, month)

    @property
    def key(self) -> int:
        """Total month count; monotone in calendar order."""
        return self.year * 12 + (self.month - 1)

    @classmethod
    def from_key(cls, key: int) -> "YearMonth":
        return cls(key // 12, key % 12 + 1)

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


@dataclass(frozen=True)
class PaperRecord:
    id: str
    date: YearMonth | None = None
    title: str | None = None


class CitationEdge(NamedTuple):
    citing: str
    cited: str


@dataclass
class IngestStats:
    """Counters for everything dropped or collapsed during cleaning."""

    papers: int = 0
    edges_kept: int = 0
    self_loops_dropped: int = 0
    duplicate_edges_dropped: int = 0
    unknown_endpoint_edges_dropped: int = 0
    duplicate_papers_collapsed: int = 0
    edges_with_undated_endpoint: int = 0

    def as_dict(self) -> dict:
        return dict(vars(self))


def _unescape_title(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            if nxt == "t":
                out.append("\t")
                i += 2
                continue
            if nxt == "\\":
                out.append("\\")
                i += 2
                continue
        out.append(c)
        i += 1
    return "".join(out)


def _escape_title(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t")


def read_edges_file(path: str | Path) -> Iterable[CitationEdge]:
    """Parse a tab-separated edge list: citing_id, cited_id per line."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ParseError(str(path), line_no, f"expected 2 tab-separated fields, got {line!r}")
            yield CitationEdge(parts[0], parts[1])


def read_papers_file(path: str | Path) -> Iterable[PaperRecord]:
    """Parse a paper table: id, YYYY-MM date, optional title per line.

    An empty date field means the paper is undated.  The title is the
    last field and may contain tabs escaped as backslash-t.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t", 2)
            if len(parts) < 2 or not parts[0]:
                raise ParseError(str(path), line_no, f"expected id and date fields, got {line!r}")
            date: YearMonth | None = None
            if parts[1]:
                try:
                    date = YearMonth.parse(parts[1])
                except ValueError as exc:
                    raise ParseError(str(path), line_no, str(exc)) from exc
            title = _unescape_title(parts[2]) if len(parts) == 3 and parts[2] else None
            yield PaperRecord(parts[0], date, title)


@dataclass
class CorpusStore:
    """Cleaned corpus with papers and edges in canonical order.

    ``ids`` is sorted; a paper's index is its rank in that order.
    ``date_keys`` holds each paper's month key, -1 when undated.
    Edges are index pairs sorted by (citing, cited) with duplicate,
    self-loop, and unknown-endpoint edges already removed.
    """

    ids: list[str]
    date_keys: np.ndarray
    titles: list[str | None]
    citing: np.ndarray
    cited: np.ndarray
    stats: IngestStats = field(default_factory=IngestStats)
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {pid: i for i, pid in enumerate(self.ids)}

    @property
    def n_papers(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return len(self.citing)

    def index_of(self, paper_id: str) -> int:
        try:
            return self._index[paper_id]
        except KeyError:
            raise KeyError(f"unknown paper id: {paper_id!r}") from None

    def date_of(self, paper_id: str) -> YearMonth | None:
        key = int(self.date_keys[self.index_of(paper_id)])
        return None if key < 0 else YearMonth.from_key(key)

    def snapshot(self, cutoff: YearMonth) -> "Snapshot":
        return snapshot(self, cutoff)

    def save(self, directory: str | Path) -> None:
        save_store(self, directory)

    @classmethod
    def load(cls, directory: str | Path) -> "CorpusStore":
        return load_store(directory)


def ingest(papers: Iterable[PaperRecord], edges: Iterable[CitationEdge]) -> CorpusStore:
    """Clean and index a corpus.

    Cleaning order: edges with endpoints missing from the paper table
    are dropped first, then self-citations, then duplicate edges; each
    drop is counted.  Repeated paper records collapse to one, keeping
    the first title seen; conflicting dates for one id are an error.
    """
    stats = IngestStats()
    dates: dict[str, YearMonth | None] = {}
    titles: dict[str, str | None] = {}
    for rec in papers:
        if rec.id in dates:
            stats.duplicate_papers_collapsed += 1
            old = dates[rec.id]
            if rec.date is not None:
                if old is not None and old != rec.date:
                    raise DuplicatePaperError(
                        f"paper {rec.id!r} has conflicting dates {old} and {rec.date}"
                    )
                dates[rec.id] = rec.date
            if titles[rec.id] is None:
                titles[rec.id] = rec.title
        else:
            dates[rec.id] = rec.date
            titles[rec.id] = rec.title

    ids = sorted(dates)
    index = {pid: i for i, pid in enumerate(ids)}
    stats.papers = len(ids)
    date_keys = np.fromiter(
        (-1 if dates[pid] is None else dates[pid].key for pid in ids),
        dtype=np.int64,
        count=len(ids),
    )

    src: list[int] = []
    dst: list[int] = []
    for edge in edges:
        i = index.get(edge.citing)
        j = index.get(edge.cited)
        if i is None or j is None:
            stats.unknown_endpoint_edges_dropped += 1
            continue
        if i == j:
            stats.self_loops_dropped += 1
            continue
        src.append(i)
        dst.append(j)

    citing = np.asarray(src, dtype=np.int64)
    cited = np.asarray(dst, dtype=np.int64)
    if len(citing):
        packed = citing * len(ids) + cited
        unique_packed = np.unique(packed)
        stats.duplicate_edges_dropped = len(packed) - len(unique_packed)
        citing, cited = np.divmod(unique_packed, len(ids))
    stats.edges_kept = len(citing)
    undated = date_keys < 0
    if len(citing):
        stats.edges_with_undated_endpoint = int(
            np.count_nonzero(undated[citing] | undated[cited])
        )

    return CorpusStore(
        ids=ids,
        date_keys=date_keys,
        titles=[titles[pid] for pid in ids],
        citing=citing,
        cited=cited,
        stats=stats,
        _index=index,
    )


def ingest_files(edges_path: str | Path, papers_path: str | Path) -> CorpusStore:
    return ingest(read_papers_file(papers_path), read_edges_file(edges_path))


@dataclass
class Snapshot:
    """Citation subgraph of all dated papers at or before a cutoff.

    Vertices are numbered 0..n-1 in paper-id order; ``vertex_ids`` maps
    each local vertex back to its corpus index.  Both adjacency
    directions are stored in CSR form: ``out`` rows list the papers a
    vertex cites, ``in`` rows list the papers citing it.
    """

    store: CorpusStore
    cutoff: YearMonth
    vertex_ids: np.ndarray
    out_indptr: np.ndarray
    out_indices: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_edges(self) -> int:
        return len(self.out_indices)

    def paper_id(self, vertex: int) -> str:
        return self.store.ids[int(self.vertex_ids[vertex])]

    def paper_ids(self) -> list[str]:
        return [self.store.ids[int(g)] for g in self.vertex_ids]

    def title(self, vertex: int) -> str | None:
        return self.store.titles[int(self.vertex_ids[vertex])]

    def local_index(self, paper_id: str) -> int:
        """Vertex number of a paper, or KeyError if absent at this cutoff."""
        g = self.store.index_of(paper_id)
        pos = int(np.searchsorted(self.vertex_ids, g))
        if pos == self.n_vertices or self.vertex_ids[pos] != g:
            raise KeyError(f"paper {paper_id!r} is not in the {self.cutoff} snapshot")
        return pos

    def citation_counts(self) -> np.ndarray:
        """In-degree of every vertex: citations received within the snapshot."""
        return np.diff(self.in_indptr)

    def citation_index(self, paper_id: str) -> int:
        """Citations a paper has received from papers inside this snapshot."""
        return int(self.citation_counts()[self.local_index(paper_id)])

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_indptr)


def snapshot(store: CorpusStore, cutoff: YearMonth) -> Snapshot:
    """Cut the corpus at a month (inclusive).  Undated papers never appear."""
    keys = store.date_keys
    vmask = (keys >= 0) & (keys <= cutoff.key)
    verts = np.nonzero(vmask)[0].astype(np.int64)
    if len(verts) == 0:
        raise EmptySnapshotError(f"no dated papers at or before {cutoff}")
    n = len(verts)

    emask = vmask[store.citing] & vmask[store.cited]
    src = np.searchsorted(verts, store.citing[emask]).astype(np.int64)
    dst = np.searchsorted(verts, store.cited[emask]).astype(np.int64)

    # Store edges are sorted by (citing, cited); the restriction to a
    # subset preserved that order, so the out-CSR needs no sort.
    out_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=out_indptr[1:])
    out_indices = dst

    order = np.lexsort((src, dst))
    in_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(dst, minlength=n), out=in_indptr[1:])
    in_indices = src[order]

    return Snapshot(
        store=store,
        cutoff=cutoff,
        vertex_ids=verts,
        out_indptr=out_indptr,
        out_indices=out_indices,
        in_indptr=in_indptr,
        in_indices=in_indices,
    )


def save_store(store: CorpusStore, directory: str | Path) -> None:
    """Write a store as canonical papers.tsv / edges.tsv / meta.json."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "papers.tsv", "w", encoding="utf-8") as fh:
        for i, pid in enumerate(store.ids):
            key = int(store.date_keys[i])
            date = "" if key < 0 else str(YearMonth.from_key(key))
            title = store.titles[i]
            if title is None:
                fh.write(f"{pid}\t{date}\n")
            else:
                fh.write(f"{pid}\t{date}\t{_escape_title(title)}\n")
    with open(directory / "edges.tsv", "w", encoding="utf-8") as fh:
        for i, j in zip(store.citing, store.cited):
            fh.write(f"{store.ids[int(i)]}\t{store.ids[int(j)]}\n")
    meta = {
        "format": STORE_FORMAT,
        "version": STORE_VERSION,
        "n_papers": store.n_papers,
        "n_edges": store.n_edges,
        "stats": store.stats.as_dict(),
    }
    with open(directory / "meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_store(directory: str | Path) -> CorpusStore:
    directory = Path(directory)
    meta_path = directory / "meta.json"
    with open(meta_path, encoding="utf-8") as fh:
        meta = json.load(fh)
    if meta.get("format") != STORE_FORMAT:
        raise ParseError(str(meta_path), 1, "not a corpus store")
    if meta.get("version") != STORE_VERSION:
        raise ParseError(str(meta_path), 1, f"unsupported store version {meta.get('version')!r}")
    store = ingest_files(directory / "edges.tsv", directory / "papers.tsv")
    saved = meta.get("stats")
    if saved:
        store.stats = IngestStats(**saved)
    return store
