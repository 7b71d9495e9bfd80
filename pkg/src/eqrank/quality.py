"""Partition quality scores, theme summaries, and synthetic corpora.

Modularity grades a partition of the weighted similarity graph; theme
summaries name each cluster through its most cited members and the
word pairs dominating member titles.  The planted-series generator
fabricates a dated citation corpus with known community structure and
known evolution events, giving the dynamics metrics something with a
ground truth to be checked against.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .core import Partition
from .corpus import CitationEdge, PaperRecord, Snapshot, YearMonth
from .dynamics import Lineage
from .weights import SimilarityGraph


@dataclass(frozen=True)
class ModularityScore:
    """Newman modularity with its per-cluster pieces.

    ``e_intra[i]`` is the weight fraction inside cluster i; ``a[i]`` is
    the fraction of edge ends attached to it; q sums e_intra - a**2.
    """

    q: float
    e_intra: np.ndarray
    a: np.ndarray

    @property
    def n_clusters(self) -> int:
        return len(self.e_intra)


def modularity(graph: SimilarityGraph, partition: Partition) -> ModularityScore:
    """Weighted modularity of a partition of a symmetric graph.

    Each undirected edge is stored twice, so cluster-internal weight
    and vertex strengths both come out doubled and the factors cancel
    against the doubled total.
    """
    if partition.n_vertices != graph.n:
        raise ValueError("partition does not cover the graph")
    labels = partition.labels
    k = partition.n_clusters
    lens = np.diff(graph.indptr)
    row_labels = np.repeat(labels, lens)
    col_labels = labels[graph.indices]
    same = row_labels == col_labels
    internal2 = np.bincount(row_labels[same], weights=graph.data[same], minlength=k)
    strength = np.bincount(row_labels, weights=graph.data, minlength=k)
    # normalizing by the same accumulation keeps the one-cluster score
    # at exactly zero for any weights
    total2 = float(strength.sum())
    if total2 <= 0.0:
        raise ValueError("graph has zero total weight")
    e_intra = internal2 / total2
    a = strength / total2
    q = float(np.sum(e_intra - a * a))
    return ModularityScore(q=q, e_intra=e_intra, a=a)


def symmetrized_citation_graph(snapshot: Snapshot) -> SimilarityGraph:
    """Citation graph as an undirected unit-weight similarity graph."""
    n = snapshot.n_vertices
    adj = sp.csr_matrix(
        (
            np.ones(snapshot.n_edges, dtype=np.float64),
            snapshot.out_indices,
            snapshot.out_indptr,
        ),
        shape=(n, n),
    )
    sym = (adj + adj.T).tocsr()
    sym.sum_duplicates()
    sym.data = np.ones_like(sym.data)
    return SimilarityGraph.from_csr(sym)


DEFAULT_STOPWORDS = frozenset(
    """
    a an and are as at be been but by for from has have if in into is it
    its of on or over some that the their then this to under up via was
    were which will with without
    """.split()
)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One stopword per line; blank lines and # comments ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            word = raw.strip().lower()
            if word and not word.startswith("#"):
                words.add(word)
    return frozenset(words)


_TOKEN_RE = re.compile(r"[a-z0-9]+(?:-[a-z0-9]+)*")


def _tokenize(title: str) -> list[str]:
    return _TOKEN_RE.findall(title.lower())


@dataclass(frozen=True)
class AuthorityPaper:
    paper_id: str
    citation_index: int
    title: str | None


def authority_papers(members: np.ndarray, snapshot: Snapshot, k: int) -> list[AuthorityPaper]:
    """Most cited members of a theme, ties broken by paper id.

    Vertex numbering follows paper-id order, so sorting by (count
    descending, vertex ascending) realizes the id tie-break.
    """
    members = np.asarray(members, dtype=np.int64)
    if len(members) == 0:
        raise ValueError("theme is empty")
    counts = snapshot.citation_counts()[members]
    order = np.lexsort((members, -counts))
    top = members[order][: max(k, 0)]
    all_counts = snapshot.citation_counts()
    return [
        AuthorityPaper(
            paper_id=snapshot.paper_id(int(v)),
            citation_index=int(all_counts[int(v)]),
            title=snapshot.title(int(v)),
        )
        for v in top
    ]


def theme_keywords(
    members: np.ndarray,
    snapshot: Snapshot,
    k: int,
    stopwords: frozenset[str] | None = None,
) -> list[tuple[str, int]]:
    """Most frequent adjacent word pairs in member titles.

    Titles are lowercased and stripped to word tokens; pairs containing
    a stopword are skipped.  Ties break lexicographically.  The method
    is a deliberately simple frequency stand-in for automatic keyword
    pairs.
    """
    if stopwords is None:
        stopwords = DEFAULT_STOPWORDS
    titled = [snapshot.title(int(v)) for v in members]
    titled = [t for t in titled if t]
    if not titled:
        raise ValueError("no titled members in theme")
    counts: dict[str, int] = {}
    for title in titled:
        tokens = _tokenize(title)
        for first, second in zip(tokens, tokens[1:]):
            if first in stopwords or second in stopwords:
                continue
            pair = f"{first} {second}"
            counts[pair] = counts.get(pair, 0) + 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[: max(k, 0)]


@dataclass(frozen=True)
class ThemeSummary:
    cluster_id: int
    size: int
    keywords: tuple[tuple[str, int], ...]
    authorities: tuple[AuthorityPaper, ...]
    birth_year: int | None = None
    first_stable_year: int | None = None


def build_theme_summaries(
    snapshot: Snapshot,
    partition: Partition,
    lineages: list[Lineage] | None = None,
    top_papers: int = 5,
    top_keywords: int = 4,
    stopwords: frozenset[str] | None = None,
) -> list[ThemeSummary]:
    """One summary per cluster, in cluster-id order.

    Keyword extraction needs titles; themes without any titled member
    get an empty keyword list rather than an error.
    """
    by_theme = {lin.theme: lin for lin in lineages} if lineages else {}
    summaries = []
    for cluster_id, members in enumerate(partition.clusters()):
        try:
            keywords = tuple(theme_keywords(members, snapshot, top_keywords, stopwords))
        except ValueError:
            keywords = ()
        lin = by_theme.get(cluster_id)
        summaries.append(
            ThemeSummary(
                cluster_id=cluster_id,
                size=len(members),
                keywords=keywords,
                authorities=tuple(authority_papers(members, snapshot, top_papers)),
                birth_year=lin.birth_year if lin else None,
                first_stable_year=lin.first_stable_year if lin else None,
            )
        )
    return summaries


@dataclass(frozen=True)
class PlantedCommunity:
    """One planted theme: initial size plus new papers per interval."""

    name: str
    initial_size: int
    growth: tuple[int, ...]


@dataclass(frozen=True)
class ChipOff:
    """A new community splitting off an existing one.

    At snapshot ``interval`` the ``seeds`` most recent papers of the
    parent switch to the new community, whose fresh papers cite them
    densely while the parent's fresh papers stop citing them.
    """

    parent: str
    name: str
    interval: int
    seeds: int
    growth: tuple[int, ...]


@dataclass(frozen=True)
class Absorption:
    """A community merging into another.

    From snapshot ``interval`` on the absorbed community stops growing
    and the absorber's fresh papers cite both memberships as one.
    """

    theme: str
    into: str
    interval: int


@dataclass(frozen=True)
class PlantedSpec:
    """Scenario description for the synthetic corpus generator."""

    cutoffs: tuple[YearMonth, ...]
    communities: tuple[PlantedCommunity, ...]
    chip_offs: tuple[ChipOff, ...] = ()
    absorptions: tuple[Absorption, ...] = ()
    p_intra: float = 0.5
    p_inter: float = 0.03
    min_intra_refs: int = 2

    @property
    def n_snapshots(self) -> int:
        return len(self.cutoffs)


@dataclass
class PlantedSeries:
    """Generated corpus plus the ground truth behind it.

    ``truth[w]`` maps each paper dated at or before cutoff w to its
    planted community name at that snapshot, events applied.
    """

    spec: PlantedSpec
    papers: list[PaperRecord]
    edges: list[CitationEdge]
    truth: list[dict[str, str]]


def _validate_spec(spec: PlantedSpec) -> None:
    if spec.n_snapshots < 1:
        raise ValueError("need at least one snapshot")
    if any(spec.cutoffs[i].key >= spec.cutoffs[i + 1].key for i in range(spec.n_snapshots - 1)):
        raise ValueError("cutoffs must be strictly increasing")
    if not 0.0 <= spec.p_inter < spec.p_intra <= 1.0:
        raise ValueError("need 0 <= p_inter < p_intra <= 1")
    n_intervals = spec.n_snapshots - 1
    names = [c.name for c in spec.communities]
    if len(set(names)) != len(names):
        raise ValueError("community names must be unique")
    for com in spec.communities:
        if com.initial_size < 1:
            raise ValueError(f"community {com.name!r} must start non-empty")
        if len(com.growth) != n_intervals:
            raise ValueError(f"community {com.name!r} needs {n_intervals} growth entries")
    known = set(names)
    event_touched: set[str] = set()
    for chip in spec.chip_offs:
        if chip.parent not in known:
            raise ValueError(f"chip-off parent {chip.parent!r} unknown")
        if chip.name in known:
            raise ValueError(f"chip-off name {chip.name!r} already taken")
        if not 1 <= chip.interval <= n_intervals:
            raise ValueError("chip-off interval out of range")
        if len(chip.growth) != n_intervals:
            raise ValueError(f"chip-off {chip.name!r} needs {n_intervals} growth entries")
        if any(chip.growth[: chip.interval - 1]):
            raise ValueError(f"chip-off {chip.name!r} cannot grow before its event")
        if chip.seeds < 1:
            raise ValueError("chip-off needs at least one seed paper")
        known.add(chip.name)
        if chip.parent in event_touched or chip.name in event_touched:
            raise ValueError("overlapping events")
        event_touched.update((chip.parent, chip.name))
    for ab in spec.absorptions:
        if ab.theme not in known or ab.into not in known:
            raise ValueError("absorption references unknown community")
        if ab.theme == ab.into:
            raise ValueError("community cannot absorb itself")
        if not 1 <= ab.interval <= n_intervals:
            raise ValueError("absorption interval out of range")
        if ab.theme in event_touched or ab.into in event_touched:
            raise ValueError("overlapping events")
        event_touched.update((ab.theme, ab.into))


def generate_planted_series(spec: PlantedSpec, seed: int) -> PlantedSeries:
    """Fabricate a dated corpus enacting the scenario.

    Papers arrive in waves, one per snapshot; each cites earlier papers
    of its own community with probability ``p_intra`` and everything
    else with ``p_inter``, with a floor of ``min_intra_refs`` own-side
    references so no paper ends up detached.  Identical spec and seed
    give identical output.
    """
    _validate_spec(spec)
    rng = np.random.default_rng(seed)

    community_of: list[str] = []  # per paper, current community
    created_in: list[int] = []  # per paper, wave index
    member_lists: dict[str, list[int]] = {c.name: [] for c in spec.communities}
    for chip in spec.chip_offs:
        member_lists[chip.name] = []
    absorbed_into: dict[str, str] = {}
    edges: list[tuple[int, int]] = []
    truth: list[dict[str, str]] = []

    def resolve(name: str) -> str:
        while name in absorbed_into:
            name = absorbed_into[name]
        return name

    def add_paper(name: str, wave: int) -> int:
        idx = len(community_of)
        community_of.append(name)
        created_in.append(wave)
        member_lists[name].append(idx)
        return idx

    def cite_from(idx: int, name: str) -> None:
        pool = resolve(name)
        n_earlier = idx
        if n_earlier == 0:
            return
        probs = np.full(n_earlier, spec.p_inter)
        own = [q for q in member_lists[pool] if q < idx]
        own_arr = np.asarray(own, dtype=np.int64)
        if len(own_arr):
            probs[own_arr] = spec.p_intra
        hits = np.nonzero(rng.random(n_earlier) < probs)[0]
        chosen = set(int(h) for h in hits)
        own_hits = [q for q in own if q in chosen]
        if len(own_hits) < spec.min_intra_refs and own:
            for q in reversed(own):
                if q not in chosen:
                    chosen.add(q)
                    own_hits.append(q)
                if len(own_hits) >= spec.min_intra_refs:
                    break
        for q in sorted(chosen):
            edges.append((idx, q))

    growth_of = {c.name: c.growth for c in spec.communities}
    growth_of.update({chip.name: chip.growth for chip in spec.chip_offs})

    for wave in range(spec.n_snapshots):
        if wave > 0:
            for chip in spec.chip_offs:
                if chip.interval == wave:
                    donors = [q for q in member_lists[chip.parent] if created_in[q] < wave]
                    if chip.seeds >= len(donors):
                        raise ValueError(
                            f"chip-off {chip.name!r} would take all of {chip.parent!r}"
                        )
                    seeds = donors[-chip.seeds:]
                    seed_set = set(seeds)
                    member_lists[chip.parent] = [
                        q for q in member_lists[chip.parent] if q not in seed_set
                    ]
                    for q in seeds:
                        member_lists[chip.name].append(q)
                        community_of[q] = chip.name
                    member_lists[chip.name].sort()
            for ab in spec.absorptions:
                if ab.interval == wave:
                    target = resolve(ab.into)
                    absorbed_into[ab.theme] = target
                    for q in member_lists[ab.theme]:
                        community_of[q] = target
                    member_lists[target].extend(member_lists[ab.theme])
                    member_lists[target].sort()
                    member_lists[ab.theme] = []

        batch: list[str] = []
        for name, growth in growth_of.items():
            count = (
                next(c.initial_size for c in spec.communities if c.name == name)
                if wave == 0 and name in {c.name for c in spec.communities}
                else (growth[wave - 1] if wave > 0 else 0)
            )
            if name in absorbed_into:
                count = 0
            batch.extend([name] * count)
        order = rng.permutation(len(batch))
        for pos in order:
            name = batch[pos]
            idx = add_paper(name, wave)
            cite_from(idx, name)

        snapshot_truth = {
            _paper_id(q): community_of[q] for q in range(len(community_of))
        }
        truth.append(snapshot_truth)

    dates = _assign_dates(created_in, spec.cutoffs)
    papers = [
        PaperRecord(
            id=_paper_id(q),
            date=dates[q],
            title=f"{community_of[q]} dynamics result {q:04d}",
        )
        for q in range(len(community_of))
    ]
    edge_records = [
        CitationEdge(_paper_id(i), _paper_id(j)) for i, j in edges
    ]
    return PlantedSeries(spec=spec, papers=papers, edges=edge_records, truth=truth)


def _paper_id(index: int) -> str:
    return f"p{index:06d}"


def _assign_dates(created_in: list[int], cutoffs: tuple[YearMonth, ...]) -> list[YearMonth]:
    """Spread each wave's papers evenly over the months before its cutoff."""
    windows = []
    for w, cutoff in enumerate(cutoffs):
        if w == 0:
            start = cutoff.key - 5
        else:
            start = cutoffs[w - 1].key + 1
        windows.append((start, cutoff.key))
    wave_sizes: dict[int, int] = {}
    for w in created_in:
        wave_sizes[w] = wave_sizes.get(w, 0) + 1
    seen: dict[int, int] = {}
    out = []
    for w in created_in:
        pos = seen.get(w, 0)
        seen[w] = pos + 1
        start, end = windows[w]
        span = end - start + 1
        month_key = start + pos * span // wave_sizes[w]
        out.append(YearMonth.from_key(month_key))
    return out


def default_planted_spec(
    p_intra: float = 0.65,
    p_inter: float = 0.012,
) -> PlantedSpec:
    """Three snapshots, four communities, one chip-off, one absorption.

    The chip-off happens in the first interval (community ``nova``
    leaving ``beta``), the absorption in the second (``gamma`` merging
    into ``alpha``), so each event lands in its own snapshot pair.  The
    default probabilities give strong separation (intra more than five
    times inter), at which the pipeline recovers both events reliably.
    """
    cutoffs = tuple(YearMonth.parse(c) for c in ("2000-12", "2001-12", "2002-12"))
    return PlantedSpec(
        cutoffs=cutoffs,
        communities=(
            PlantedCommunity("alpha", 34, (16, 20)),
            PlantedCommunity("beta", 34, (12, 12)),
            PlantedCommunity("gamma", 20, (8, 0)),
            PlantedCommunity("delta", 24, (10, 10)),
        ),
        chip_offs=(ChipOff(parent="beta", name="nova", interval=1, seeds=8, growth=(20, 10)),),
        absorptions=(Absorption(theme="gamma", into="alpha", interval=2),),
        p_intra=p_intra,
        p_inter=p_inter,
        min_intra_refs=3,
    )


def synthesize_benchmark_corpus(
    n_papers: int,
    target_edges: int,
    n_snapshots: int,
    n_communities: int = 40,
    intra_fraction: float = 0.8,
    seed: int = 0,
) -> tuple[list[PaperRecord], list[CitationEdge], tuple[YearMonth, ...]]:
    """Large community-structured corpus for runtime checks.

    Communities are assigned round-robin so a community's earlier
    members are arithmetic positions, letting reference sampling stay
    vectorized.  Edge count lands close to the target (duplicates are
    merged).
    """
    if n_papers < n_communities * 2:
        raise ValueError("too few papers for the community count")
    rng = np.random.default_rng(seed)
    avg_refs = target_edges / n_papers
    k = n_communities

    src_parts: list[np.ndarray] = []
    dst_parts: list[np.ndarray] = []
    refs = rng.poisson(avg_refs, size=n_papers)
    for i in range(1, n_papers):
        total = min(int(refs[i]), i)
        if total == 0:
            total = 1
        c = i % k
        n_own_earlier = (i - c - 1) // k + 1 if i > c else 0
        n_intra = int(round(total * intra_fraction))
        n_intra = min(n_intra, n_own_earlier * 3)
        n_inter = total - n_intra
        targets = []
        if n_intra > 0 and n_own_earlier > 0:
            targets.append(c + k * rng.integers(0, n_own_earlier, size=n_intra))
        if n_inter > 0:
            targets.append(rng.integers(0, i, size=n_inter))
        if not targets:
            targets.append(rng.integers(0, i, size=1))
        tgt = np.unique(np.concatenate(targets))
        tgt = tgt[tgt != i]
        src_parts.append(np.full(len(tgt), i, dtype=np.int64))
        dst_parts.append(tgt.astype(np.int64))
    src = np.concatenate(src_parts)
    dst = np.concatenate(dst_parts)

    first = YearMonth(1994, 1)
    months_total = 12 * n_snapshots
    month_keys = first.key + (np.arange(n_papers) * months_total) // n_papers
    cutoffs = tuple(
        YearMonth.from_key(first.key + 12 * (w + 1) - 1) for w in range(n_snapshots)
    )

    papers = [
        PaperRecord(
            id=_paper_id(i),
            date=YearMonth.from_key(int(month_keys[i])),
            title=f"community {i % k} topic advances {i:05d}",
        )
        for i in range(n_papers)
    ]
    edges = [CitationEdge(_paper_id(int(i)), _paper_id(int(j))) for i, j in zip(src, dst)]
    return papers, edges, cutoffs


def write_corpus_files(
    papers: list[PaperRecord],
    edges: list[CitationEdge],
    directory: str | Path,
) -> tuple[Path, Path]:
    """Write plain papers.tsv / edges.tsv inputs for the pipeline."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    papers_path = directory / "papers.tsv"
    edges_path = directory / "edges.tsv"
    with open(papers_path, "w", encoding="utf-8") as fh:
        for rec in papers:
            date = "" if rec.date is None else str(rec.date)
            if rec.title is None:
                fh.write(f"{rec.id}\t{date}\n")
            else:
                title = rec.title.replace("\\", "\\\\").replace("\t", "\\t")
                fh.write(f"{rec.id}\t{date}\t{title}\n")
    with open(edges_path, "w", encoding="utf-8") as fh:
        for edge in edges:
            fh.write(f"{edge.citing}\t{edge.cited}\n")
    return edges_path, papers_path
