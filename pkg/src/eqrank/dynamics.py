"""Theme evolution between snapshots of a growing corpus.

Snapshots nest (every old paper is still present later), so a cluster
of the earlier partition can be compared with clusters of the later one
by counting shared old papers.  Map1 sends each old theme to the later
theme holding most of its papers; Map2 sends later themes back the same
way.  Themes fixed by the round trip are stable; the rest of the old
partition was absorbed, and later themes missed by Map1 are new.  On
top of the classification sit the scheme-stability coefficients, the
indexing-migration rate, and multi-snapshot lineage chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Snapshot
from .core import Partition, compact_labels
from .errors import NoEligiblePapersError


@dataclass(frozen=True)
class ThemeMaps:
    """Cross-partition cluster maps with their supporting overlaps.

    ``map2`` is -1 for later clusters holding no old papers.  The label
    arrays pair each old vertex's cluster in both partitions; they are
    the raw material for migration checks.
    """

    map1: np.ndarray
    map2: np.ndarray
    map1_overlap: np.ndarray
    map2_overlap: np.ndarray
    old_labels_p1: np.ndarray
    old_labels_p2: np.ndarray
    n_clusters_p1: int
    n_clusters_p2: int


@dataclass
class InducedPartition:
    """Restriction of a partition to a vertex subset.

    ``source_ids[new]`` is the original cluster id behind each surviving
    cluster; ``dropped_ids`` lists clusters with no vertex in the subset
    (purely-new themes when restricting a later partition to old
    vertices).
    """

    partition: Partition
    source_ids: np.ndarray
    dropped_ids: np.ndarray


def induce(partition: Partition, positions: np.ndarray) -> InducedPartition:
    """Restrict a partition to the vertices at the given positions."""
    positions = np.asarray(positions, dtype=np.int64)
    if len(positions) and (positions.min() < 0 or positions.max() >= partition.n_vertices):
        raise ValueError("positions outside the partitioned vertex set")
    labels, kept = compact_labels(partition.labels[positions])
    dropped = np.setdiff1d(np.arange(partition.n_clusters), kept)
    return InducedPartition(Partition(labels, len(kept)), kept, dropped)


def build_maps(p1: Partition, p2: Partition, old_positions: np.ndarray) -> ThemeMaps:
    """Map clusters across a pair by maximal old-paper intersection.

    ``old_positions[i]`` locates old vertex i inside the later
    partition.  Ties prefer the larger target cluster (sized in its own
    partition), then the smaller cluster id.
    """
    old_positions = np.asarray(old_positions, dtype=np.int64)
    if len(old_positions) != p1.n_vertices:
        raise ValueError("old_positions must cover the earlier vertex set")
    l1 = p1.labels
    l2 = p2.labels[old_positions]
    k1, k2 = p1.n_clusters, p2.n_clusters

    pair_keys = l1 * k2 + l2
    uniq, counts = np.unique(pair_keys, return_counts=True)
    rows = uniq // k2
    cols = uniq % k2

    sizes1 = p1.sizes()
    sizes2 = p2.sizes()

    map1, map1_overlap = _argmax_by_group(rows, cols, counts, sizes2, k1)
    map2, map2_overlap = _argmax_by_group(cols, rows, counts, sizes1, k2)
    return ThemeMaps(
        map1=map1,
        map2=map2,
        map1_overlap=map1_overlap,
        map2_overlap=map2_overlap,
        old_labels_p1=l1,
        old_labels_p2=l2,
        n_clusters_p1=k1,
        n_clusters_p2=k2,
    )


def _argmax_by_group(groups, targets, counts, target_sizes, n_groups):
    """Per group, the target with the largest count.

    Ties prefer the larger target (by ``target_sizes``), then the
    smaller target id.  Groups never observed map to -1.
    """
    best = np.full(n_groups, -1, dtype=np.int64)
    best_overlap = np.zeros(n_groups, dtype=np.int64)
    best_size = np.zeros(n_groups, dtype=np.int64)
    for g, t, c in zip(groups, targets, counts):
        size = target_sizes[t]
        if (
            c > best_overlap[g]
            or (c == best_overlap[g] and size > best_size[g])
            or (c == best_overlap[g] and size == best_size[g] and t < best[g])
        ):
            best[g] = t
            best_overlap[g] = c
            best_size[g] = size
    return best, best_overlap


@dataclass
class DynamicsReport:
    """Theme classification for one snapshot pair, plus its metrics.

    Cluster ids refer to the two partitions of the pair.  ``stable``
    and ``absorbed`` split the earlier partition; ``new`` lists later
    clusters not reached by Map1 from a stable theme.  Metric fields
    are filled by :func:`csc` and :func:`tmc`.
    """

    maps: ThemeMaps
    stable: np.ndarray
    absorbed: np.ndarray
    new: np.ndarray
    broke_from: dict[int, int | None]
    absorbed_by: dict[int, int]
    csc1: float | None = None
    csc2: float | None = None
    tmc_value: float | None = None
    tmc_by_cut: dict[int, float | None] = field(default_factory=dict)
    _violators: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_clusters_p1(self) -> int:
        return self.maps.n_clusters_p1

    @property
    def n_clusters_p2(self) -> int:
        return self.maps.n_clusters_p2

    @property
    def n_old_vertices(self) -> int:
        return len(self.maps.old_labels_p1)

    def violating_vertices(self) -> np.ndarray:
        """Old-vertex positions breaking the indexing-consistency rules."""
        if self._violators is None:
            self._violators = _violating_vertices(self)
        return self._violators


def classify_themes(maps: ThemeMaps) -> DynamicsReport:
    """Split the pair's themes into stable, absorbed, and new."""
    k1, k2 = maps.n_clusters_p1, maps.n_clusters_p2
    ids1 = np.arange(k1, dtype=np.int64)
    stable_mask = maps.map2[maps.map1] == ids1
    stable = ids1[stable_mask]
    absorbed = ids1[~stable_mask]

    reached = np.zeros(k2, dtype=bool)
    reached[maps.map1[stable]] = True
    new = np.arange(k2, dtype=np.int64)[~reached]

    stable_set = set(stable.tolist())
    broke_from: dict[int, int | None] = {}
    for t in new.tolist():
        parent = int(maps.map2[t])
        broke_from[t] = parent if parent >= 0 and parent in stable_set else None
    absorbed_by = {int(t): int(maps.map1[t]) for t in absorbed.tolist()}
    return DynamicsReport(
        maps=maps,
        stable=stable,
        absorbed=absorbed,
        new=new,
        broke_from=broke_from,
        absorbed_by=absorbed_by,
    )


def csc(report: DynamicsReport) -> tuple[float, float]:
    """Scheme-stability coefficients of a classified pair.

    CSC1 is the stable fraction of old themes; CSC2 is the fraction of
    old papers sitting in stable themes.
    """
    k1 = report.n_clusters_p1
    n_old = report.n_old_vertices
    if k1 == 0 or n_old == 0:
        raise ValueError("earlier partition is empty")
    csc1 = len(report.stable) / k1
    sizes1 = np.bincount(report.maps.old_labels_p1, minlength=k1)
    csc2 = float(sizes1[report.stable].sum()) / n_old
    report.csc1 = csc1
    report.csc2 = csc2
    return csc1, csc2


def _violating_vertices(report: DynamicsReport) -> np.ndarray:
    """Old vertices violating any indexing-consistency rule.

    A paper in a stable theme must follow Map1 or leave to a new theme
    that broke from its theme; a paper landing in a new theme must come
    from that theme's stable parent; a paper in an absorbed theme must
    follow the absorption.
    """
    maps = report.maps
    t1 = maps.old_labels_p1
    t2 = maps.old_labels_p2
    k1, k2 = maps.n_clusters_p1, maps.n_clusters_p2

    stable_mask = np.zeros(k1, dtype=bool)
    stable_mask[report.stable] = True
    new_mask = np.zeros(k2, dtype=bool)
    new_mask[report.new] = True
    parent = np.full(k2, -1, dtype=np.int64)
    for t, p in report.broke_from.items():
        if p is not None:
            parent[t] = p

    in_stable = stable_mask[t1]
    followed = t2 == maps.map1[t1]
    to_breakaway = new_mask[t2] & (parent[t2] == t1)
    rule1 = in_stable & ~followed & ~to_breakaway

    in_new = new_mask[t2]
    m2 = maps.map2[t2]
    # m2 == t1 forces m2 >= 0, so the clipped index is only read when valid.
    from_parent = (m2 == t1) & stable_mask[np.clip(m2, 0, k1 - 1)]
    rule2 = in_new & ~from_parent

    rule3 = ~in_stable & ~followed

    return np.nonzero(rule1 | rule2 | rule3)[0].astype(np.int64)


def tmc(
    report: DynamicsReport,
    citation_counts: np.ndarray | None = None,
    cut: int | None = None,
) -> float:
    """Fraction of eligible old papers violating indexing consistency.

    ``citation_counts`` holds each old paper's citation index measured
    in the later snapshot; with a cut, only papers cited more than
    ``cut`` times count.  Without a cut every old paper is eligible.
    """
    violators = report.violating_vertices()
    n_old = report.n_old_vertices
    if cut is None:
        if n_old == 0:
            raise NoEligiblePapersError("no old papers to check")
        value = len(violators) / n_old
        report.tmc_value = value
        return value
    if cut < 0:
        raise ValueError("cut must be non-negative")
    if citation_counts is None:
        raise ValueError("citation_counts required when a cut is given")
    citation_counts = np.asarray(citation_counts)
    if len(citation_counts) != n_old:
        raise ValueError("citation_counts must cover the old vertex set")
    eligible = citation_counts > cut
    n_eligible = int(np.count_nonzero(eligible))
    if n_eligible == 0:
        raise NoEligiblePapersError(f"no old papers with citation index above {cut}")
    viol_mask = np.zeros(n_old, dtype=bool)
    viol_mask[violators] = True
    value = float(np.count_nonzero(viol_mask & eligible)) / n_eligible
    report.tmc_by_cut[int(cut)] = value
    return value


@dataclass
class SnapshotPair:
    """Two nested snapshots with their partitions.

    Validates that every earlier paper is still present later, and
    locates each old vertex inside the later snapshot.
    """

    earlier: Snapshot
    later: Snapshot
    p1: Partition
    p2: Partition

    def __post_init__(self):
        if self.p1.n_vertices != self.earlier.n_vertices:
            raise ValueError("p1 does not cover the earlier snapshot")
        if self.p2.n_vertices != self.later.n_vertices:
            raise ValueError("p2 does not cover the later snapshot")
        v1, v2 = self.earlier.vertex_ids, self.later.vertex_ids
        pos = np.searchsorted(v2, v1)
        if pos.max(initial=-1) >= len(v2) or not np.array_equal(v2[np.minimum(pos, len(v2) - 1)], v1):
            raise ValueError("earlier snapshot is not contained in the later one")
        self.old_positions = pos.astype(np.int64)

    @property
    def label(self) -> str:
        return f"{self.earlier.cutoff}->{self.later.cutoff}"

    def compare(self, cuts: tuple[int, ...] = ()) -> DynamicsReport:
        """Full classification plus CSC and TMC (base and per cut).

        A cut that leaves no eligible papers records None for that cut
        and keeps going; callers decide whether that is fatal.
        """
        maps = build_maps(self.p1, self.p2, self.old_positions)
        report = classify_themes(maps)
        csc(report)
        tmc(report)
        counts = self.later.citation_counts()[self.old_positions]
        for cut in cuts:
            try:
                tmc(report, counts, int(cut))
            except NoEligiblePapersError:
                report.tmc_by_cut[int(cut)] = None
        return report


@dataclass(frozen=True)
class Lineage:
    """Backward trace of one theme of the latest partition.

    ``chain`` runs newest to oldest as (year, cluster id) links; the
    walk follows Map2 while the earlier theme is stable and stops at a
    new theme or the first snapshot.
    """

    theme: int
    birth_year: int
    first_stable_year: int | None
    chain: tuple[tuple[int, int], ...]


def lineage(reports: list[DynamicsReport], years: list[int]) -> list[Lineage]:
    """Trace every theme of the last partition back through the series.

    ``reports[i]`` must compare snapshot i with snapshot i+1, and
    ``years`` labels the snapshots, one per snapshot.
    """
    if len(years) != len(reports) + 1:
        raise ValueError("need one year per snapshot")
    if not reports:
        raise ValueError("need at least two snapshots")
    out = []
    new_sets = [set(rep.new.tolist()) for rep in reports]
    k_last = reports[-1].n_clusters_p2
    for theme in range(k_last):
        chain = [(years[-1], theme)]
        cur = theme
        birth = years[0]
        for i in range(len(reports) - 1, -1, -1):
            if cur in new_sets[i]:
                birth = years[i + 1]
                break
            cur = int(reports[i].maps.map2[cur])
            chain.append((years[i], cur))
        first_stable = chain[-1][0] if len(chain) > 1 else None
        out.append(
            Lineage(
                theme=theme,
                birth_year=birth,
                first_stable_year=first_stable,
                chain=tuple(chain),
            )
        )
    return out
