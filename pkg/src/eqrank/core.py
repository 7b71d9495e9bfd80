"""Base clustering of a similarity graph.

Every vertex keeps a single edge to its heaviest neighbor which yields a
functional graph.  Its strongly connected components are single cycles
(or lone vertices), and each weak component drains into exactly one such
cycle.  Clusters are the sets of vertices draining into the same cycle:
the finest partition in which every vertex shares a cluster with some
heaviest neighbor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .weights import SimilarityGraph


@dataclass(frozen=True)
class Partition:
    """Cluster labels for vertices 0..n-1 with dense cluster ids 0..k-1."""

    labels: np.ndarray
    n_clusters: int

    def __post_init__(self):
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=np.int64))

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        labels = np.asarray(labels, dtype=np.int64)
        if len(labels) == 0:
            return cls(labels, 0)
        k = int(labels.max()) + 1
        if labels.min() < 0:
            raise ValueError("labels must be non-negative")
        if len(np.unique(labels)) != k:
            raise ValueError("cluster ids must be dense 0..k-1")
        return cls(labels, k)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(np.arange(n, dtype=np.int64), n)

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_clusters)

    def clusters(self) -> list[np.ndarray]:
        order = np.argsort(self.labels, kind="stable")
        bounds = np.searchsorted(self.labels[order], np.arange(self.n_clusters + 1))
        return [order[bounds[i]:bounds[i + 1]] for i in range(self.n_clusters)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.n_clusters == other.n_clusters and np.array_equal(
            self.labels, other.labels
        )

    def __hash__(self):
        return hash((self.n_clusters, self.labels.tobytes()))


def canonical_labels(raw: np.ndarray) -> np.ndarray:
    """Renumber arbitrary labels so ids follow smallest member vertex."""
    raw = np.asarray(raw, dtype=np.int64)
    uniq, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(uniq))
    return rank[inverse]


def compact_labels(raw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop unused label values, preserving relative id order.

    Returns the compacted labels and the surviving old ids, so that
    ``kept[new_id] == old_id``.
    """
    raw = np.asarray(raw, dtype=np.int64)
    kept, inverse = np.unique(raw, return_inverse=True)
    return inverse.astype(np.int64), kept


@dataclass(frozen=True)
class MaximalGraph:
    """Functional graph keeping one heaviest out-edge per vertex.

    ``successor[x]`` is the retained neighbor, -1 if x has no neighbors.
    """

    successor: np.ndarray

    @property
    def n(self) -> int:
        return len(self.successor)


def maximal_subgraph(graph: SimilarityGraph) -> MaximalGraph:
    """Keep one edge per vertex to its heaviest neighbor.

    Ties break toward the smallest vertex index, so the result is
    deterministic for any input.
    """
    n = graph.n
    succ = np.full(n, -1, dtype=np.int64)
    lens = np.diff(graph.indptr)
    nonempty = np.nonzero(lens > 0)[0]
    if len(nonempty) == 0:
        return MaximalGraph(succ)
    # Empty rows hold no entries, so the concatenation of nonempty rows
    # is the whole data array and reduceat segments line up with it.
    starts = graph.indptr[nonempty]
    row_max = np.maximum.reduceat(graph.data, starts)
    per_entry_max = np.repeat(row_max, lens[nonempty])
    # Entries below the row max become sentinel n, so the reduce picks
    # the smallest index among maximal entries (indices sorted per row).
    candidates = np.where(graph.data == per_entry_max, graph.indices, n)
    succ[nonempty] = np.minimum.reduceat(candidates, starts)
    return MaximalGraph(succ)


@dataclass(frozen=True)
class Condensation:
    """Factor graph of the maximal graph by strongly connected components.

    Components are single cycles or single vertices; ids are dense and
    ordered by smallest member vertex.  ``scc_successor`` is -1 for
    final components (cycles and isolated vertices), which are exactly
    the components without an outgoing factor edge.
    """

    scc_of: np.ndarray
    n_sccs: int
    scc_successor: np.ndarray

    @property
    def is_final(self) -> np.ndarray:
        return self.scc_successor == -1

    def members(self) -> list[np.ndarray]:
        order = np.argsort(self.scc_of, kind="stable")
        bounds = np.searchsorted(self.scc_of[order], np.arange(self.n_sccs + 1))
        return [order[bounds[i]:bounds[i + 1]] for i in range(self.n_sccs)]


def condense(mgraph: MaximalGraph) -> Condensation:
    """Contract each cycle of the functional graph to one factor vertex.

    With out-degree at most one, every nontrivial strongly connected
    component is a cycle, found by walking successor chains and marking
    the portion of the path that closes on itself.
    """
    succ = mgraph.successor
    n = len(succ)
    rep = np.arange(n, dtype=np.int64)
    state = np.zeros(n, dtype=np.int8)  # 0 new, 1 on current path, 2 done
    path_pos = np.full(n, -1, dtype=np.int64)
    for start in range(n):
        if state[start] != 0:
            continue
        path = []
        v = start
        while v != -1 and state[v] == 0:
            state[v] = 1
            path_pos[v] = len(path)
            path.append(v)
            v = succ[v]
        if v != -1 and state[v] == 1:
            cycle = path[path_pos[v]:]
            rep_v = min(cycle)
            for u in cycle:
                rep[u] = rep_v
        for u in path:
            state[u] = 2
            path_pos[u] = -1

    component_of = canonical_labels(rep)
    n_sccs = int(component_of.max()) + 1 if n else 0

    scc_successor = np.full(n_sccs, -1, dtype=np.int64)
    has_succ = succ >= 0
    src_scc = component_of[has_succ]
    dst_scc = component_of[succ[has_succ]]
    external = src_scc != dst_scc
    scc_successor[src_scc[external]] = dst_scc[external]
    return Condensation(component_of, n_sccs, scc_successor)


def base_partition(cond: Condensation) -> Partition:
    """Group vertices by the final component their chain drains into.

    Cluster ids are ordered by smallest member vertex.  A chain that
    fails to terminate would mean the factor graph has a cycle, which
    the construction rules out; it is still guarded as an internal
    error.
    """
    k = cond.n_sccs
    sink = np.full(k, -1, dtype=np.int64)
    for s in range(k):
        if sink[s] != -1:
            continue
        chain = []
        cur = s
        steps = 0
        while sink[cur] == -1 and cond.scc_successor[cur] != -1:
            chain.append(cur)
            cur = int(cond.scc_successor[cur])
            steps += 1
            if steps > k:
                raise RuntimeError("cycle in condensation; invariant violated")
        target = sink[cur] if sink[cur] != -1 else cur
        sink[cur] = target
        for c in chain:
            sink[c] = target
    labels = canonical_labels(sink[cond.scc_of])
    return Partition.from_labels(labels)


def eqrank_partition(graph: SimilarityGraph) -> Partition:
    """Maximal-subgraph clustering in one call."""
    return base_partition(condense(maximal_subgraph(graph)))


def cluster_oracle(graph: SimilarityGraph) -> Partition:
    """Independent route to the same partition via weak components.

    Builds the heaviest-neighbor graph and unions each vertex with its
    successor; connected components of that undirected view are the
    clusters.  Used to cross-check the condensation pipeline.
    """
    succ = maximal_subgraph(graph).successor
    parent = list(range(len(succ)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x, y in enumerate(succ):
        if y >= 0:
            ra, rb = find(x), find(int(y))
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = np.fromiter((find(x) for x in range(len(succ))), dtype=np.int64, count=len(succ))
    return Partition.from_labels(canonical_labels(roots))
