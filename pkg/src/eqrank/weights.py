"""Similarity weights between papers of one snapshot.

Two papers are similar when they are cited together (co-citation) and
when they cite the same sources (bibliographic coupling).  The two
counts are blended into one symmetric weighted graph:

    w(x, y) = a * cocitation(x, y) + (1 - a) * bibcoupling(x, y)

with no self-similarity.  Weights are stored sparsely; absent pairs
have weight zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .corpus import Snapshot

DEFAULT_MIXING = 0.9


@dataclass
class SimilarityGraph:
    """Symmetric weighted graph in CSR form with an empty diagonal.

    All stored weights are positive with canonical (sorted, duplicate
    free) indices, so equal graphs have equal arrays.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    mixing: float | None = None

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def neighbors(self, x: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[x], self.indptr[x + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def weight(self, x: int, y: int) -> float:
        ind, dat = self.neighbors(x)
        pos = int(np.searchsorted(ind, y))
        if pos < len(ind) and ind[pos] == y:
            return float(dat[pos])
        return 0.0

    def total_weight(self) -> float:
        """Sum of w over unordered pairs (each pair stored twice)."""
        return float(self.data.sum()) / 2.0

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.data, self.indices, self.indptr), shape=(self.n, self.n)
        )

    @classmethod
    def from_csr(cls, mat: sp.csr_matrix, mixing: float | None = None) -> "SimilarityGraph":
        mat = mat.tocsr()
        mat.sum_duplicates()
        mat.eliminate_zeros()
        mat.sort_indices()
        return cls(
            n=mat.shape[0],
            indptr=mat.indptr.astype(np.int64),
            indices=mat.indices.astype(np.int64),
            data=mat.data.astype(np.float64),
            mixing=mixing,
        )


def cocitation(snapshot: Snapshot) -> sp.csr_matrix:
    """Count, per pair, the papers citing both.  Diagonal excluded."""
    indptr, indices, data = _kernels.pair_counts(
        snapshot.in_indptr,
        snapshot.in_indices,
        snapshot.out_indptr,
        snapshot.out_indices,
        snapshot.n_vertices,
    )
    n = snapshot.n_vertices
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def bibcoupling(snapshot: Snapshot) -> sp.csr_matrix:
    """Count, per pair, the sources both papers cite.  Diagonal excluded."""
    indptr, indices, data = _kernels.pair_counts(
        snapshot.out_indptr,
        snapshot.out_indices,
        snapshot.in_indptr,
        snapshot.in_indices,
        snapshot.n_vertices,
    )
    n = snapshot.n_vertices
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def combine(coc: sp.csr_matrix, bib: sp.csr_matrix, mixing: float = DEFAULT_MIXING) -> SimilarityGraph:
    """Blend the two count matrices with weight ``mixing`` on co-citation."""
    if not 0.0 <= mixing <= 1.0:
        raise ValueError(f"mixing must be in [0, 1], got {mixing}")
    if coc.shape != bib.shape:
        raise ValueError(f"shape mismatch: {coc.shape} vs {bib.shape}")
    blended = coc.astype(np.float64) * mixing + bib.astype(np.float64) * (1.0 - mixing)
    return SimilarityGraph.from_csr(blended.tocsr(), mixing=mixing)


def similarity_graph(snapshot: Snapshot, mixing: float = DEFAULT_MIXING) -> SimilarityGraph:
    """Build the blended similarity graph of one snapshot."""
    return combine(cocitation(snapshot), bibcoupling(snapshot), mixing)


def write_weights_tsv(graph: SimilarityGraph, snapshot: Snapshot, path: str | Path) -> None:
    """Export each unordered pair once as ``x <tab> y <tab> weight``.

    Vertex numbering follows paper-id order, so emitting the upper
    triangle row by row lists pairs with x < y lexicographically.
    Weights carry 12 significant digits.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for x in range(graph.n):
            ind, dat = graph.neighbors(x)
            keep = ind > x
            xid = snapshot.paper_id(x)
            for y, w in zip(ind[keep], dat[keep]):
                fh.write(f"{xid}\t{snapshot.paper_id(int(y))}\t{w:.12g}\n")
