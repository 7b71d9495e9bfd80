"""Pure-Python kernel backend.

Mirrors the compiled backend in ``_ckernels.pyx`` exactly: same
signatures, same tie-breaking, and the same floating-point accumulation
order, so results are bit-identical whichever backend is active.
"""

import numpy as np
import scipy.sparse as sp

NAME = "python"


def pair_counts(back_indptr, back_indices, fwd_indptr, fwd_indices, n):
    """Count two-step paths z -> x, z -> y for every vertex pair.

    ``back`` holds, per vertex x, the z with an edge into x; ``fwd``
    holds, per z, the vertices it points at.  The result is the sparse
    symmetric count matrix in CSR form with the diagonal removed.
    Counts are integers, so any summation order gives the same result
    and a sparse matrix product is safe here.
    """
    back = sp.csr_matrix(
        (np.ones(len(back_indices), dtype=np.int64), back_indices, back_indptr),
        shape=(n, n),
    )
    fwd = sp.csr_matrix(
        (np.ones(len(fwd_indices), dtype=np.int64), fwd_indices, fwd_indptr),
        shape=(n, n),
    )
    out = back @ fwd
    out.setdiag(0)
    out.eliminate_zeros()
    out.sort_indices()
    return (
        out.indptr.astype(np.int64),
        out.indices.astype(np.int64),
        out.data.astype(np.int64),
    )


def label_step(indptr, indices, data, labels, n_labels):
    """One synchronous relabeling sweep.

    Every vertex moves to the cluster holding the largest share of its
    similarity weight; ties prefer the vertex's current cluster, then
    the smallest cluster id.  Vertices with no weighted neighbours keep
    their label.  Returns the new labels (which may leave some cluster
    ids unused) and a boolean mask of vertices that moved.
    """
    n = len(labels)
    new_labels = np.empty(n, dtype=np.int64)
    changed = np.zeros(n, dtype=bool)
    for x in range(n):
        start, end = indptr[x], indptr[x + 1]
        cur = labels[x]
        if start == end:
            new_labels[x] = cur
            continue
        acc: dict[int, float] = {}
        for k in range(start, end):
            lab = labels[indices[k]]
            if lab in acc:
                acc[lab] += data[k]
            else:
                acc[lab] = data[k]
        best_val = -1.0
        best_lab = -1
        for lab, val in acc.items():
            if val > best_val or (val == best_val and lab < best_lab):
                best_val = val
                best_lab = lab
        if acc.get(cur) == best_val:
            new = cur
        else:
            new = best_lab
        new_labels[x] = new
        if new != cur:
            changed[x] = True
    return new_labels, changed
