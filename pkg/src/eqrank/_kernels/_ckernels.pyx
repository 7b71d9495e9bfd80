# cython: language_level=3
"""Compiled kernel backend.

Mirrors ``_pykernels`` exactly: same signatures, same tie-breaking,
and the same floating-point accumulation order, so results are
bit-identical whichever backend is active.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport qsort

cnp.import_array()

NAME = "cython"


cdef int _cmp_int64(const void* a, const void* b) noexcept nogil:
    cdef cnp.int64_t x = (<const cnp.int64_t*> a)[0]
    cdef cnp.int64_t y = (<const cnp.int64_t*> b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


def pair_counts(cnp.int64_t[::1] back_indptr, cnp.int64_t[::1] back_indices,
                cnp.int64_t[::1] fwd_indptr, cnp.int64_t[::1] fwd_indices,
                Py_ssize_t n):
    """Count two-step paths z -> x, z -> y for every vertex pair.

    ``back`` holds, per vertex x, the z with an edge into x; ``fwd``
    holds, per z, the vertices it points at.  The result is the sparse
    symmetric count matrix in CSR form with the diagonal removed.
    """
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_indptr = np.zeros(n + 1, dtype=np.int64)
    cdef Py_ssize_t cap = 4 * n + 1024
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_indices = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_data = np.empty(cap, dtype=np.int64)

    # Per-row scratch: counts[y] is valid only while stamp[y] == x.
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] stamp = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] touched = np.empty(n, dtype=np.int64)

    cdef cnp.int64_t[::1] counts_v = counts
    cdef cnp.int64_t[::1] stamp_v = stamp
    cdef cnp.int64_t[::1] touched_v = touched
    cdef cnp.int64_t[::1] ind_v = out_indices
    cdef cnp.int64_t[::1] dat_v = out_data

    cdef Py_ssize_t x, k, j, i, nt, pos, z, y, need
    pos = 0
    for x in range(n):
        nt = 0
        for k in range(back_indptr[x], back_indptr[x + 1]):
            z = back_indices[k]
            for j in range(fwd_indptr[z], fwd_indptr[z + 1]):
                y = fwd_indices[j]
                if stamp_v[y] != x:
                    stamp_v[y] = x
                    counts_v[y] = 1
                    touched_v[nt] = y
                    nt += 1
                else:
                    counts_v[y] += 1
        if nt == 0:
            out_indptr[x + 1] = pos
            continue
        qsort(&touched_v[0], nt, sizeof(cnp.int64_t), _cmp_int64)
        need = pos + nt
        if need > cap:
            while cap < need:
                cap *= 2
            out_indices = _grow(out_indices, pos, cap)
            out_data = _grow(out_data, pos, cap)
            ind_v = out_indices
            dat_v = out_data
        for i in range(nt):
            y = touched_v[i]
            if y == x:
                continue
            ind_v[pos] = y
            dat_v[pos] = counts_v[y]
            pos += 1
        out_indptr[x + 1] = pos

    return out_indptr, out_indices[:pos].copy(), out_data[:pos].copy()


cdef cnp.ndarray[cnp.int64_t, ndim=1] _grow(cnp.ndarray[cnp.int64_t, ndim=1] arr,
                                            Py_ssize_t used, Py_ssize_t cap):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(cap, dtype=np.int64)
    out[:used] = arr[:used]
    return out


def label_step(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
               cnp.float64_t[::1] data, cnp.int64_t[::1] labels,
               Py_ssize_t n_labels):
    """One synchronous relabeling sweep.

    Every vertex moves to the cluster holding the largest share of its
    similarity weight; ties prefer the vertex's current cluster, then
    the smallest cluster id.  Vertices with no weighted neighbours keep
    their label.  Returns the new labels (which may leave some cluster
    ids unused) and a boolean mask of vertices that moved.
    """
    cdef Py_ssize_t n = labels.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] new_labels = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] changed = np.zeros(n, dtype=np.uint8)

    cdef cnp.ndarray[cnp.float64_t, ndim=1] acc = np.zeros(n_labels, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] stamp = np.full(n_labels, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] touched = np.empty(n_labels, dtype=np.int64)

    cdef cnp.float64_t[::1] acc_v = acc
    cdef cnp.int64_t[::1] stamp_v = stamp
    cdef cnp.int64_t[::1] touched_v = touched

    cdef Py_ssize_t x, k, i, nt
    cdef cnp.int64_t lab, cur, best_lab, new
    cdef cnp.float64_t val, best_val
    for x in range(n):
        cur = labels[x]
        if indptr[x] == indptr[x + 1]:
            new_labels[x] = cur
            continue
        nt = 0
        for k in range(indptr[x], indptr[x + 1]):
            lab = labels[indices[k]]
            if stamp_v[lab] != x:
                stamp_v[lab] = x
                acc_v[lab] = data[k]
                touched_v[nt] = lab
                nt += 1
            else:
                acc_v[lab] += data[k]
        best_val = -1.0
        best_lab = -1
        for i in range(nt):
            lab = touched_v[i]
            val = acc_v[lab]
            if val > best_val or (val == best_val and lab < best_lab):
                best_val = val
                best_lab = lab
        if stamp_v[cur] == x and acc_v[cur] == best_val:
            new = cur
        else:
            new = best_lab
        new_labels[x] = new
        if new != cur:
            changed[x] = 1
    return new_labels, changed.view(np.bool_)
