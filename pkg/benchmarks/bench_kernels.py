"""Compare the compiled and pure-Python kernel backends.

Times the two hot kernels (two-hop pair counting and the relabeling
sweep) on random inputs of growing size and prints the speedup.  Both
backends produce bit-identical results; this script checks that while
timing.

Usage: python3 benchmarks/bench_kernels.py [--sizes 1000,5000,20000]
"""

import argparse
import time

import numpy as np
import scipy.sparse as sp

from eqrank._kernels import available_backends, get_backend


def random_digraph(rng, n, avg_out):
    density = min(avg_out / n, 0.5)
    rows = []
    cols = []
    for i in range(n):
        k = rng.poisson(avg_out)
        if k == 0:
            continue
        targets = rng.integers(0, n, size=min(k, n))
        targets = targets[targets != i]
        rows.append(np.full(len(targets), i))
        cols.append(targets)
    mat = sp.csr_matrix(
        (np.ones(sum(len(r) for r in rows)), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )
    mat.sum_duplicates()
    mat.data[:] = 1.0
    _ = density
    return mat


def time_call(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_size(n, rng):
    fwd = random_digraph(rng, n, avg_out=12)
    back = fwd.T.tocsr()
    bi = back.indptr.astype(np.int64)
    bx = back.indices.astype(np.int64)
    fi = fwd.indptr.astype(np.int64)
    fx = fwd.indices.astype(np.int64)

    sym = (fwd + fwd.T).tocsr()
    sym.sum_duplicates()
    weights = sym.data.astype(np.float64)
    labels = rng.integers(0, max(n // 200, 2), n).astype(np.int64)
    labels = np.unique(labels, return_inverse=True)[1].astype(np.int64)
    n_labels = int(labels.max()) + 1

    rows = [f"n={n} (edges={fwd.nnz})"]
    results = {}
    for name in available_backends():
        backend = get_backend(name)
        t_pairs, r_pairs = time_call(backend.pair_counts, bi, bx, fi, fx, n)
        t_step, r_step = time_call(
            backend.label_step,
            sym.indptr.astype(np.int64),
            sym.indices.astype(np.int64),
            weights,
            labels,
            n_labels,
        )
        results[name] = (r_pairs, r_step)
        rows.append(f"  {name:<7} pair_counts {t_pairs * 1e3:9.2f} ms"
                    f"   label_step {t_step * 1e3:9.2f} ms")
    if len(results) == 2:
        a, b = results["cython"], results["python"]
        same = all(np.array_equal(x, y) for x, y in zip(a[0], b[0]))
        same &= np.array_equal(a[1][0], b[1][0]) and np.array_equal(a[1][1], b[1][1])
        rows.append(f"  outputs bit-identical: {same}")
    return "\n".join(rows)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1000,5000,20000")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)
    print("available backends:", ", ".join(available_backends()))
    for size in args.sizes.split(","):
        print(bench_size(int(size), rng))


if __name__ == "__main__":
    main()
