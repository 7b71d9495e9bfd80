"""Stage timings for the full pipeline on a synthetic corpus.

Generates a community-structured corpus (default 30k papers, ~350k
edges, 6 snapshots), then times ingestion, per-snapshot clustering, and
the dynamics comparison.  Pass --backend python to time the fallback
path; the default times whichever backend the installation selected.

Usage: python3 benchmarks/bench_pipeline.py [--papers 30000]
       [--edges 350000] [--snapshots 6] [--backend auto|python|cython]
"""

import argparse
import os
import sys
import time


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--papers", type=int, default=30000)
    parser.add_argument("--edges", type=int, default=350000)
    parser.add_argument("--snapshots", type=int, default=6)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--backend", default="auto",
                        choices=("auto", "python", "cython"))
    args = parser.parse_args()

    if args.backend != "auto":
        os.environ["EQRANK_BACKEND"] = args.backend
    # import after the env var so the backend choice takes effect
    from eqrank._kernels import BACKEND
    from eqrank.corpus import ingest
    from eqrank.pipeline import build_pairs, compare_series, run_snapshot
    from eqrank.quality import synthesize_benchmark_corpus

    print(f"backend: {BACKEND}")
    t0 = time.perf_counter()
    papers, edges, cutoffs = synthesize_benchmark_corpus(
        args.papers, args.edges, args.snapshots, seed=args.seed
    )
    t1 = time.perf_counter()
    print(f"synthesize   {t1 - t0:7.2f} s   ({len(papers)} papers, {len(edges)} edges)")

    store = ingest(papers, edges)
    t2 = time.perf_counter()
    print(f"ingest       {t2 - t1:7.2f} s")

    results = []
    for cutoff in cutoffs:
        s0 = time.perf_counter()
        res = run_snapshot(store, cutoff)
        s1 = time.perf_counter()
        results.append(res)
        print(
            f"cluster {cutoff} {s1 - s0:7.2f} s   "
            f"(n={res.snapshot.n_vertices}, themes={res.partition.n_clusters}, "
            f"sweeps={res.refined.iterations})"
        )

    t3 = time.perf_counter()
    reports = compare_series(build_pairs(results), cuts=(0, 40))
    t4 = time.perf_counter()
    print(f"dynamics     {t4 - t3:7.2f} s   ({len(reports)} pairs)")
    print(f"total        {t4 - t0:7.2f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
