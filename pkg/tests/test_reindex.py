"""Refinement sweeps, convergence tracking, coalition violations."""

import numpy as np
import pytest

import oracles
from eqrank import _kernels
from eqrank.core import Partition, eqrank_partition
from eqrank.reindex import (
    ReindexConfig,
    closeness,
    proper_coalition_violations,
    reindex_step,
    reindex_to_limit,
    write_reindex_trace_csv,
)


def graph_of(dense):
    return oracles.dense_to_graph(np.asarray(dense, dtype=float))


def five_vertex_example():
    """T1={0,1,4}, T2={2,3}; vertex 4 is pulled toward T2.

    Internal anchor weights hold the two cores together; w(4,0)=1 and
    w(4,2)=2 make vertex 4's move the only change.
    """
    dense = np.zeros((5, 5))
    dense[0, 1] = dense[1, 0] = 5
    dense[2, 3] = dense[3, 2] = 5
    dense[4, 0] = dense[0, 4] = 1
    dense[4, 2] = dense[2, 4] = 2
    part = Partition.from_labels([0, 0, 1, 1, 0])
    return part, graph_of(dense)


def oscillator():
    """Two anchored pairs plus vertices 4, 5 that swap clusters forever.

    Each of 4 and 5 is pulled mostly by the other, so under synchronous
    updates they chase each other between the clusters without end.
    """
    dense = np.zeros((6, 6))
    dense[0, 1] = dense[1, 0] = 10
    dense[2, 3] = dense[3, 2] = 10
    dense[4, 5] = dense[5, 4] = 5
    dense[4, 0] = dense[0, 4] = 1
    dense[5, 2] = dense[2, 5] = 1
    part = Partition.from_labels([0, 0, 1, 1, 0, 1])
    return part, graph_of(dense)


class TestCloseness:
    def test_two_term_sum(self):
        dense = np.zeros((4, 4))
        dense[0, 1] = dense[1, 0] = 1
        dense[0, 3] = dense[3, 0] = 2
        assert closeness(0, np.array([1, 3]), graph_of(dense)) == 3.0

    def test_disjoint_cluster_scores_zero(self):
        dense = np.zeros((4, 4))
        dense[0, 1] = dense[1, 0] = 1
        assert closeness(0, np.array([2, 3]), graph_of(dense)) == 0.0

    def test_matches_brute_force(self, rng):
        for _ in range(20):
            dense = oracles.random_symmetric_dense(rng, 12, 0.4)
            g = graph_of(dense)
            members = np.nonzero(rng.random(12) < 0.5)[0]
            x = int(rng.integers(0, 12))
            assert closeness(x, members, g) == pytest.approx(
                float(dense[x, members].sum()), abs=1e-12
            )


class TestReindexStep:
    def test_vertex_moves_to_closer_cluster(self):
        part, g = five_vertex_example()
        stepped = reindex_step(part, g)
        assert stepped.labels.tolist() == [0, 0, 1, 1, 1]

    def test_fixed_vertex_keeps_label(self):
        part, g = five_vertex_example()
        stepped = reindex_step(part, g)
        assert reindex_step(stepped, g) == stepped

    def test_all_weights_zero_returns_partition_unchanged(self):
        part = Partition.from_labels([0, 1, 0])
        g = graph_of(np.zeros((3, 3)))
        assert reindex_step(part, g) == part

    def test_emptied_cluster_is_dropped_and_ids_remapped(self):
        # vertex 2 alone in cluster 1 moves to cluster 0's side
        dense = np.zeros((3, 3))
        dense[0, 1] = dense[1, 0] = 2
        dense[1, 2] = dense[2, 1] = 1
        part = Partition.from_labels([0, 0, 1])
        stepped = reindex_step(part, g := graph_of(dense))
        assert stepped.n_clusters == 1
        assert stepped.labels.tolist() == [0, 0, 0]

    def test_own_cluster_tie_is_kept(self):
        # vertex 2 sees weight 1 in both clusters; it stays put
        dense = np.zeros((5, 5))
        dense[0, 1] = dense[1, 0] = 5
        dense[3, 4] = dense[4, 3] = 5
        dense[2, 0] = dense[0, 2] = 1
        dense[2, 3] = dense[3, 2] = 1
        part = Partition.from_labels([0, 0, 0, 1, 1])
        assert reindex_step(part, graph_of(dense)).labels[2] == 0
        part_b = Partition.from_labels([0, 0, 1, 1, 1])
        assert reindex_step(part_b, graph_of(dense)).labels[2] == 1


class TestReindexToLimit:
    def test_fixed_point_input_converges_immediately(self):
        part, g = five_vertex_example()
        limit = reindex_to_limit(reindex_step(part, g), g)
        assert limit.iterations == 1
        assert limit.trace.tolist() == [0]
        assert limit.converged
        assert bool(limit.converged_mask.all())
        assert limit.converged_fraction == 1.0

    def test_five_vertex_example_converges_in_two_sweeps(self):
        part, g = five_vertex_example()
        limit = reindex_to_limit(part, g)
        assert limit.partition.labels.tolist() == [0, 0, 1, 1, 1]
        assert limit.iterations == 2
        assert limit.trace.tolist() == [1, 0]
        assert limit.reached_target

    def test_oscillator_runs_to_cap_and_excludes_both(self):
        part, g = oscillator()
        config = ReindexConfig(max_iterations=9)
        limit = reindex_to_limit(part, g, config)
        assert limit.iterations == 9
        assert not limit.converged
        assert np.all(limit.trace == 2)
        assert limit.converged_mask.tolist() == [True, True, True, True, False, False]
        assert limit.converged_fraction == pytest.approx(4 / 6)
        assert not limit.reached_target

    def test_oscillator_swaps_vertices_each_sweep(self):
        part, g = oscillator()
        one = reindex_step(part, g)
        assert one.labels.tolist() == [0, 0, 1, 1, 1, 0]
        two = reindex_step(one, g)
        assert two.labels.tolist() == part.labels.tolist()

    def test_capped_run_converged_set_is_fixed(self, rng):
        # even with a tiny cap, no vertex reported converged may move
        for _ in range(20):
            dense = oracles.random_symmetric_dense(rng, 14, 0.35, integer_weights=True)
            g = graph_of(dense)
            base = eqrank_partition(g)
            limit = reindex_to_limit(base, g, ReindexConfig(max_iterations=2))
            new_labels, changed = _kernels.label_step(
                g.indptr, g.indices, g.data, limit.partition.labels,
                limit.partition.n_clusters,
            )
            assert not np.any(changed & limit.converged_mask)

    def test_cluster_count_never_grows(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 16))
            dense = oracles.random_symmetric_dense(rng, n, 0.4)
            g = graph_of(dense)
            base = eqrank_partition(g)
            limit = reindex_to_limit(base, g)
            assert limit.partition.n_clusters <= base.n_clusters

    def test_cluster_origin_tracks_base_ids(self):
        part, g = five_vertex_example()
        limit = reindex_to_limit(part, g)
        # both clusters survive and keep their ids
        assert limit.cluster_origin.tolist() == [0, 1]
        dense = np.zeros((3, 3))
        dense[0, 1] = dense[1, 0] = 2
        dense[1, 2] = dense[2, 1] = 1
        merged = reindex_to_limit(
            Partition.from_labels([0, 0, 1]), graph_of(dense)
        )
        assert merged.partition.n_clusters == 1
        assert merged.cluster_origin.tolist() == [0]

    def test_deterministic(self, rng):
        dense = oracles.random_symmetric_dense(rng, 15, 0.4, integer_weights=True)
        g = graph_of(dense)
        base = eqrank_partition(g)
        a = reindex_to_limit(base, g)
        b = reindex_to_limit(base, g)
        assert a.partition == b.partition
        assert np.array_equal(a.trace, b.trace)
        assert np.array_equal(a.converged_mask, b.converged_mask)


class TestProperCoalitions:
    def test_example_violator(self):
        part, g = five_vertex_example()
        assert proper_coalition_violations(part, g).tolist() == [4]

    def test_limit_restricted_to_converged_set_is_clean(self):
        part, g = five_vertex_example()
        limit = reindex_to_limit(part, g)
        assert proper_coalition_violations(limit.partition, g).size == 0

    def test_single_cluster_has_no_violations(self, rng):
        dense = oracles.random_symmetric_dense(rng, 8, 0.5)
        g = graph_of(dense)
        part = Partition.from_labels([0] * 8)
        assert proper_coalition_violations(part, g).size == 0

    def test_violations_equal_the_vertices_a_sweep_would_move(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 15))
            dense = oracles.random_symmetric_dense(rng, n, 0.4, integer_weights=True)
            g = graph_of(dense)
            part = Partition.from_labels(np.unique(rng.integers(0, 3, n), return_inverse=True)[1])
            _, changed = _kernels.label_step(
                g.indptr, g.indices, g.data, part.labels, part.n_clusters
            )
            assert proper_coalition_violations(part, g).tolist() == np.nonzero(changed)[0].tolist()

    def test_oscillator_violators_are_the_oscillating_pair(self):
        part, g = oscillator()
        limit = reindex_to_limit(part, g, ReindexConfig(max_iterations=7))
        assert proper_coalition_violations(limit.partition, g).tolist() == [4, 5]


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_iterations": 0},
            {"target_converged_fraction": 0.0},
            {"target_converged_fraction": 1.5},
            {"stall_window": 0},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            ReindexConfig(**kwargs)

    def test_defaults(self):
        config = ReindexConfig()
        assert config.max_iterations == 50
        assert config.target_converged_fraction == 0.99
        assert config.stall_window == 1


def test_trace_csv_format(tmp_path):
    part, g = five_vertex_example()
    limit = reindex_to_limit(part, g)
    out = tmp_path / "trace.csv"
    write_reindex_trace_csv(limit, out)
    assert out.read_text() == (
        "iteration,reassigned_count,reassigned_fraction\n"
        "1,1,0.200000\n"
        "2,0,0.000000\n"
    )
