import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hbrclust.errors import DegenerateDegreeError, InputError
from hbrclust.graph import (LaplacianKind, Partition, SimilarityGraph,
                            connected_components, cut_costs,
                            gaussian_similarity, laplacian)
from hbrclust.linalg import sym_eig

from conftest import block_graph, random_graph


class TestGaussianSimilarity:
    def test_identical_points_have_unit_similarity(self):
        g = gaussian_similarity(np.zeros((2, 2)), alpha=1.0)
        assert g.adjacency[0, 1] == 1.0
        assert g.adjacency[0, 0] == 0.0

    def test_distance_two_quarter_alpha(self):
        pts = np.array([[0.0, 0.0], [2.0, 0.0]])
        g = gaussian_similarity(pts, alpha=0.25)
        assert g.adjacency[0, 1] == pytest.approx(math.exp(-1.0), abs=1e-15)

    def test_radius_cutoff_zeroes_far_pairs(self):
        pts = np.array([[0.0, 0.0], [2.0, 0.0], [0.5, 0.0]])
        g = gaussian_similarity(pts, alpha=0.25, radius=1.0)
        assert g.adjacency[0, 1] == 0.0
        assert g.adjacency[0, 2] > 0.0

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            gaussian_similarity(np.array([[0.0], [np.inf]]), alpha=1.0)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(0)
        g = gaussian_similarity(rng.standard_normal((40, 3)), alpha=0.7)
        assert np.array_equal(g.adjacency, g.adjacency.T)


class TestLaplacian:
    def test_single_edge(self):
        g = SimilarityGraph.from_adjacency(np.array([[0.0, 1.0], [1.0, 0.0]]))
        lap = laplacian(g, LaplacianKind.UNNORMALIZED)
        np.testing.assert_allclose(lap, [[1.0, -1.0], [-1.0, 1.0]])

    def test_block_diagonal_null_space_dimension(self):
        g, _ = block_graph((3, 4, 6), seed=2)
        lap = laplacian(g, LaplacianKind.UNNORMALIZED)
        values = sym_eig(lap).eigenvalues
        assert np.sum(np.abs(values) <= 1e-10) == 3

    @pytest.mark.parametrize("kind", [LaplacianKind.UNNORMALIZED,
                                      LaplacianKind.RANDOM_WALK])
    def test_row_sums_zero(self, kind):
        g = random_graph(25, seed=4, density=0.9)
        lap = laplacian(g, kind)
        assert np.abs(lap.sum(axis=1)).max() <= 1e-10

    def test_unnormalized_psd(self):
        for seed in range(5):
            g = random_graph(20, seed=seed, density=0.8)
            values = sym_eig(laplacian(g, LaplacianKind.UNNORMALIZED)).eigenvalues
            assert values.min() >= -1e-10

    def test_sym_is_symmetric_exactly(self):
        g = random_graph(30, seed=5, density=0.95)
        lap = laplacian(g, LaplacianKind.SYMMETRIC_NORMALIZED)
        assert np.array_equal(lap, lap.T)

    def test_isolated_vertex_rejected_for_normalized(self):
        a = np.zeros((3, 3))
        a[0, 1] = a[1, 0] = 1.0
        g = SimilarityGraph.from_adjacency(a)
        with pytest.raises(DegenerateDegreeError) as err:
            laplacian(g, LaplacianKind.SYMMETRIC_NORMALIZED)
        assert err.value.vertex == 2

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_quadratic_form_identity(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 15))
        g = random_graph(n, seed=seed, density=0.7)
        u = rng.standard_normal(n)
        lap = laplacian(g, LaplacianKind.UNNORMALIZED)
        direct = 0.5 * np.sum(
            g.adjacency * (u[:, None] - u[None, :]) ** 2
        )
        assert abs(u @ lap @ u - direct) <= 1e-9 * (1.0 + abs(direct))


class TestConnectedComponents:
    def test_counts_blocks(self):
        g, truth = block_graph((4, 3, 5), seed=1)
        comps = connected_components(g)
        assert comps.m == 3
        np.testing.assert_array_equal(comps.labels, truth.labels)


class TestCutCosts:
    def test_components_have_zero_cost(self):
        g, truth = block_graph((4, 5), seed=0)
        costs = cut_costs(g, truth)
        assert costs.cut == 0.0
        assert costs.ratio_cut == 0.0
        assert costs.ncut == 0.0

    def test_two_vertex_split_hand_computed(self):
        g = SimilarityGraph.from_adjacency(np.array([[0.0, 1.0], [1.0, 0.0]]))
        p = Partition(labels=np.array([0, 1]), m=2)
        costs = cut_costs(g, p)
        assert costs.cut == 2.0          # both directed boundary sums
        assert costs.ratio_cut == 2.0    # 1/1 + 1/1
        assert costs.ncut == 2.0         # degrees are 1 and 1

    def test_single_cluster_zero_cut(self):
        g = random_graph(10, seed=3)
        costs = cut_costs(g, Partition(labels=np.zeros(10, dtype=int), m=1))
        assert costs.cut == 0.0

    def test_empty_cluster_flagged_infinite(self):
        g = random_graph(6, seed=2)
        costs = cut_costs(g, Partition(labels=np.zeros(6, dtype=int), m=2))
        assert costs.has_empty_cluster
        assert math.isinf(costs.ratio_cut)
        assert math.isinf(costs.ncut)


class TestPartition:
    def test_rejects_out_of_range_labels(self):
        with pytest.raises(InputError):
            Partition(labels=np.array([0, 3]), m=2)

    def test_counts(self):
        p = Partition(labels=np.array([0, 1, 1, 2]), m=4)
        np.testing.assert_array_equal(p.counts(), [1, 2, 1, 0])
