import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hbrclust.baselines import (matched_accuracy, oracle_centroids,
                                spherical_kmeans)
from hbrclust.embedding import spectral_embed
from hbrclust.errors import InputError
from hbrclust.graph import LaplacianKind, Partition, laplacian

from conftest import block_graph


class TestSphericalKmeans:
    def test_antipodal_clusters_separate_exactly(self):
        rng = np.random.default_rng(0)
        a = np.array([1.0, 0.2]) + 0.01 * rng.standard_normal((20, 2))
        b = -np.array([1.0, 0.2]) + 0.01 * rng.standard_normal((20, 2))
        rows = np.vstack([a, b])
        truth = Partition(labels=np.repeat([0, 1], 20), m=2)
        pred = spherical_kmeans(rows, 2, seed=1, restarts=3)
        assert matched_accuracy(pred, truth).accuracy == 1.0

    def test_single_cluster(self):
        rows = np.random.default_rng(1).standard_normal((10, 2))
        pred = spherical_kmeans(rows, 1, seed=0)
        assert set(pred.labels) == {0}

    def test_deterministic_given_seed(self):
        rows = np.random.default_rng(2).standard_normal((40, 3))
        a = spherical_kmeans(rows, 3, seed=7, restarts=2)
        b = spherical_kmeans(rows, 3, seed=7, restarts=2)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_zero_rows_assigned_to_cluster_zero(self):
        rows = np.vstack([np.zeros(2), np.eye(2), -np.eye(2)])
        pred = spherical_kmeans(rows, 2, seed=0)
        assert pred.labels[0] == 0

    def test_too_few_rows(self):
        with pytest.raises(InputError):
            spherical_kmeans(np.ones((2, 2)), 3, seed=0)


class TestOracleCentroids:
    def test_clean_embedding_reproduces_truth(self, three_block):
        g, truth = three_block
        emb = spectral_embed(laplacian(g, LaplacianKind.UNNORMALIZED), 3)
        pred = oracle_centroids(emb, truth)
        assert matched_accuracy(pred, truth).accuracy == 1.0

    def test_overlapping_clouds_beat_majority(self):
        rng = np.random.default_rng(3)
        a = np.array([1.0, 0.0]) + 0.6 * rng.standard_normal((300, 2))
        b = np.array([0.0, 1.0]) + 0.6 * rng.standard_normal((200, 2))
        rows = np.vstack([a, b])
        truth = Partition(labels=np.repeat([0, 1], [300, 200]), m=2)
        acc = matched_accuracy(oracle_centroids(rows, truth), truth).accuracy
        assert acc < 1.0
        assert acc >= 300 / 500

    def test_empty_class_rejected(self):
        rows = np.eye(3)
        truth = Partition(labels=np.array([0, 0, 1]), m=3)
        with pytest.raises(InputError):
            oracle_centroids(rows, truth)


class TestMatchedAccuracy:
    def test_equal_partitions(self):
        p = Partition(labels=np.array([0, 1, 2, 1]), m=3)
        assert matched_accuracy(p, p).accuracy == 1.0

    def test_label_permutation_invariance(self):
        truth = Partition(labels=np.array([0, 0, 1, 1, 2, 2]), m=3)
        pred = Partition(labels=np.array([2, 2, 0, 0, 1, 1]), m=3)
        report = matched_accuracy(pred, truth)
        assert report.accuracy == 1.0
        assert report.matching[2] == 0

    def test_hand_enumerated_example(self):
        # confusion [[1,0],[1,2]]: identity matching scores 3, swap scores 1
        truth = Partition(labels=np.array([0, 0, 1, 1]), m=2)
        pred = Partition(labels=np.array([0, 1, 1, 1]), m=2)
        assert matched_accuracy(pred, truth).accuracy == 0.75

    def test_padding_different_cluster_counts(self):
        truth = Partition(labels=np.array([0, 1, 2]), m=3)
        pred = Partition(labels=np.array([0, 0, 1]), m=2)
        report = matched_accuracy(pred, truth)
        assert report.confusion.shape == (3, 3)
        assert report.accuracy == pytest.approx(2 / 3)

    def test_constant_predictor_scores_largest_class(self):
        truth = Partition(labels=np.array([0, 0, 0, 1, 2]), m=3)
        pred = Partition(labels=np.zeros(5, dtype=int), m=3)
        assert matched_accuracy(pred, truth).accuracy == pytest.approx(3 / 5)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(min_value=0, max_value=100_000))
    def test_matches_brute_force_permutation_search(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, 7))
        n = int(rng.integers(m, 30))
        truth = Partition(labels=rng.integers(0, m, n), m=m)
        pred = Partition(labels=rng.integers(0, m, n), m=m)
        report = matched_accuracy(pred, truth)
        confusion = np.zeros((m, m))
        np.add.at(confusion, (pred.labels, truth.labels), 1)
        best = max(
            sum(confusion[i, perm[i]] for i in range(m))
            for perm in itertools.permutations(range(m))
        )
        assert report.accuracy == pytest.approx(best / n)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=100_000))
    def test_invariant_to_renaming_predictions(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, 6))
        n = int(rng.integers(m, 40))
        truth = Partition(labels=rng.integers(0, m, n), m=m)
        pred_labels = rng.integers(0, m, n)
        perm = rng.permutation(m)
        a = matched_accuracy(Partition(labels=pred_labels, m=m), truth)
        b = matched_accuracy(Partition(labels=perm[pred_labels], m=m), truth)
        assert a.accuracy == b.accuracy
