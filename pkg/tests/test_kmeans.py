import numpy as np
import pytest

from paraflow import detect, synth
from oracles import brute_inertia


class TestKMeansFit:
    def test_two_points_two_clusters(self):
        x = np.array([[0.0, 0.0], [5.0, 5.0]])
        model = detect.kmeans_fit(x, k=2, n_init=2, seed=0)
        assert model.inertia == 0.0
        got = {tuple(c) for c in model.centroids}
        assert got == {(0.0, 0.0), (5.0, 5.0)}

    def test_deterministic_under_seed(self):
        ds = synth.gen_two_clusters(400, 5, 6.0, 0.4, seed=1)
        a = detect.kmeans_fit(ds.matrix, k=2, seed=9)
        b = detect.kmeans_fit(ds.matrix, k=2, seed=9)
        assert np.array_equal(a.centroids, b.centroids)
        assert a.inertia == b.inertia

    def test_recovers_separated_centroids(self):
        ds, perm = synth.gen_two_clusters(
            2000, 4, 10.0, 0.5, seed=2, return_permutation=True)
        model = detect.kmeans_fit(ds.matrix, k=2, seed=3)
        # true means: origin and separation * unit direction; compare the
        # sorted-by-norm centroids against them
        norms = np.linalg.norm(model.centroids, axis=1)
        near, far = model.centroids[np.argsort(norms)]
        assert np.linalg.norm(near) < 0.2
        attack_mean = ds.matrix[ds.labels == 1].mean(axis=0)
        assert np.linalg.norm(far - attack_mean) < 0.2

    def test_inertia_non_increasing(self):
        ds = synth.gen_two_clusters(600, 6, 3.0, 0.3, seed=4)
        model = detect.kmeans_fit(ds.matrix, k=3, n_init=3, seed=5)
        history = model.inertia_history
        assert len(history) >= 2
        assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))

    def test_inertia_beats_random_assignments(self):
        ds = synth.gen_two_clusters(150, 4, 2.0, 0.4, seed=6)
        model = detect.kmeans_fit(ds.matrix, k=2, seed=7)
        rng = np.random.default_rng(8)
        for trial in range(1000):
            labels = rng.integers(0, 2, size=150)
            if labels.min() == labels.max():
                continue
            centroids = np.stack([
                ds.matrix[labels == c].mean(axis=0) for c in (0, 1)
            ])
            random_inertia = brute_inertia(ds.matrix, centroids, labels)
            assert model.inertia <= random_inertia + 1e-9

    def test_more_clusters_than_points_rejected(self):
        with pytest.raises(ValueError):
            detect.kmeans_fit(np.ones((3, 2)), k=4)

    def test_empty_cluster_reseeded_to_farthest_point(self):
        from paraflow.detect.kmeans import _lloyd
        rng = np.random.default_rng(20)
        x = rng.standard_normal((50, 2))
        x[0] = [30.0, 30.0]  # the farthest point
        # second centroid starts unreachable: every point assigns to the first
        start = np.array([[0.0, 0.0], [1e6, 1e6]])
        centroids, labels, inertia, _, _ = _lloyd(x, start, 50, 1e-4)
        assert np.unique(labels).size == 2
        # the dead centroid was reseeded onto the outlier
        dists_to_outlier = np.linalg.norm(centroids - x[0], axis=1)
        assert dists_to_outlier.min() < 1.0
        assert np.isfinite(inertia)

    def test_duplicated_points_stay_stable(self):
        x = np.vstack([np.tile([[0.0, 0.0]], (10, 1)),
                       np.tile([[5.0, 5.0]], (10, 1))])
        model = detect.kmeans_fit(x, k=3, n_init=3, seed=21)
        assert np.isfinite(model.centroids).all()
        assert model.inertia < 1e-9  # only two distinct locations

    def test_centroids_are_member_means(self):
        ds = synth.gen_two_clusters(500, 3, 8.0, 0.5, seed=9)
        model = detect.kmeans_fit(ds.matrix, k=2, seed=10)
        assignments = detect.kmeans_assignments(model, ds.matrix)
        for c in range(2):
            members = ds.matrix[assignments == c]
            assert np.abs(model.centroids[c] - members.mean(axis=0)).max() < 1e-6


class TestKMeansDetect:
    def test_majority_mapping(self):
        ds = synth.gen_two_clusters(1000, 5, 10.0, 0.35, seed=11)
        model = detect.kmeans_fit(ds.matrix, k=2, seed=12)
        result = detect.kmeans_detect(model, ds.matrix, ds.labels)
        assert result.predictions.sum() > 0
        # clusters are pure at 10 sigma: perfect agreement
        assert np.array_equal(result.predictions, ds.labels)
        assert model.cluster_to_label is not None

    def test_tie_maps_to_benign(self):
        x = np.array([[0.0], [0.1], [10.0], [10.1]])
        labels = np.array([1, 0, 0, 1])  # both clusters split 50/50
        model = detect.kmeans_fit(x, k=2, n_init=2, seed=13)
        result = detect.kmeans_detect(model, x, labels)
        assert result.predictions.tolist() == [0, 0, 0, 0]

    def test_pure_planted_clusters_give_perfect_f1(self):
        from paraflow.evaluate import confusion_metrics
        ds = synth.gen_two_clusters(800, 6, 12.0, 0.25, seed=14)
        model = detect.kmeans_fit(ds.matrix, k=2, seed=15)
        result = detect.kmeans_detect(model, ds.matrix, ds.labels)
        metrics = confusion_metrics(result.predictions, ds.labels)
        assert metrics.f1 == 1.0

    def test_scores_are_distance_to_own_centroid(self):
        ds = synth.gen_two_clusters(200, 3, 5.0, 0.5, seed=16)
        model = detect.kmeans_fit(ds.matrix, k=2, seed=17)
        result = detect.kmeans_detect(model, ds.matrix, ds.labels)
        assignments = detect.kmeans_assignments(model, ds.matrix)
        expected = np.linalg.norm(
            ds.matrix - model.centroids[assignments], axis=1)
        assert np.abs(result.scores - expected).max() < 1e-9

    def test_without_labels_emits_assignments(self):
        ds = synth.gen_two_clusters(100, 3, 5.0, 0.5, seed=18)
        model = detect.kmeans_fit(ds.matrix, k=2, seed=19)
        result = detect.kmeans_detect(model, ds.matrix)
        assignments = detect.kmeans_assignments(model, ds.matrix)
        assert np.array_equal(result.predictions, assignments)
