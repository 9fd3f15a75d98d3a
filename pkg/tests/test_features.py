import numpy as np
import pytest

from paraflow import features, probes, synth
from paraflow.ingest import apply_standardizer, fit_standardizer
from oracles import brute_acf, brute_rolling


class TestRollingStats:
    def test_constant_series(self):
        out = features.rolling_stats(np.array([5.0, 5.0, 5.0, 5.0]), 2)
        assert np.all(out.mean == 5.0)
        assert np.all(out.std == 0.0)
        assert np.all(out.max == 5.0)
        assert np.all(out.min == 5.0)
        assert np.all(out.diff == 0.0)
        assert np.all(out.cv == 0.0)  # zero variance: cv = 0/5 = 0

    def test_zero_series_cv_epsilon_branch(self):
        out = features.rolling_stats(np.zeros(3), 2)
        assert np.all(out.cv == 0.0)

    def test_hand_computed_window(self):
        out = features.rolling_stats(np.array([1.0, 2.0, 3.0, 4.0, 5.0]), 3)
        # window at i=2 covers {2,3,4}
        assert out.mean[2] == 3.0
        assert out.max[2] == 4.0
        assert out.min[2] == 2.0
        assert abs(out.std[2] - np.sqrt(2.0 / 3.0)) < 1e-15

    def test_truncation_at_left_edge_even_window(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal(40)
        out = features.rolling_stats(x, 10)
        # at i=0 with w=10 the truncated window is indices 0..5
        window = x[0:6]
        assert out.max[0] == window.max()
        assert out.min[0] == window.min()
        acc = 0.0
        for v in window:
            acc += v
        assert out.mean[0] == acc / 6.0

    def test_matches_brute_force_exactly(self):
        rng = np.random.default_rng(12)
        x = rng.standard_normal(200)
        for w in (10, 30, 100):
            ours = features.rolling_stats(x, w)
            ref = brute_rolling(x, w)
            for got, want in zip(ours.as_columns(), ref):
                assert np.array_equal(got, want)

    def test_min_mean_max_ordering(self):
        rng = np.random.default_rng(13)
        for trial in range(10):
            x = rng.standard_normal(150) * rng.uniform(0.1, 10)
            out = features.rolling_stats(x, int(rng.integers(2, 40)))
            assert np.all(out.min <= out.mean)
            assert np.all(out.mean <= out.max)
            assert np.all(out.std >= 0.0)
            assert np.all(out.cv >= 0.0)

    def test_diff_is_lagged_mean_difference(self):
        rng = np.random.default_rng(14)
        x = rng.standard_normal(60)
        out = features.rolling_stats(x, 5)
        assert out.diff[0] == 0.0
        assert np.array_equal(out.diff[1:], out.mean[1:] - out.mean[:-1])

    def test_window_too_small(self):
        with pytest.raises(ValueError):
            features.rolling_stats(np.arange(10.0), 1)


def _standardized(matrix):
    return apply_standardizer(matrix, fit_standardizer(matrix))


class TestTemporalFeatures:
    def test_108_features_with_default_config(self):
        ds = synth.gen_ar1(150, 8, 0.5, seed=1)
        std = _standardized(ds.matrix)
        model = probes.fit_pca(std, 8)
        fm = features.temporal_features(std, model)
        assert fm.n_features == 108
        assert fm.paradigm == "temporal"
        assert len(set(fm.feature_names)) == 108
        assert np.isfinite(fm.matrix).all()

    def test_feature_names_are_deterministic_and_ordered(self):
        ds = synth.gen_ar1(120, 6, 0.0, seed=2)
        std = _standardized(ds.matrix)
        model = probes.fit_pca(std, 6)
        fm = features.temporal_features(std, model)
        assert fm.feature_names[0] == "w010_l2norm_mean"
        assert fm.feature_names[5] == "w010_l2norm_cv"
        assert fm.feature_names[6] == "w010_pc1_mean"
        assert fm.feature_names[36] == "w030_l2norm_mean"
        assert fm.feature_names[-1] == "w100_pc5_cv"

    def test_count_formula_for_other_window_sets(self):
        ds = synth.gen_ar1(100, 6, 0.0, seed=3)
        std = _standardized(ds.matrix)
        model = probes.fit_pca(std, 6)
        for windows in ((4,), (4, 8), (4, 8, 16, 32)):
            fm = features.temporal_features(std, model, windows)
            assert fm.n_features == len(windows) * 6 * 6

    def test_constant_input_gives_all_zero_features(self):
        # a constant matrix standardizes to all zeros; every base signal
        # is then constant zero and every statistic vanishes
        constant = np.full((60, 6), 3.25)
        std = _standardized(constant)
        assert np.all(std == 0.0)
        basis = probes.fit_pca(
            np.random.default_rng(4).standard_normal((60, 6)), 6).basis
        model = probes.PcaModel(
            mean=np.zeros(6), basis=basis,
            explained_variance_ratio=np.full(6, 1 / 6),
            total_components_available=6,
        )
        fm = features.temporal_features(std, model, windows=(4, 8))
        assert np.all(fm.matrix == 0.0)

    def test_rolling_mean_inherits_autocorrelation(self):
        ds = synth.gen_ar1(5000, 6, 0.9, seed=5)
        std = _standardized(ds.matrix)
        model = probes.fit_pca(std, 6)
        fm = features.temporal_features(std, model, windows=(10,))
        col = fm.feature_names.index("w010_pc1_mean")
        lag1 = brute_acf(fm.matrix[:, col], 1)[1]
        assert lag1 > 0.8

    def test_needs_more_rows_than_largest_window(self):
        ds = synth.gen_ar1(90, 6, 0.0, seed=6)
        std = _standardized(ds.matrix)
        model = probes.fit_pca(std, 6)
        with pytest.raises(ValueError, match="too small"):
            features.temporal_features(std, model, windows=(10, 100))

    def test_needs_five_components(self):
        ds = synth.gen_ar1(150, 3, 0.0, seed=7)
        std = _standardized(ds.matrix)
        model = probes.fit_pca(std, 3)
        with pytest.raises(ValueError, match="5 principal components"):
            features.temporal_features(std, model)

    def test_white_noise_features_bounded(self):
        ds = synth.gen_ar1(400, 6, 0.0, seed=8)
        std = _standardized(ds.matrix)
        model = probes.fit_pca(std, 6)
        fm = features.temporal_features(std, model)
        assert np.isfinite(fm.matrix).all()
        assert np.abs(fm.matrix).max() < 1e6  # no epsilon blow-ups


class TestStructuralFeatures:
    def test_projection_shape_and_names(self):
        ds = synth.gen_lowrank(200, 15, 3, 0.05, seed=9)
        std = _standardized(ds.matrix)
        model = probes.fit_pca(std, 10)
        fm = features.structural_features(std, model)
        assert fm.matrix.shape == (200, 10)
        assert fm.paradigm == "structural"
        assert fm.feature_names == tuple(f"pc{j}" for j in range(1, 11))

    def test_rank_one_concentrates_variance(self):
        ds = synth.gen_lowrank(300, 12, 1, 0.0, seed=10)
        std = ds.matrix - ds.matrix.mean(axis=0)
        model = probes.fit_pca(std, 5)
        fm = features.structural_features(std, model)
        variances = fm.matrix.var(axis=0)
        assert variances[0] / variances.sum() >= 0.99

    def test_projection_covariance_is_diagonal(self):
        rng = np.random.default_rng(15)
        m = rng.standard_normal((500, 8)) @ rng.standard_normal((8, 8))
        std = _standardized(m)
        model = probes.fit_pca(std, 8)
        fm = features.structural_features(std, model)
        centered = fm.matrix - fm.matrix.mean(axis=0)
        cov = centered.T @ centered / len(centered)
        off = cov - np.diag(np.diag(cov))
        assert np.abs(off).max() < 1e-6

    def test_narrow_input_clamps_dimensions(self):
        # p < 10: the model is fit at d = p and the projection has p columns
        ds = synth.gen_ar1(100, 4, 0.0, seed=16)
        std = _standardized(ds.matrix)
        model = probes.fit_pca(std, 4)
        fm = features.structural_features(std, model)
        assert fm.n_features == 4
        assert fm.provenance["components"] == 4

    def test_dimension_mismatch(self):
        model = probes.fit_pca(
            np.random.default_rng(17).standard_normal((50, 6)), 4)
        with pytest.raises(ValueError):
            features.structural_features(np.ones((10, 5)), model)
