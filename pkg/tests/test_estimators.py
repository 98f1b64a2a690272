import numpy as np
import pytest
from sklearn.base import clone

from exclust import (
    ClusterSizeEstimator,
    ExtremogramEstimator,
    PatternDistributionEstimator,
    SegmentedSeries,
    as_segmented_series,
    cluster_size_distribution,
    extremogram,
    pattern_distribution,
    simulate_mar,
)


@pytest.fixture
def series_1d():
    return simulate_mar(0.5, 5000, seed=13)


class TestInputCoercion:
    def test_plain_array(self, series_1d):
        s = as_segmented_series(series_1d)
        assert s.n_segments == 1
        assert s.n_observations == 5000

    def test_list_of_segments(self):
        s = as_segmented_series([np.ones(3), np.ones(4)])
        assert [seg.size for seg in s.segments] == [3, 4]

    def test_consecutive_label_grouping(self):
        s = as_segmented_series(
            np.arange(5.0), segments=np.array(["A", "A", "B", "B", "A"])
        )
        assert [seg.size for seg in s.segments] == [2, 2, 1]
        assert s.labels == ["A", "B", "A"]

    def test_passthrough(self):
        original = SegmentedSeries([np.ones(3)])
        assert as_segmented_series(original) is original
        with pytest.raises(ValueError):
            as_segmented_series(original, segments=np.array([1, 1, 2]))

    def test_label_length_mismatch(self):
        with pytest.raises(ValueError):
            as_segmented_series(np.ones(4), segments=np.array([1, 2]))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            as_segmented_series(np.array([1.0, np.nan]))


class TestClusterSizeEstimator:
    def test_matches_functional_api(self, series_1d):
        est = ClusterSizeEstimator(threshold=0.95, l_max=4).fit(series_1d)
        series = as_segmented_series(series_1d)
        expected = cluster_size_distribution(series, est.threshold_, 4)
        np.testing.assert_array_equal(est.probs_, expected.probs)
        assert est.support_ == expected.support
        assert est.n_clusters_ == expected.denominator_count
        assert est.ci_lower_ is None

    def test_bootstrap_attributes(self, series_1d):
        est = ClusterSizeEstimator(
            threshold=0.9, l_max=3, n_replicates=200, block=500, random_state=1
        ).fit(series_1d)
        assert est.ci_lower_ is not None
        assert np.all(est.ci_lower_ <= est.probs_)
        assert np.all(est.probs_ <= est.ci_upper_)

    def test_absolute_threshold(self):
        x = np.array([0.0, 5.0, 6.0, 0.0, 7.0, 0.0])
        est = ClusterSizeEstimator(threshold=4.0, threshold_kind="absolute", l_max=2)
        est.fit(x)
        assert est.threshold_ == 4.0
        np.testing.assert_array_equal(est.probs_, [0.5, 0.5, 0.0])

    def test_segments_keyword(self):
        x = np.array([0.0, 9.0, 0.0, 0.0, 9.0, 0.0])
        labels = np.array([0, 0, 0, 1, 1, 1])
        est = ClusterSizeEstimator(threshold=4.0, threshold_kind="absolute", l_max=2)
        est.fit(x, segments=labels)
        assert est.n_clusters_ == 2

    def test_sklearn_protocol(self):
        est = ClusterSizeEstimator(threshold=0.9, l_max=5, n_replicates=100)
        params = est.get_params()
        assert params["l_max"] == 5
        cloned = clone(est)
        assert cloned.get_params() == params
        est.set_params(l_max=3)
        assert est.l_max == 3


class TestPatternDistributionEstimator:
    def test_matches_functional_api(self, series_1d):
        est = PatternDistributionEstimator(pattern_length=2, threshold=0.9).fit(series_1d)
        series = as_segmented_series(series_1d)
        expected = pattern_distribution(series, est.threshold_, 2)
        np.testing.assert_array_equal(est.probs_, expected.probs)
        assert [p.perm for p in est.patterns_] == [(0, 1), (1, 0)]

    def test_clone(self):
        est = PatternDistributionEstimator(pattern_length=3)
        assert clone(est).get_params()["pattern_length"] == 3


class TestExtremogramEstimator:
    def test_matches_functional_api(self, series_1d):
        est = ExtremogramEstimator(h_max=10, threshold=0.9).fit(series_1d)
        series = as_segmented_series(series_1d)
        np.testing.assert_array_equal(est.rho_, extremogram(series, est.threshold_, 10))
        assert est.rho_[0] == 1.0
        np.testing.assert_array_equal(est.lags(), np.arange(11))

    def test_unfitted_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            ExtremogramEstimator().lags()
