import math

import numpy as np
import pytest

from exclust import (
    NoDataError,
    OrdinalPattern,
    SegmentedSeries,
    WindowEvent,
    cluster_patterns,
    cluster_size_distribution,
    detect_clusters,
    extremogram,
    p_hat,
    pattern_distribution,
    pattern_rank,
    ratio_estimate,
)
from tests.conftest import random_series

HAND = SegmentedSeries([np.array([0.0, 5.0, 6.0, 0.0, 7.0, 0.0])])


class TestWindowEvent:
    def test_span_and_t(self):
        e = WindowEvent.cluster_of_size(3)
        assert e.t == 3
        assert e.span == 5

    def test_offset_zero_must_exceed(self):
        with pytest.raises(ValueError):
            WindowEvent(("le", "le"))

    def test_padding(self):
        e = WindowEvent.cluster_start().padded_to(2)
        assert e.constraints == ("le", "gt", "any", "any")
        with pytest.raises(ValueError):
            WindowEvent.cluster_of_size(3).padded_to(1)

    def test_pattern_block_must_fit(self):
        with pytest.raises(ValueError):
            WindowEvent(
                ("le", "gt", "le"), pattern=OrdinalPattern((0, 1)), pattern_offset=1
            )


class TestPHat:
    def test_interior_exceedance_count(self):
        value, count, n = p_hat(HAND, 4.0, WindowEvent.exceedance())
        # windows anchored at indices 1..5: exceedances at 1, 2, 4
        assert (count, n) == (3, 5)
        assert value == 3 / 5

    def test_single_interior_exceedance(self):
        series = SegmentedSeries([np.array([0.0, 5.0, 0.0])])
        value, count, n = p_hat(series, 4.0, WindowEvent.exceedance())
        assert (count, n) == (1, 2)

    def test_impossible_event_is_zero(self):
        value, count, n = p_hat(HAND, 4.0, WindowEvent.impossible())
        assert value == 0.0
        assert count == 0

    def test_matches_exceedance_proportion(self, rng):
        series = random_series(rng)
        u = float(np.quantile(series.pooled(), 0.8))
        value, count, n = p_hat(series, u, WindowEvent.exceedance())
        manual = sum(int(np.count_nonzero(seg[1:] > u)) for seg in series.segments)
        windows = sum(seg.size - 1 for seg in series.segments)
        assert (count, n) == (manual, windows)

    def test_all_segments_too_short(self):
        series = SegmentedSeries([np.array([1.0, 2.0])])
        with pytest.raises(ValueError):
            p_hat(series, 0.5, WindowEvent.cluster_of_size(3))

    def test_monotone_in_event(self, rng):
        # relaxing constraints can only add matches
        for _ in range(20):
            series = random_series(rng, n_segments=2)
            u = float(np.quantile(series.pooled(), 0.7))
            size = int(rng.integers(1, 4))
            tight = WindowEvent.cluster_of_size(size)
            relaxed = WindowEvent.cluster_of_size_at_least(size)
            assert (
                p_hat(series, u, tight).count <= p_hat(series, u, relaxed).count
            )


class TestRatioEstimate:
    def test_identical_events_give_one(self, rng):
        series = random_series(rng)
        u = float(np.quantile(series.pooled(), 0.8))
        a = WindowEvent.cluster_start()
        assert ratio_estimate(series, u, a, a) == 1.0

    def test_subset_ratio_in_unit_interval(self, rng):
        for _ in range(10):
            series = random_series(rng)
            u = float(np.quantile(series.pooled(), 0.8))
            r = ratio_estimate(
                series, u, WindowEvent.cluster_of_size(1), WindowEvent.cluster_start()
            )
            assert 0.0 <= r <= 1.0

    def test_hand_example(self):
        r = ratio_estimate(
            HAND, 4.0, WindowEvent.cluster_of_size(1), WindowEvent.cluster_start()
        )
        assert r == 0.5

    def test_zero_denominator_raises(self):
        with pytest.raises(NoDataError):
            ratio_estimate(
                HAND, 100.0, WindowEvent.cluster_of_size(1), WindowEvent.cluster_start()
            )

    def test_scale_invariance(self, rng):
        for c in (0.5, 3.0, 1e6):
            series = random_series(rng)
            u = float(np.quantile(series.pooled(), 0.85))
            scaled = SegmentedSeries([c * seg for seg in series.segments])
            a1, a0 = WindowEvent.cluster_of_size(2), WindowEvent.cluster_start()
            assert ratio_estimate(series, u, a1, a0) == ratio_estimate(
                scaled, c * u, a1, a0
            )


class TestClusterSizeDistribution:
    def test_hand_example(self):
        est = cluster_size_distribution(HAND, 4.0, 3)
        assert est.support == [1, 2, 3, ">3"]
        np.testing.assert_array_equal(est.probs, [0.5, 0.5, 0.0, 0.0])
        assert est.denominator_count == 2

    def test_no_clusters_raises(self):
        with pytest.raises(NoDataError):
            cluster_size_distribution(HAND, 100.0, 3)

    def test_overflow_atom(self):
        series = SegmentedSeries([np.array([0.0, 5.0, 6.0, 7.0, 8.0, 0.0, 9.0, 0.0])])
        est = cluster_size_distribution(series, 4.0, 2)
        assert est.support == [1, 2, ">2"]
        np.testing.assert_array_equal(est.counts, [1, 0, 1])

    def test_exact_identity_with_detection(self, rng):
        # window-count path vs run-scan path, bitwise equal probabilities
        for _ in range(30):
            series = random_series(rng, n_segments=int(rng.integers(1, 4)))
            q = float(rng.uniform(0.5, 0.98))
            u = float(np.quantile(series.pooled(), q))
            l_max = int(rng.integers(1, 7))
            try:
                est = cluster_size_distribution(series, u, l_max)
            except NoDataError:
                assert detect_clusters(series, u).n_clusters == 0
                continue
            cs = detect_clusters(series, u)
            counts, overflow = cs.size_counts(l_max)
            np.testing.assert_array_equal(est.counts[:-1], counts)
            assert est.counts[-1] == overflow
            assert est.denominator_count == cs.n_clusters
            expected = np.concatenate([counts, [overflow]]) / cs.n_clusters
            assert np.array_equal(est.probs, expected)

    def test_normalization(self, rng):
        series = random_series(rng)
        u = float(np.quantile(series.pooled(), 0.8))
        est = cluster_size_distribution(series, u, 4)
        assert est.probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_agrees_with_p_hat_counts(self, rng):
        series = random_series(rng)
        u = float(np.quantile(series.pooled(), 0.8))
        est = cluster_size_distribution(series, u, 3)
        for l in (1, 2, 3):
            assert est.counts[l - 1] == p_hat(series, u, WindowEvent.cluster_of_size(l)).count


class TestPatternDistribution:
    def test_length_one_is_degenerate(self):
        est = pattern_distribution(HAND, 4.0, 1)
        assert len(est.support) == 1
        np.testing.assert_array_equal(est.probs, [1.0])

    def test_hand_example_length_two(self):
        series = SegmentedSeries([np.array([0.0, 5.0, 6.0, 0.0, 7.0, 3.0, 0.0])])
        est = pattern_distribution(series, 2.0, 2)
        # clusters (5,6) -> (1,0) and (7,3) -> (0,1)
        assert [p.perm for p in est.support] == [(0, 1), (1, 0)]
        np.testing.assert_array_equal(est.probs, [0.5, 0.5])

    def test_zero_atoms_reported(self):
        est = pattern_distribution(HAND, 4.0, 2)
        assert len(est.support) == 2
        assert est.probs.sum() == 1.0
        assert (est.probs == 0.0).any()

    def test_no_clusters_of_size_raises(self):
        with pytest.raises(NoDataError):
            pattern_distribution(HAND, 4.0, 3)

    def test_matches_run_scan_patterns(self, rng):
        for _ in range(20):
            series = random_series(rng, n_segments=2)
            u = float(np.quantile(series.pooled(), 0.6))
            length = int(rng.integers(2, 4))
            cs = detect_clusters(series, u)
            pats = cluster_patterns(cs, length)
            if not pats:
                with pytest.raises(NoDataError):
                    pattern_distribution(series, u, length)
                continue
            est = pattern_distribution(series, u, length)
            expected = np.zeros(math.factorial(length), dtype=np.int64)
            for p in pats:
                expected[pattern_rank(p)] += 1
            np.testing.assert_array_equal(est.counts, expected)
            assert est.denominator_count == len(pats)

    def test_agrees_with_pattern_event_counts(self, rng):
        series = random_series(rng, n_segments=2)
        u = float(np.quantile(series.pooled(), 0.6))
        est = pattern_distribution(series, u, 2)
        for i, pattern in enumerate(est.support):
            event = WindowEvent.cluster_with_pattern(pattern)
            assert p_hat(series, u, event).count == est.counts[i]

    def test_length_bounds(self):
        with pytest.raises(ValueError):
            pattern_distribution(HAND, 4.0, 0)
        with pytest.raises(ValueError):
            pattern_distribution(HAND, 4.0, 9)


class TestExtremogram:
    def test_lag_zero_is_one(self):
        rho = extremogram(HAND, 4.0, 2)
        assert rho[0] == 1.0

    def test_hand_counts(self):
        # exceedances at 1,2,4; lag-1 pairs: (1,2); lag-2 pairs: (2,4)
        rho = extremogram(HAND, 4.0, 2)
        assert rho[1] == pytest.approx(1 / 3)
        assert rho[2] == pytest.approx(1 / 3)

    def test_pairs_do_not_cross_segments(self):
        series = SegmentedSeries([np.array([0.0, 9.0]), np.array([9.0, 0.0])])
        rho = extremogram(series, 4.0, 1)
        assert rho[1] == 0.0

    def test_range_and_normalization(self, rng):
        series = random_series(rng)
        u = float(np.quantile(series.pooled(), 0.8))
        rho = extremogram(series, u, 10)
        assert np.all(rho >= 0.0) and np.all(rho <= 1.0)

    def test_independent_noise_decorrelates(self, rng):
        series = SegmentedSeries([rng.standard_normal(200_000)])
        u = float(np.quantile(series.pooled(), 0.99))
        rho = extremogram(series, u, 3)
        assert np.all(rho[1:] < 0.05)

    def test_no_exceedances_raises(self):
        with pytest.raises(NoDataError):
            extremogram(HAND, 100.0, 2)

    def test_lag_longer_than_segments_rejected(self):
        with pytest.raises(ValueError):
            extremogram(HAND, 4.0, 10)


class TestDistributionEstimateJson:
    def test_size_support_json(self):
        payload = cluster_size_distribution(HAND, 4.0, 2).to_json()
        assert payload["support"] == [1, 2, ">2"]
        assert payload["method"] == "empirical"
        assert payload["denominator_count"] == 2
        assert all(isinstance(c, int) for c in payload["counts"])

    def test_pattern_support_json(self):
        payload = pattern_distribution(HAND, 4.0, 2).to_json()
        assert payload["support"] == [[0, 1], [1, 0]]
