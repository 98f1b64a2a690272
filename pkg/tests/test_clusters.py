import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exclust import (
    SegmentedSeries,
    ThresholdSpec,
    cluster_patterns,
    detect_clusters,
    resolve_threshold,
)


def scan_runs(segment, u):
    """Independent pure-python run scan: (start, size, touches_boundary)."""
    runs = []
    i = 0
    n = len(segment)
    while i < n:
        if segment[i] > u:
            j = i
            while j < n and segment[j] > u:
                j += 1
            runs.append((i, j - i, i == 0 or j == n))
            i = j
        else:
            i += 1
    return runs


class TestResolveThreshold:
    def test_quantile_order_statistic(self):
        series = SegmentedSeries([np.arange(1.0, 101.0)])
        assert resolve_threshold(series, ThresholdSpec.quantile(0.95)) == 95.0

    def test_absolute_passthrough(self):
        series = SegmentedSeries([np.array([1.0, 2.0])])
        assert resolve_threshold(series, ThresholdSpec.absolute(4.2)) == 4.2

    def test_single_observation(self):
        series = SegmentedSeries([np.array([7.0])])
        assert resolve_threshold(series, ThresholdSpec.quantile(0.5)) == 7.0

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.2, 1.5])
    def test_quantile_level_must_be_interior(self, q):
        with pytest.raises(ValueError):
            ThresholdSpec.quantile(q)

    def test_matches_exact_rational_oracle(self, rng):
        # ceil(N q)-th order statistic computed in exact arithmetic
        for _ in range(20):
            n = int(rng.integers(5, 200))
            values = rng.standard_normal(n)
            q = float(rng.uniform(0.01, 0.99))
            series = SegmentedSeries([values])
            k = math.ceil(Fraction(q).limit_denominator(10**12) * n)
            expected = np.sort(values)[k - 1]
            assert resolve_threshold(series, ThresholdSpec.quantile(q)) == expected

    def test_pools_across_segments(self):
        series = SegmentedSeries([np.arange(1.0, 51.0), np.arange(51.0, 101.0)])
        assert resolve_threshold(series, ThresholdSpec.quantile(0.95)) == 95.0


class TestDetectClusters:
    def test_hand_example(self):
        series = SegmentedSeries([np.array([0.0, 5.0, 6.0, 0.0, 7.0, 0.0])])
        cs = detect_clusters(series, 4.0)
        assert [(c.start, c.size) for c in cs.clusters] == [(1, 2), (4, 1)]
        assert cs.n_exceedances_total == 3
        assert cs.n_boundary_truncated == 0
        np.testing.assert_array_equal(cs.clusters[0].values, [5.0, 6.0])

    def test_no_exceedances(self):
        cs = detect_clusters(SegmentedSeries([np.array([1.0, 2.0, 3.0])]), 10.0)
        assert cs.n_clusters == 0
        assert cs.n_exceedances_total == 0

    def test_left_truncated_run_reported(self):
        cs = detect_clusters(SegmentedSeries([np.array([9.0, 1.0, 2.0])]), 4.0)
        assert cs.n_clusters == 0
        assert cs.n_boundary_truncated == 1

    def test_right_truncated_run_reported(self):
        cs = detect_clusters(SegmentedSeries([np.array([1.0, 2.0, 9.0])]), 4.0)
        assert cs.n_clusters == 0
        assert cs.n_boundary_truncated == 1

    def test_tie_at_threshold_is_non_exceedance(self):
        cs = detect_clusters(SegmentedSeries([np.array([5.0, 5.0, 5.0])]), 5.0)
        assert cs.n_exceedances_total == 0

    def test_segments_are_walls(self):
        joined = detect_clusters(SegmentedSeries([np.array([0.0, 5.0, 5.0, 0.0])]), 4.0)
        split = detect_clusters(
            SegmentedSeries([np.array([0.0, 5.0]), np.array([5.0, 0.0])]), 4.0
        )
        assert joined.n_clusters == 1
        assert split.n_clusters == 0
        assert split.n_boundary_truncated == 2

    def test_non_finite_threshold_rejected(self):
        with pytest.raises(ValueError):
            detect_clusters(SegmentedSeries([np.array([1.0])]), np.nan)

    def test_json_shape(self):
        series = SegmentedSeries([np.array([0.0, 5.0, 0.0])])
        payload = detect_clusters(series, 4.0).to_json()
        assert set(payload) == {
            "threshold",
            "clusters",
            "n_exceedances_total",
            "n_boundary_truncated",
        }
        assert payload["clusters"][0] == {
            "segment": 0,
            "start": 1,
            "size": 1,
            "values": [5.0],
        }


@st.composite
def series_and_threshold(draw):
    n_seg = draw(st.integers(1, 3))
    segs = [
        draw(
            st.lists(st.integers(0, 9).map(float), min_size=1, max_size=40).map(
                np.array
            )
        )
        for _ in range(n_seg)
    ]
    u = draw(st.integers(0, 9).map(float))
    return SegmentedSeries(segs), u


class TestClusterProperties:
    @given(series_and_threshold())
    @settings(max_examples=200, deadline=None)
    def test_partition_and_flanking(self, case):
        series, u = case
        cs = detect_clusters(series, u)
        # independent scan agrees and the exceedances partition
        expected = []
        truncated_exceedances = 0
        n_truncated = 0
        for si, seg in enumerate(series.segments):
            for start, size, boundary in scan_runs(seg, u):
                if boundary:
                    truncated_exceedances += size
                    n_truncated += 1
                else:
                    expected.append((si, start, size))
        assert [(c.segment, c.start, c.size) for c in cs.clusters] == expected
        assert cs.n_boundary_truncated == n_truncated
        total_sizes = sum(c.size for c in cs.clusters)
        assert total_sizes + truncated_exceedances == cs.n_exceedances_total
        # flanking invariants straight off the output
        for c in cs.clusters:
            seg = series.segments[c.segment]
            assert np.all(c.values > u)
            assert seg[c.start - 1] <= u
            assert seg[c.start + c.size] <= u

    @given(series_and_threshold())
    @settings(max_examples=100, deadline=None)
    def test_threshold_monotonicity(self, case):
        series, u = case
        lower = detect_clusters(series, u)
        higher = detect_clusters(series, u + 1.0)
        assert higher.n_exceedances_total <= lower.n_exceedances_total

    @given(series_and_threshold())
    @settings(max_examples=100, deadline=None)
    def test_monotone_invariance(self, case):
        series, u = case
        base = detect_clusters(series, u)
        transformed = SegmentedSeries([np.exp(seg) for seg in series.segments])
        other = detect_clusters(transformed, math.exp(u))
        assert [(c.segment, c.start, c.size) for c in base.clusters] == [
            (c.segment, c.start, c.size) for c in other.clusters
        ]
        assert base.n_exceedances_total == other.n_exceedances_total
        assert base.n_boundary_truncated == other.n_boundary_truncated


class TestClusterPatterns:
    def test_peak_last_middle(self):
        series = SegmentedSeries([np.array([0.0, 5.0, 9.0, 6.0, 0.0])])
        cs = detect_clusters(series, 4.0)
        pats = cluster_patterns(cs, 3)
        assert [p.perm for p in pats] == [(1, 2, 0)]

    def test_two_values(self):
        series = SegmentedSeries([np.array([0.0, 5.0, 6.0, 0.0])])
        pats = cluster_patterns(detect_clusters(series, 4.0), 2)
        assert [p.perm for p in pats] == [(1, 0)]

    def test_no_matching_size(self):
        series = SegmentedSeries([np.array([0.0, 5.0, 6.0, 0.0, 7.0, 0.0])])
        assert cluster_patterns(detect_clusters(series, 4.0), 3) == []

    def test_invalid_length(self):
        series = SegmentedSeries([np.array([0.0, 5.0, 0.0])])
        with pytest.raises(ValueError):
            cluster_patterns(detect_clusters(series, 4.0), 0)
