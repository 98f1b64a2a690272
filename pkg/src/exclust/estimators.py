"""Scikit-learn style estimators wrapping the functional API.

The estimators fit on a single time series: a 1-d array (optionally with a
``segments`` label array), a list of 1-d arrays, or a SegmentedSeries.  After
``fit`` the learned quantities carry the usual trailing underscore.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .bootstrap import BootstrapConfig
from .estimation import cluster_size_distribution, extremogram, pattern_distribution
from .series import SegmentedSeries, ThresholdSpec, resolve_threshold


def as_segmented_series(X, segments=None) -> SegmentedSeries:
    """Coerce estimator input into a SegmentedSeries.

    ``X`` may be a SegmentedSeries, a list of 1-d arrays (one per segment) or
    a single 1-d array; a ``segments`` array of per-observation labels splits
    a 1-d input at changes of the label (consecutive grouping).
    """
    if isinstance(X, SegmentedSeries):
        if segments is not None:
            raise ValueError("segments cannot be combined with a SegmentedSeries")
        return X
    if isinstance(X, (list, tuple)) and len(X) > 0 and np.ndim(X[0]) == 1:
        return SegmentedSeries([np.asarray(seg, dtype=float) for seg in X])
    values = check_array(
        X, ensure_2d=False, dtype=float, ensure_all_finite=True
    ).ravel()
    if segments is None:
        return SegmentedSeries([values])
    labels = np.asarray(segments)
    if labels.shape[0] != values.shape[0]:
        raise ValueError("segments must have one label per observation")
    change = np.flatnonzero(labels[1:] != labels[:-1]) + 1
    parts = np.split(values, change)
    bounds = np.concatenate(([0], change))
    return SegmentedSeries(parts, [str(labels[b]) for b in bounds])


class _ThresholdEstimator(BaseEstimator):
    """Shared threshold handling for the exceedance-cluster estimators."""

    def __init__(self, threshold=0.95, threshold_kind="quantile"):
        self.threshold = threshold
        self.threshold_kind = threshold_kind

    def _resolve(self, X, segments):
        series = as_segmented_series(X, segments)
        spec = ThresholdSpec(self.threshold_kind, self.threshold)
        return series, resolve_threshold(series, spec)

    def _bootstrap_config(self):
        if not getattr(self, "n_replicates", 0):
            return None
        seed = self.random_state if self.random_state is not None else 0
        return BootstrapConfig(
            n_replicates=self.n_replicates,
            block=self.block,
            seed=int(seed),
            ci_level=self.ci_level,
        )


class ClusterSizeEstimator(_ThresholdEstimator):
    """Empirical cluster-size distribution of threshold exceedances.

    Parameters
    ----------
    threshold : float
        Quantile level in (0,1) or an absolute threshold, depending on
        ``threshold_kind``.
    threshold_kind : {"quantile", "absolute"}
    l_max : int
        Sizes above l_max fall into an overflow atom.
    n_replicates : int
        Bootstrap replicates for confidence intervals; 0 disables them.
    block : "segments" or int
        Bootstrap block specification.
    ci_level : float
    random_state : int or None
        Seed of the bootstrap multiplier streams.

    Attributes
    ----------
    threshold_ : float
        Resolved absolute threshold.
    support_ : list
        Sizes 1..l_max plus the overflow label.
    probs_, counts_ : ndarray
    ci_lower_, ci_upper_ : ndarray or None
    n_clusters_ : int
    estimate_ : DistributionEstimate
    """

    def __init__(
        self,
        threshold=0.95,
        threshold_kind="quantile",
        l_max=8,
        n_replicates=0,
        block="segments",
        ci_level=0.95,
        random_state=None,
    ):
        super().__init__(threshold, threshold_kind)
        self.l_max = l_max
        self.n_replicates = n_replicates
        self.block = block
        self.ci_level = ci_level
        self.random_state = random_state

    def fit(self, X, y=None, segments=None):
        series, u = self._resolve(X, segments)
        est = cluster_size_distribution(
            series, u, self.l_max, bootstrap=self._bootstrap_config()
        )
        self.threshold_ = u
        self.estimate_ = est
        self.support_ = est.support
        self.probs_ = est.probs
        self.counts_ = est.counts
        self.ci_lower_ = est.ci_lo
        self.ci_upper_ = est.ci_hi
        self.n_clusters_ = est.denominator_count
        return self


class PatternDistributionEstimator(_ThresholdEstimator):
    """Distribution of ordinal patterns within clusters of a fixed size.

    Attributes after fit: ``patterns_`` (all length! patterns), ``probs_``,
    ``counts_``, ``ci_lower_``/``ci_upper_`` and ``n_clusters_`` (clusters of
    exactly ``pattern_length``).
    """

    def __init__(
        self,
        pattern_length=3,
        threshold=0.95,
        threshold_kind="quantile",
        n_replicates=0,
        block="segments",
        ci_level=0.95,
        random_state=None,
    ):
        super().__init__(threshold, threshold_kind)
        self.pattern_length = pattern_length
        self.n_replicates = n_replicates
        self.block = block
        self.ci_level = ci_level
        self.random_state = random_state

    def fit(self, X, y=None, segments=None):
        series, u = self._resolve(X, segments)
        est = pattern_distribution(
            series, u, self.pattern_length, bootstrap=self._bootstrap_config()
        )
        self.threshold_ = u
        self.estimate_ = est
        self.patterns_ = est.support
        self.probs_ = est.probs
        self.counts_ = est.counts
        self.ci_lower_ = est.ci_lo
        self.ci_upper_ = est.ci_hi
        self.n_clusters_ = est.denominator_count
        return self


class ExtremogramEstimator(_ThresholdEstimator):
    """Empirical extremogram rho(h) = P(X_h > u | X_0 > u) for h = 0..h_max."""

    def __init__(self, h_max=40, threshold=0.95, threshold_kind="quantile"):
        super().__init__(threshold, threshold_kind)
        self.h_max = h_max

    def fit(self, X, y=None, segments=None):
        series, u = self._resolve(X, segments)
        self.threshold_ = u
        self.rho_ = extremogram(series, u, self.h_max)
        self.n_exceedances_ = int(sum((seg > u).sum() for seg in series.segments))
        return self

    def lags(self):
        check_is_fitted(self, "rho_")
        return np.arange(self.rho_.size)
