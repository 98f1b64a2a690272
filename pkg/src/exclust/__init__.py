"""Exceedance clusters of extremes in stationary time series.

Detects clusters of consecutive threshold exceedances, estimates the
distributions of cluster sizes and of ordinal patterns within clusters,
quantifies uncertainty via a multiplier block bootstrap or the asymptotic
covariance, and validates against exact simulators and tail-process oracles
for max-autoregressive, moving-maximum and Brown-Resnick models.
"""

from .bootstrap import (
    BootstrapConfig,
    BootstrapResult,
    bootstrap_ci,
    multiplier_ratio_ci,
    percentile_interval,
)
from .clusters import Cluster, ClusterSet, cluster_patterns, detect_clusters
from .errors import (
    CsvFormatError,
    DegenerateBootstrapError,
    FactorizationError,
    NoDataError,
)
from .estimation import (
    DistributionEstimate,
    PHat,
    cluster_size_distribution,
    extremogram,
    p_hat,
    pattern_distribution,
    ratio_estimate,
)
from .estimators import (
    ClusterSizeEstimator,
    ExtremogramEstimator,
    PatternDistributionEstimator,
    as_segmented_series,
)
from .events import WindowEvent
from .io import ingest_csv, write_series_csv
from .limits import (
    CovarianceResult,
    MixingDiagnostics,
    TailProcessSampler,
    asymptotic_covariance,
    asymptotic_halfwidths,
    cluster_size_event_family,
    default_h_trunc,
    extremal_coefficient,
    limit_cluster_size_mc,
    limit_pattern_mc,
    mar_limit_cluster_size,
    mixing_diagnostics,
    tail_process_sample,
)
from .patterns import OrdinalPattern, all_patterns, pattern_of, pattern_rank
from .series import SegmentedSeries, ThresholdSpec, resolve_threshold
from .simulate import (
    GaussianIncrementModel,
    ModelSpec,
    Variogram,
    frechet_ks,
    simulate_brown_resnick,
    simulate_brown_resnick_path,
    simulate_mar,
    simulate_moving_max,
    simulate_series,
)

__version__ = "0.1.0"

__all__ = [
    "BootstrapConfig",
    "BootstrapResult",
    "Cluster",
    "ClusterSet",
    "ClusterSizeEstimator",
    "CovarianceResult",
    "CsvFormatError",
    "DegenerateBootstrapError",
    "DistributionEstimate",
    "ExtremogramEstimator",
    "FactorizationError",
    "GaussianIncrementModel",
    "MixingDiagnostics",
    "ModelSpec",
    "NoDataError",
    "OrdinalPattern",
    "PHat",
    "PatternDistributionEstimator",
    "SegmentedSeries",
    "TailProcessSampler",
    "ThresholdSpec",
    "Variogram",
    "WindowEvent",
    "all_patterns",
    "as_segmented_series",
    "asymptotic_covariance",
    "asymptotic_halfwidths",
    "bootstrap_ci",
    "cluster_patterns",
    "cluster_size_distribution",
    "cluster_size_event_family",
    "default_h_trunc",
    "detect_clusters",
    "extremal_coefficient",
    "extremogram",
    "frechet_ks",
    "ingest_csv",
    "limit_cluster_size_mc",
    "limit_pattern_mc",
    "mar_limit_cluster_size",
    "mixing_diagnostics",
    "multiplier_ratio_ci",
    "p_hat",
    "pattern_distribution",
    "pattern_of",
    "pattern_rank",
    "percentile_interval",
    "ratio_estimate",
    "resolve_threshold",
    "simulate_brown_resnick",
    "simulate_brown_resnick_path",
    "simulate_mar",
    "simulate_moving_max",
    "simulate_series",
    "tail_process_sample",
    "write_series_csv",
]
