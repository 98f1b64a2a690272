"""Detection of threshold-exceedance clusters.

A cluster at threshold u is a maximal run of consecutive observations
strictly above u that has a neighbor <= u on both sides within its segment.
Runs touching a segment boundary cannot be delimited and are only counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .patterns import OrdinalPattern, pattern_of
from .series import SegmentedSeries


@dataclass(eq=False)
class Cluster:
    """One detected exceedance cluster."""

    segment: int
    start: int
    size: int
    values: np.ndarray

    def to_json(self) -> dict:
        return {
            "segment": self.segment,
            "start": self.start,
            "size": self.size,
            "values": [float(v) for v in self.values],
        }


@dataclass
class ClusterSet:
    """All clusters of a series at one threshold, in series order."""

    clusters: list[Cluster]
    threshold: float
    n_exceedances_total: int
    n_boundary_truncated: int

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def sizes(self) -> np.ndarray:
        return np.array([c.size for c in self.clusters], dtype=np.int64)

    def size_counts(self, l_max: int) -> tuple[np.ndarray, int]:
        """Counts of clusters of size 1..l_max plus the count of larger ones."""
        sizes = self.sizes()
        counts = np.array(
            [int(np.count_nonzero(sizes == l)) for l in range(1, l_max + 1)],
            dtype=np.int64,
        )
        overflow = int(np.count_nonzero(sizes > l_max))
        return counts, overflow

    def to_json(self) -> dict:
        return {
            "threshold": float(self.threshold),
            "clusters": [c.to_json() for c in self.clusters],
            "n_exceedances_total": self.n_exceedances_total,
            "n_boundary_truncated": self.n_boundary_truncated,
        }


def detect_clusters(series: SegmentedSeries, u: float) -> ClusterSet:
    """Find every exceedance cluster of the series at threshold u.

    Parameters
    ----------
    series : SegmentedSeries
    u : float
        Threshold; exceedance means value > u (strict), ties count as
        non-exceedances.

    Returns
    -------
    ClusterSet
        Clusters in series order.  Runs of exceedances that touch a segment
        boundary are excluded and reported in ``n_boundary_truncated``.
    """
    if not np.isfinite(u):
        raise ValueError("threshold must be finite")
    clusters: list[Cluster] = []
    n_exceed = 0
    n_truncated = 0
    for si, seg in enumerate(series.segments):
        exceed = seg > u
        n_exceed += int(np.count_nonzero(exceed))
        padded = np.concatenate(([False], exceed, [False])).astype(np.int8)
        deltas = np.diff(padded)
        starts = np.flatnonzero(deltas == 1)
        ends = np.flatnonzero(deltas == -1)  # exclusive
        for s, e in zip(starts, ends):
            if s > 0 and e < seg.size:
                clusters.append(Cluster(si, int(s), int(e - s), seg[s:e].copy()))
            else:
                n_truncated += 1
    return ClusterSet(clusters, float(u), n_exceed, n_truncated)


def cluster_patterns(cluster_set: ClusterSet, length: int) -> list[OrdinalPattern]:
    """Ordinal patterns of all clusters of exactly the given size, in series order."""
    if length < 1:
        raise ValueError("pattern length must be >= 1")
    return [
        pattern_of(c.values) for c in cluster_set.clusters if c.size == length
    ]
