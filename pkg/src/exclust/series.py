"""Segmented observation series and threshold specifications.

A series is split into segments that are treated as independent; no window,
cluster or lag pair ever crosses a segment boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class SegmentedSeries:
    """Real-valued observations partitioned into independent segments."""

    segments: list[np.ndarray]
    labels: list[str] | None = None

    def __post_init__(self):
        if len(self.segments) == 0:
            raise ValueError("series must contain at least one segment")
        segs = []
        for i, seg in enumerate(self.segments):
            arr = np.asarray(seg, dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError(f"segment {i} must be a non-empty 1-d vector")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"segment {i} contains non-finite values")
            segs.append(arr)
        self.segments = segs
        if self.labels is not None:
            self.labels = [str(lab) for lab in self.labels]
            if len(self.labels) != len(self.segments):
                raise ValueError("labels must match the number of segments")

    @classmethod
    def from_values(cls, values, label: str | None = None) -> "SegmentedSeries":
        """Wrap a single unsegmented vector."""
        return cls([np.asarray(values, dtype=float)],
                   [label] if label is not None else None)

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def n_observations(self) -> int:
        return int(sum(seg.size for seg in self.segments))

    def pooled(self) -> np.ndarray:
        """All observations concatenated in segment order."""
        return np.concatenate(self.segments)

    def label_of(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)


@dataclass(frozen=True)
class ThresholdSpec:
    """Either an absolute threshold or an empirical quantile level."""

    kind: str  # "absolute" | "quantile"
    value: float

    def __post_init__(self):
        if self.kind not in ("absolute", "quantile"):
            raise ValueError(f"unknown threshold kind {self.kind!r}")
        if not np.isfinite(self.value):
            raise ValueError("threshold value must be finite")
        if self.kind == "quantile" and not 0.0 < self.value < 1.0:
            raise ValueError(f"quantile level must lie strictly in (0,1), got {self.value}")

    @classmethod
    def absolute(cls, u: float) -> "ThresholdSpec":
        return cls("absolute", float(u))

    @classmethod
    def quantile(cls, q: float) -> "ThresholdSpec":
        return cls("quantile", float(q))

    def to_json(self) -> dict:
        return {"kind": self.kind, "value": float(self.value)}


def resolve_threshold(series: SegmentedSeries, spec: ThresholdSpec) -> float:
    """Resolve a threshold specification against the pooled observations.

    Quantile levels use the type-1 (inverse CDF) empirical quantile, i.e. the
    ceil(N q)-th order statistic of all N pooled values, so results are
    reproducible bit for bit.
    """
    if spec.kind == "absolute":
        return float(spec.value)
    pooled = series.pooled()
    return float(np.quantile(pooled, spec.value, method="inverted_cdf"))
