"""Empirical indicator-sum and ratio estimators for tail quantities.

All estimators slide windows over the segments of a series; windows never
cross a segment boundary.  The cluster-size and pattern distributions are
window-event counts and agree exactly with run-based cluster detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .bootstrap import (
    BlockLayout,
    BootstrapConfig,
    event_block_counts,
    multiplier_ratio_ci,
    plan_blocks,
)
from .errors import NoDataError
from .events import WindowEvent
from .patterns import OrdinalPattern, all_patterns, lehmer_rank_rows, pattern_perm_rows
from .series import SegmentedSeries


class PHat(NamedTuple):
    """Empirical window-event probability: indicator sum over window count."""

    value: float
    count: int
    n: int


def p_hat(series: SegmentedSeries, u: float, event: WindowEvent) -> PHat:
    """Empirical probability of a window event at threshold u.

    The denominator is the number of complete windows of the event's span
    inside the segments; segments shorter than the span contribute nothing.

    Raises
    ------
    ValueError
        If no segment is long enough to hold a single window.
    """
    count = 0
    n = 0
    for seg in series.segments:
        ind = event.window_indicators(seg, u)
        count += int(np.count_nonzero(ind))
        n += ind.size
    if n == 0:
        raise ValueError(
            f"all segments are shorter than the window span {event.span}"
        )
    return PHat(count / n, count, n)


def ratio_estimate(
    series: SegmentedSeries, u: float, a1: WindowEvent, a0: WindowEvent
) -> float:
    """Ratio of two empirical window-event probabilities.

    The events are padded to a common span so numerator and denominator run
    over the same windows; the window count then cancels exactly.
    """
    t = max(a1.t, a0.t)
    p1 = p_hat(series, u, a1.padded_to(t))
    p0 = p_hat(series, u, a0.padded_to(t))
    if p0.count == 0:
        raise NoDataError("denominator event never occurs at this threshold")
    return p1.count / p0.count


@dataclass
class DistributionEstimate:
    """A probability mass function over a finite support with uncertainty.

    ``support`` atoms are cluster sizes (ints, final overflow atom as a
    string like ``">5"``) or ordinal patterns.  ``ci_lo``/``ci_hi`` are
    per-atom bootstrap bounds, ``se`` per-atom Monte Carlo standard errors.
    """

    support: list
    probs: np.ndarray
    counts: np.ndarray
    denominator_count: int
    threshold: float
    method: str = "empirical"
    ci_lo: np.ndarray | None = None
    ci_hi: np.ndarray | None = None
    se: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def prob_of(self, atom) -> float:
        return float(self.probs[self.support.index(atom)])

    def to_json(self) -> dict:
        def atom_json(a):
            return a.to_json() if isinstance(a, OrdinalPattern) else a

        out = {
            "support": [atom_json(a) for a in self.support],
            "probs": [float(p) for p in self.probs],
            "counts": [int(c) for c in self.counts],
            "denominator_count": int(self.denominator_count),
            "threshold": float(self.threshold),
            "method": self.method,
        }
        if self.ci_lo is not None:
            out["ci_lo"] = [float(v) for v in self.ci_lo]
            out["ci_hi"] = [float(v) for v in self.ci_hi]
        if self.se is not None:
            out["se"] = [float(v) for v in self.se]
        if self.metadata:
            out["metadata"] = self.metadata
        return out


def _attach_bootstrap(est: DistributionEstimate, num, den, cfg: BootstrapConfig):
    """Run the multiplier bootstrap on block count matrices and attach CIs."""
    res = multiplier_ratio_ci(num, den, cfg)
    lo = np.minimum(res.intervals[:, 0], est.probs)
    hi = np.maximum(res.intervals[:, 1], est.probs)
    est.ci_lo = np.clip(lo, 0.0, 1.0)
    est.ci_hi = np.clip(hi, 0.0, 1.0)
    est.method = "bootstrap"
    est.metadata.update(
        {
            "n_replicates": cfg.n_replicates,
            "seed": int(cfg.seed),
            "block_spec": cfg.block_json(),
            "ci_level": cfg.ci_level,
            "ci_method": "percentile",
            "multiplier_law": "normal(0,1)",
            "block_sums": "uncentered",
            "n_discarded": [int(v) for v in res.n_discarded],
            "n_blocks": res.n_blocks,
        }
    )


def _cluster_size_block_counts(
    series: SegmentedSeries, u: float, l_max: int, layout: BlockLayout
) -> tuple[np.ndarray, np.ndarray]:
    """Per-block counts of clusters of size 1..l_max, overflow, and total.

    Iterates window events cluster_of_size(l) until no run long enough for a
    further cluster exists; the column sum over all sizes is exactly the
    number of detectable clusters.
    """
    m = layout.n_blocks
    counts = np.zeros((m, l_max + 1), dtype=np.int64)
    total = np.zeros(m, dtype=np.int64)
    n_max = max(seg.size for seg in series.segments)
    l = 1
    while l <= n_max:
        ge = WindowEvent.cluster_of_size_at_least(l)
        if sum(
            int(np.count_nonzero(ge.window_indicators(seg, u)))
            for seg in series.segments
        ) == 0:
            break
        per_block = event_block_counts(series, u, WindowEvent.cluster_of_size(l), layout)
        total += per_block
        if l <= l_max:
            counts[:, l - 1] = per_block
        else:
            counts[:, l_max] += per_block
        l += 1
    return counts, total


def cluster_size_distribution(
    series: SegmentedSeries,
    u: float,
    l_max: int,
    bootstrap: BootstrapConfig | None = None,
) -> DistributionEstimate:
    """Empirical distribution of the exceedance-cluster size.

    Parameters
    ----------
    series : SegmentedSeries
    u : float
        Threshold (exceedance means value > u).
    l_max : int
        Sizes 1..l_max are reported individually; larger clusters fall into
        the overflow atom ``">l_max"``.
    bootstrap : BootstrapConfig, optional
        When given, percentile confidence intervals from the multiplier block
        bootstrap are attached.

    Returns
    -------
    DistributionEstimate
        ``probs[l-1]`` equals (number of clusters of size l) / (number of
        clusters), identical to counting on ``detect_clusters`` output.

    Raises
    ------
    NoDataError
        If the series contains no cluster at all at this threshold.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    if bootstrap is not None and isinstance(bootstrap.block, int):
        # the longest window used is span l_max + 2 for the overflow probe
        if bootstrap.block < l_max + 3:
            raise ValueError(
                f"fixed block length {bootstrap.block} is smaller than the "
                f"window span {l_max + 3}"
            )
    layout = plan_blocks(series, bootstrap.block if bootstrap else "segments")
    counts, total = _cluster_size_block_counts(series, u, l_max, layout)
    n_clusters = int(total.sum())
    if n_clusters == 0:
        raise NoDataError(f"no exceedance clusters at threshold {u!r}")
    atom_counts = counts.sum(axis=0)
    est = DistributionEstimate(
        support=list(range(1, l_max + 1)) + [f">{l_max}"],
        probs=atom_counts / n_clusters,
        counts=atom_counts,
        denominator_count=n_clusters,
        threshold=float(u),
    )
    if bootstrap is not None:
        _attach_bootstrap(est, counts, total, bootstrap)
    return est


def _pattern_block_counts(
    series: SegmentedSeries, u: float, length: int, layout: BlockLayout
) -> tuple[np.ndarray, np.ndarray]:
    """Per-block pattern-rank histogram over clusters of exactly this size."""
    m = layout.n_blocks
    n_atoms = math.factorial(length)
    counts = np.zeros((m, n_atoms), dtype=np.int64)
    den = np.zeros(m, dtype=np.int64)
    event = WindowEvent.cluster_of_size(length)
    cols = 1 + np.arange(length)
    for si, seg in enumerate(series.segments):
        ind = event.window_indicators(seg, u)
        if ind.size == 0:
            continue
        starts = np.flatnonzero(ind)
        if starts.size == 0:
            continue
        blocks = seg[starts[:, None] + cols[None, :]]
        ranks = lehmer_rank_rows(pattern_perm_rows(blocks))
        ids = layout.block_ids(si, starts)
        den += np.bincount(ids, minlength=m)
        np.add.at(counts, (ids, ranks), 1)
    return counts, den


def pattern_distribution(
    series: SegmentedSeries,
    u: float,
    length: int,
    bootstrap: BootstrapConfig | None = None,
) -> DistributionEstimate:
    """Distribution of ordinal patterns within clusters of a fixed size.

    The support covers all ``length!`` patterns so that zero-probability
    atoms appear explicitly.

    Raises
    ------
    NoDataError
        If no cluster of exactly this size exists at the threshold.
    """
    if not 1 <= length <= 8:
        raise ValueError("pattern length must be in 1..8")
    if bootstrap is not None and isinstance(bootstrap.block, int):
        if bootstrap.block < length + 2:
            raise ValueError(
                f"fixed block length {bootstrap.block} is smaller than the "
                f"window span {length + 2}"
            )
    layout = plan_blocks(series, bootstrap.block if bootstrap else "segments")
    counts, den = _pattern_block_counts(series, u, length, layout)
    n_clusters = int(den.sum())
    if n_clusters == 0:
        raise NoDataError(f"no clusters of size {length} at threshold {u!r}")
    atom_counts = counts.sum(axis=0)
    est = DistributionEstimate(
        support=all_patterns(length),
        probs=atom_counts / n_clusters,
        counts=atom_counts,
        denominator_count=n_clusters,
        threshold=float(u),
    )
    if bootstrap is not None:
        _attach_bootstrap(est, counts, den, bootstrap)
    return est


def extremogram(series: SegmentedSeries, u: float, h_max: int) -> np.ndarray:
    """Empirical extremogram for lags 0..h_max.

    ``rho[h]`` is the number of within-segment pairs (X_k > u, X_{k+h} > u)
    divided by the total number of exceedances; ``rho[0] = 1`` whenever any
    exceedance exists.

    Raises
    ------
    NoDataError
        If the series contains no exceedance at this threshold.
    """
    if h_max < 1:
        raise ValueError("h_max must be >= 1")
    if h_max > max(seg.size for seg in series.segments) - 1:
        raise ValueError(f"no segment is long enough for lag {h_max}")
    exceed = [seg > u for seg in series.segments]
    den = sum(int(np.count_nonzero(e)) for e in exceed)
    if den == 0:
        raise NoDataError(f"no exceedances at threshold {u!r}")
    rho = np.empty(h_max + 1)
    rho[0] = 1.0
    for h in range(1, h_max + 1):
        num = sum(
            int(np.count_nonzero(e[:-h] & e[h:])) for e in exceed if e.size > h
        )
        rho[h] = num / den
    return rho
