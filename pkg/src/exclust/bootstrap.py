"""Multiplier block bootstrap for ratio statistics of window-event counts.

Per-block numerator and denominator indicator sums are perturbed jointly with
weights 1 + xi_b, xi_b iid standard normal, and the ratio is re-formed per
replicate.  Intervals are symmetric order-statistic percentile intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateBootstrapError, NoDataError
from .events import WindowEvent
from .series import SegmentedSeries


@dataclass(frozen=True)
class BootstrapConfig:
    """Settings for the multiplier block bootstrap.

    ``block`` is either the string ``"segments"`` (each segment is one block)
    or a fixed block length in observations.  Multipliers are standard normal
    (mean 0, variance 1); replicates are reproducible functions of
    ``(seed, replicate index)``.
    """

    n_replicates: int = 1000
    block: str | int = "segments"
    seed: int = 0
    ci_level: float = 0.95
    multiplier_law: str = "normal"

    def __post_init__(self):
        if self.n_replicates < 1:
            raise ValueError("n_replicates must be >= 1")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must lie in (0,1)")
        if isinstance(self.block, bool) or (
            not isinstance(self.block, int) and self.block != "segments"
        ):
            raise ValueError('block must be "segments" or a positive integer')
        if isinstance(self.block, int) and self.block < 1:
            raise ValueError("fixed block length must be >= 1")
        if self.multiplier_law != "normal":
            raise ValueError("only standard normal multipliers are supported")

    def block_json(self):
        return self.block if isinstance(self.block, int) else "segments"


@dataclass
class BlockLayout:
    """Assignment of window start positions to bootstrap blocks.

    Windows are assigned by the segment-local index of their first
    observation, so events of different spans share one block structure.
    """

    block: str | int
    offsets: list[int]
    n_blocks: int

    def block_ids(self, segment_index: int, starts: np.ndarray) -> np.ndarray:
        if self.block == "segments":
            return np.full(starts.shape, self.offsets[segment_index], dtype=np.int64)
        return self.offsets[segment_index] + starts // int(self.block)


def plan_blocks(series: SegmentedSeries, block: str | int) -> BlockLayout:
    """Partition the series into bootstrap blocks."""
    if block == "segments":
        return BlockLayout(block, list(range(series.n_segments)), series.n_segments)
    length = int(block)
    if length < 1:
        raise ValueError("fixed block length must be >= 1")
    offsets = []
    total = 0
    for seg in series.segments:
        offsets.append(total)
        total += -(-seg.size // length)
    return BlockLayout(length, offsets, total)


def event_block_counts(
    series: SegmentedSeries, u: float, event: WindowEvent, layout: BlockLayout
) -> np.ndarray:
    """Per-block indicator counts of one event."""
    counts = np.zeros(layout.n_blocks, dtype=np.int64)
    for si, seg in enumerate(series.segments):
        ind = event.window_indicators(seg, u)
        if ind.size == 0:
            continue
        starts = np.flatnonzero(ind)
        if starts.size:
            ids = layout.block_ids(si, starts)
            counts += np.bincount(ids, minlength=layout.n_blocks)
    return counts


def percentile_interval(samples: np.ndarray, ci_level: float) -> tuple[float, float]:
    """Symmetric order-statistic interval.

    With R samples and k = ceil(R (1 - ci_level) / 2), the interval runs from
    the k-th smallest to the k-th largest sample (the (R+1-k)-th smallest).
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    r = xs.size
    if r == 0:
        raise ValueError("no samples to form an interval from")
    # the small guard keeps k at the nominal integer when R*(1-ci)/2 lands on one
    k = math.ceil(r * (1.0 - ci_level) / 2.0 - 1e-12)
    k = min(max(k, 1), r)
    return float(xs[k - 1]), float(xs[r - k])


@dataclass
class BootstrapResult:
    """Per-target intervals plus the full replicate matrix."""

    intervals: np.ndarray      # (n_targets, 2)
    replicates: np.ndarray     # (n_replicates, n_targets), NaN where discarded
    n_discarded: np.ndarray    # (n_targets,)
    point: np.ndarray          # (n_targets,)
    n_blocks: int


def _multipliers(seed: int, n_replicates: int, n_blocks: int) -> np.ndarray:
    """Standard normal multipliers; row r comes from the stream (seed, r)."""
    out = np.empty((n_replicates, n_blocks))
    for r in range(n_replicates):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=int(seed), spawn_key=(r,))
        )
        out[r] = rng.standard_normal(n_blocks)
    return out


def multiplier_ratio_ci(
    num_sums: np.ndarray, den_sums: np.ndarray, cfg: BootstrapConfig
) -> BootstrapResult:
    """Bootstrap intervals for ratios of block-summed counts.

    Parameters
    ----------
    num_sums : ndarray, shape (m, k) or (m,)
        Per-block numerator sums for each of k targets.
    den_sums : ndarray, shape (m, k) or (m,)
        Per-block denominator sums; a 1-d array is shared by all targets.
    cfg : BootstrapConfig

    Returns
    -------
    BootstrapResult
        Replicates with non-positive perturbed denominators are discarded
        (recorded per target); more than 50% discarded raises
        DegenerateBootstrapError.
    """
    num = np.atleast_2d(np.asarray(num_sums, dtype=float))
    if np.asarray(num_sums).ndim == 1:
        num = num.T
    den = np.asarray(den_sums, dtype=float)
    den2 = den[:, None] if den.ndim == 1 else den
    m, k = num.shape
    if m < 2:
        raise ValueError("multiplier bootstrap requires at least 2 blocks")
    if den2.shape[0] != m:
        raise ValueError("numerator and denominator block counts disagree")
    tot_den = den2.sum(axis=0)
    if np.any(tot_den <= 0):
        raise NoDataError("denominator event count is zero; no ratio to bootstrap")
    point = num.sum(axis=0) / np.broadcast_to(tot_den, (k,))

    weights = 1.0 + _multipliers(cfg.seed, cfg.n_replicates, m)
    rep_num = weights @ num
    rep_den = weights @ den2
    bad = np.broadcast_to(rep_den <= 0.0, rep_num.shape)
    safe_den = np.where(rep_den <= 0.0, 1.0, rep_den)
    reps = np.where(bad, np.nan, rep_num / safe_den)
    n_disc = bad.sum(axis=0).astype(np.int64)
    if np.any(n_disc > cfg.n_replicates // 2):
        raise DegenerateBootstrapError(
            f"{int(n_disc.max())} of {cfg.n_replicates} replicates had a "
            "non-positive perturbed denominator"
        )
    intervals = np.empty((k, 2))
    for j in range(k):
        valid = reps[:, j]
        intervals[j] = percentile_interval(valid[~np.isnan(valid)], cfg.ci_level)
    return BootstrapResult(intervals, reps, n_disc, point, m)


def bootstrap_ci(
    series: SegmentedSeries,
    u: float,
    targets: list[tuple[WindowEvent, WindowEvent]],
    cfg: BootstrapConfig,
) -> BootstrapResult:
    """Bootstrap intervals for a family of event-ratio estimators.

    Each target is a (numerator, denominator) pair of window events; the pair
    is padded to a common span before counting.  All targets share the block
    structure and the multiplier draws.
    """
    if not targets:
        raise ValueError("at least one target is required")
    pairs = []
    for a1, a0 in targets:
        t = max(a1.t, a0.t)
        pairs.append((a1.padded_to(t), a0.padded_to(t)))
    max_span = max(e.span for pair in pairs for e in pair)
    if isinstance(cfg.block, int) and cfg.block < max_span:
        raise ValueError(
            f"fixed block length {cfg.block} is smaller than the window span {max_span}"
        )
    layout = plan_blocks(series, cfg.block)
    if layout.n_blocks < 2:
        raise ValueError("multiplier bootstrap requires at least 2 blocks")
    num = np.column_stack(
        [event_block_counts(series, u, a1, layout) for a1, _ in pairs]
    )
    den = np.column_stack(
        [event_block_counts(series, u, a0, layout) for _, a0 in pairs]
    )
    return multiplier_ratio_ci(num, den, cfg)
