"""Window events: per-coordinate threshold constraints plus an optional
ordinal-pattern constraint, evaluated on sliding data windows.

A window of span t+2 covers the time offsets -1, 0, ..., t relative to its
anchor; constraint index 0 corresponds to offset -1.  Every event demands a
strict exceedance at offset 0 (or is empty there), which is what makes the
associated probabilities tail quantities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .patterns import OrdinalPattern, pattern_perm_rows

# per-coordinate constraint vocabulary
LE = "le"        # value <= threshold
GT = "gt"        # value >  threshold
ANY = "any"      # unconstrained
EMPTY = "empty"  # unsatisfiable (conjunction of le and gt)

_VALID = frozenset((LE, GT, ANY, EMPTY))


@dataclass(frozen=True)
class WindowEvent:
    """Decidable condition on a (t+2)-vector of observations.

    ``constraints[j]`` constrains the value at offset j-1.  An optional
    ordinal-pattern constraint applies to the sub-block starting at time
    offset ``pattern_offset`` with the pattern's length.
    """

    constraints: tuple[str, ...]
    pattern: OrdinalPattern | None = None
    pattern_offset: int = 0

    def __post_init__(self):
        cons = tuple(str(c) for c in self.constraints)
        object.__setattr__(self, "constraints", cons)
        if len(cons) < 2:
            raise ValueError("an event spans at least offsets -1 and 0")
        bad = [c for c in cons if c not in _VALID]
        if bad:
            raise ValueError(f"unknown constraint(s) {bad}")
        if cons[1] not in (GT, EMPTY):
            raise ValueError("the offset-0 coordinate must require a strict exceedance")
        if self.pattern is not None:
            lo = self.pattern_offset
            hi = lo + self.pattern.length - 1
            if lo < -1 or hi > self.t:
                raise ValueError("pattern block must lie inside the window")

    @property
    def t(self) -> int:
        """Largest time offset covered by the window."""
        return len(self.constraints) - 2

    @property
    def span(self) -> int:
        """Number of observations in one window (t + 2)."""
        return len(self.constraints)

    # ---- constructors ----------------------------------------------------

    @staticmethod
    def exceedance() -> "WindowEvent":
        """{x_0 > u}; reduces counts to the number of interior exceedances."""
        return WindowEvent((ANY, GT))

    @staticmethod
    def cluster_start() -> "WindowEvent":
        """{x_-1 <= u, x_0 > u}."""
        return WindowEvent((LE, GT))

    @staticmethod
    def cluster_of_size(size: int) -> "WindowEvent":
        """{x_-1 <= u, x_0 > u, ..., x_{size-1} > u, x_size <= u}."""
        if size < 1:
            raise ValueError("cluster size must be >= 1")
        return WindowEvent((LE,) + (GT,) * size + (LE,))

    @staticmethod
    def cluster_of_size_at_least(size: int) -> "WindowEvent":
        """{x_-1 <= u, x_0 > u, ..., x_{size-1} > u}; matches clusters of size >= size."""
        if size < 1:
            raise ValueError("cluster size must be >= 1")
        return WindowEvent((LE,) + (GT,) * size + (ANY,))

    @staticmethod
    def cluster_with_pattern(pattern: OrdinalPattern) -> "WindowEvent":
        """Cluster of exactly the pattern's length showing that pattern."""
        size = pattern.length
        return WindowEvent((LE,) + (GT,) * size + (LE,), pattern=pattern, pattern_offset=0)

    @staticmethod
    def impossible() -> "WindowEvent":
        """The empty event (contradictory constraints at offset 0)."""
        return WindowEvent((ANY, EMPTY))

    # ---- manipulation ----------------------------------------------------

    def padded_to(self, t: int) -> "WindowEvent":
        """Extend the span to cover offsets -1..t by adding unconstrained slots."""
        if t < self.t:
            raise ValueError(f"cannot shrink an event of span t={self.t} to t={t}")
        if t == self.t:
            return self
        return WindowEvent(
            self.constraints + (ANY,) * (t - self.t),
            pattern=self.pattern,
            pattern_offset=self.pattern_offset,
        )

    # ---- evaluation ------------------------------------------------------

    def window_indicators(self, segment: np.ndarray, threshold: float) -> np.ndarray:
        """Boolean indicators for every complete window of one segment.

        Entry k refers to the window anchored at observation k+1 (covering
        indices k..k+t+1).  Segments shorter than the span yield an empty
        array.
        """
        n = segment.size - self.span + 1
        if n <= 0:
            return np.zeros(0, dtype=bool)
        gt = segment > threshold
        ind = np.ones(n, dtype=bool)
        for j, c in enumerate(self.constraints):
            if c == GT:
                ind &= gt[j : j + n]
            elif c == LE:
                ind &= ~gt[j : j + n]
            elif c == EMPTY:
                ind[:] = False
                return ind
        if self.pattern is not None and ind.any():
            rows = np.flatnonzero(ind)
            j0 = self.pattern_offset + 1
            cols = j0 + np.arange(self.pattern.length)
            blocks = segment[rows[:, None] + cols[None, :]]
            perms = pattern_perm_rows(blocks)
            target = np.asarray(self.pattern.perm)
            ok = np.all(perms == target, axis=1)
            ind[rows[~ok]] = False
        return ind

    def evaluate_rows(self, windows: np.ndarray, threshold: float) -> np.ndarray:
        """Boolean indicators for a 2-d array whose columns are offsets -1..t."""
        if windows.ndim != 2 or windows.shape[1] != self.span:
            raise ValueError(f"expected windows with {self.span} columns")
        gt = windows > threshold
        ind = np.ones(windows.shape[0], dtype=bool)
        for j, c in enumerate(self.constraints):
            if c == GT:
                ind &= gt[:, j]
            elif c == LE:
                ind &= ~gt[:, j]
            elif c == EMPTY:
                ind[:] = False
                return ind
        if self.pattern is not None and ind.any():
            rows = np.flatnonzero(ind)
            j0 = self.pattern_offset + 1
            blocks = windows[rows, j0 : j0 + self.pattern.length]
            perms = pattern_perm_rows(blocks)
            target = np.asarray(self.pattern.perm)
            ok = np.all(perms == target, axis=1)
            ind[rows[~ok]] = False
        return ind
