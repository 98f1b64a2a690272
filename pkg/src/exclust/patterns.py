"""Ordinal patterns of real vectors, with ties resolved by original index order."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

# all_patterns enumerates l! permutations; 8! = 40320 is the largest we allow
MAX_PATTERN_LENGTH = 8


@dataclass(frozen=True)
class OrdinalPattern:
    """Permutation encoding the descending order of a data window.

    ``perm[k]`` is the index of the (k+1)-th largest value, so the pattern of
    a strictly decreasing window is the identity permutation.  Among equal
    values the smaller original index is ranked higher.
    """

    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        object.__setattr__(self, "perm", perm)
        if len(perm) == 0:
            raise ValueError("a pattern must have length >= 1")
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"{perm} is not a permutation of 0..{len(perm) - 1}")

    @property
    def length(self) -> int:
        return len(self.perm)

    def rank(self) -> int:
        return pattern_rank(self)

    def to_json(self) -> list[int]:
        return list(self.perm)

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.perm) + ")"


def pattern_of(values) -> OrdinalPattern:
    """Ordinal pattern of a real vector.

    Parameters
    ----------
    values : array_like, shape (l,)
        Finite real numbers, l >= 1.

    Returns
    -------
    OrdinalPattern
        The unique permutation ``p`` with ``values[p[0]] >= ... >= values[p[l-1]]``
        where equal values keep their original index order (stable descending
        sort of indices by value).
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("values must be a non-empty 1-d vector")
    if not np.all(np.isfinite(x)):
        raise ValueError("values must be finite")
    perm = np.argsort(-x, kind="stable")
    return OrdinalPattern(tuple(int(i) for i in perm))


def pattern_rank(pattern: OrdinalPattern) -> int:
    """Lehmer-code rank of a pattern, a bijection onto ``0..l!-1``.

    Rank 0 is the identity permutation; ranks follow lexicographic order
    of the permutation tuples.
    """
    perm = pattern.perm
    l = len(perm)
    rank = 0
    for i, pi in enumerate(perm):
        smaller_later = sum(1 for pj in perm[i + 1 :] if pj < pi)
        rank += smaller_later * math.factorial(l - 1 - i)
    return rank


def all_patterns(length: int) -> list[OrdinalPattern]:
    """All l! ordinal patterns of the given length, sorted by rank."""
    if not 1 <= length <= MAX_PATTERN_LENGTH:
        raise ValueError(
            f"pattern length must be in 1..{MAX_PATTERN_LENGTH}, got {length}"
        )
    # itertools.permutations yields lexicographic order == Lehmer rank order
    return [OrdinalPattern(p) for p in itertools.permutations(range(length))]


def pattern_perm_rows(blocks: np.ndarray) -> np.ndarray:
    """Row-wise pattern permutations of a 2-d array (stable descending sort)."""
    return np.argsort(-blocks, axis=1, kind="stable")


def lehmer_rank_rows(perms: np.ndarray) -> np.ndarray:
    """Row-wise Lehmer ranks of an integer array of permutations."""
    n, l = perms.shape
    ranks = np.zeros(n, dtype=np.int64)
    for i in range(l - 1):
        smaller = np.zeros(n, dtype=np.int64)
        for j in range(i + 1, l):
            smaller += perms[:, j] < perms[:, i]
        ranks += smaller * math.factorial(l - 1 - i)
    return ranks
