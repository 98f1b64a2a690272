import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exclust import OrdinalPattern, all_patterns, pattern_of, pattern_rank


def oracle_pattern(values):
    """Stable descending sort oracle, independent of the implementation."""
    return tuple(sorted(range(len(values)), key=lambda i: (-values[i], i)))


class TestPatternOf:
    def test_strictly_decreasing_is_identity(self):
        assert pattern_of((9, 7, 3)).perm == (0, 1, 2)

    def test_up_down_cluster(self):
        # second observation largest
        assert pattern_of((2, 9, 1)).perm == (1, 0, 2)

    def test_ties_keep_index_order(self):
        assert pattern_of((5, 5, 1)).perm == (0, 1, 2)

    def test_down_up(self):
        assert pattern_of((3, 1, 2)).perm == (0, 2, 1)

    def test_singleton(self):
        assert pattern_of([4.2]).perm == (0,)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            pattern_of([])

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(ValueError):
            pattern_of([1.0, bad, 2.0])

    def test_exhaustive_oracle_length_5(self):
        # every vector of length 5 over {0,1,2}, covering all tie layouts
        for values in itertools.product((0.0, 1.0, 2.0), repeat=5):
            assert pattern_of(values).perm == oracle_pattern(values)

    @given(st.lists(st.integers(-50, 50), min_size=1, max_size=7))
    def test_matches_oracle_on_integers(self, values):
        assert pattern_of(values).perm == oracle_pattern(values)

    @given(st.lists(st.integers(-20, 20), min_size=1, max_size=7))
    def test_monotone_invariance(self, values):
        base = pattern_of(values).perm
        # exact monotone maps on small integers: no rounding can reorder them
        assert pattern_of([2.0 * v + 3.0 for v in values]).perm == base
        assert pattern_of([0.5 * v for v in values]).perm == base
        assert pattern_of([math.exp(v) for v in values]).perm == base

    @given(st.lists(st.floats(-1e9, 1e9), min_size=1, max_size=8))
    def test_returns_permutation(self, values):
        perm = pattern_of(values).perm
        assert sorted(perm) == list(range(len(values)))


class TestRank:
    def test_identity_rank_zero(self):
        assert pattern_rank(OrdinalPattern((0, 1, 2))) == 0

    def test_rank_by_enumeration(self):
        # independent oracle: index within lexicographic enumeration
        perms = list(itertools.permutations(range(3)))
        assert pattern_rank(OrdinalPattern((1, 0, 2))) == perms.index((1, 0, 2)) == 2

    def test_last_rank(self):
        assert pattern_rank(OrdinalPattern((2, 1, 0))) == 5

    @pytest.mark.parametrize("length", [1, 2, 3, 4, 5])
    def test_rank_unrank_round_trip(self, length):
        pats = all_patterns(length)
        assert [pattern_rank(p) for p in pats] == list(range(math.factorial(length)))


class TestAllPatterns:
    def test_length_one(self):
        assert [p.perm for p in all_patterns(1)] == [(0,)]

    def test_length_two(self):
        assert [p.perm for p in all_patterns(2)] == [(0, 1), (1, 0)]

    def test_length_three_count(self):
        pats = all_patterns(3)
        assert len(pats) == 6
        assert len(set(p.perm for p in pats)) == 6

    @pytest.mark.parametrize("bad", [0, 9, -1])
    def test_out_of_range(self, bad):
        with pytest.raises(ValueError):
            all_patterns(bad)


class TestOrdinalPatternType:
    def test_validates_permutation(self):
        with pytest.raises(ValueError):
            OrdinalPattern((0, 2))
        with pytest.raises(ValueError):
            OrdinalPattern(())

    def test_length_and_json(self):
        p = OrdinalPattern((1, 0, 2))
        assert p.length == 3
        assert p.to_json() == [1, 0, 2]
