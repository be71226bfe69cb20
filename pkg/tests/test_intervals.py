import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deg.intervals import IntervalSet

GRID = np.linspace(0.0, 1.0, 2001)


def iset(*pairs):
    return IntervalSet.from_pairs(pairs)


unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def interval_sets(draw, max_intervals=6):
    count = draw(st.integers(0, max_intervals))
    pairs = []
    for _ in range(count):
        a = draw(unit)
        b = draw(unit)
        pairs.append((min(a, b), max(a, b)))
    return IntervalSet.from_pairs(pairs)


class TestCanonicalForm:
    def test_union_merges_touching(self):
        got = iset((0.0, 0.3)).union(iset((0.2, 0.5)))
        assert got.intervals == ((0.0, 0.5),)
        assert got.measure() == pytest.approx(0.5)

    def test_complement_keeps_closed_boundary(self):
        assert iset((2 / 3, 1.0)).complement().intervals == ((0.0, 2 / 3),)

    def test_complement_of_full_and_empty(self):
        assert IntervalSet.full().complement().intervals == ()
        assert IntervalSet.empty().complement().intervals == ((0.0, 1.0),)

    def test_degenerate_point_vanishes_under_complement(self):
        assert iset((0.5, 0.5)).complement().intervals == ((0.0, 1.0),)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            iset((-0.1, 0.5))
        with pytest.raises(ValueError):
            iset((0.2, 1.3))

    @given(interval_sets())
    def test_canonical_invariants(self, s):
        for lo, hi in s.intervals:
            assert 0.0 <= lo <= hi <= 1.0
        for (_, h1), (l2, _) in zip(s.intervals, s.intervals[1:]):
            assert h1 < l2
        assert 0.0 <= s.measure() <= 1.0


class TestAlgebra:
    @settings(max_examples=200, deadline=None)
    @given(interval_sets(), interval_sets())
    def test_inclusion_exclusion(self, a, b):
        lhs = a.measure() + b.measure()
        rhs = a.union(b).measure() + a.intersect(b).measure()
        assert lhs == pytest.approx(rhs, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(interval_sets(), interval_sets())
    def test_membership_against_grid_oracle(self, a, b):
        in_a = np.array([a.contains(x) for x in GRID])
        in_b = np.array([b.contains(x) for x in GRID])
        u = a.union(b)
        i = a.intersect(b)
        assert all(u.contains(x) == (ia or ib) for x, ia, ib in zip(GRID, in_a, in_b))
        assert all(i.contains(x) == (ia and ib) for x, ia, ib in zip(GRID, in_a, in_b))

    @settings(max_examples=100, deadline=None)
    @given(interval_sets())
    def test_complement_measure(self, s):
        assert s.complement().measure() == pytest.approx(1.0 - s.measure(), abs=1e-12)

    def test_complement_involution_without_degenerates(self):
        s = iset((0.1, 0.3), (0.5, 0.9))
        assert s.complement().complement().intervals == s.intervals

    def test_contains_boundaries(self):
        s = iset((0.25, 0.75))
        assert s.contains(0.25) and s.contains(0.75)
        assert not s.contains(0.2499999) and not s.contains(0.7500001)
        # boundary point belongs to the complement too
        assert s.complement().contains(0.25)

    def test_intersect_disjoint(self):
        assert iset((0.0, 0.2)).intersect(iset((0.5, 1.0))).intervals == ()
