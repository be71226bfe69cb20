"""Closed-interval set algebra on [0, 1].

An :class:`IntervalSet` is a finite union of closed subintervals of the unit
interval, kept in canonical form: sorted, pairwise disjoint, with touching or
overlapping intervals merged.  Degenerate single-point intervals ``[a, a]``
are legal members.

Boundary convention: complements stay closed, so a boundary point belongs to
both a set and its complement.  Measure-zero overlap is deliberate; edge
activation treats range endpoints as active.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Tuple


def _canonicalize(pairs: Iterable[Tuple[float, float]]) -> Tuple[Tuple[float, float], ...]:
    cleaned = []
    for lo, hi in pairs:
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValueError(f"interval [{lo}, {hi}] is not a closed subinterval of [0, 1]")
        cleaned.append((float(lo), float(hi)))
    cleaned.sort()
    merged: list[Tuple[float, float]] = []
    for lo, hi in cleaned:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return tuple(merged)


@dataclass(frozen=True)
class IntervalSet:
    """A canonical union of disjoint closed intervals within [0, 1]."""

    intervals: Tuple[Tuple[float, float], ...] = ()

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[float, float]]) -> "IntervalSet":
        return cls(_canonicalize(pairs))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return _EMPTY

    @classmethod
    def full(cls) -> "IntervalSet":
        return _FULL

    @classmethod
    def single(cls, lo: float, hi: float) -> "IntervalSet":
        if lo > hi:
            raise ValueError(f"interval lower bound {lo} exceeds upper bound {hi}")
        return cls.from_pairs([(lo, hi)])

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def contains(self, alpha: float) -> bool:
        for lo, hi in self.intervals:
            if lo <= alpha <= hi:
                return True
            if lo > alpha:
                break
        return False

    def measure(self) -> float:
        return float(sum(hi - lo for lo, hi in self.intervals))

    def union(self, other: "IntervalSet") -> "IntervalSet":
        if not self.intervals:
            return other
        if not other.intervals:
            return self
        return IntervalSet(_canonicalize(self.intervals + other.intervals))

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out: list[Tuple[float, float]] = []
        a, b = self.intervals, other.intervals
        i = j = 0
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(tuple(out))

    def complement(self) -> "IntervalSet":
        """Closed complement within [0, 1].

        Endpoints of removed intervals stay in the result; zero-width gap
        segments are dropped so ``complement([2/3, 1]) == [0, 2/3]``, and
        segments that touch across a removed single point are merged.
        """
        out: list[Tuple[float, float]] = []
        cursor = 0.0
        for lo, hi in self.intervals:
            if lo > cursor:
                if out and out[-1][1] == cursor:
                    out[-1] = (out[-1][0], lo)
                else:
                    out.append((cursor, lo))
            cursor = max(cursor, hi)
        if cursor < 1.0:
            if out and out[-1][1] == cursor:
                out[-1] = (out[-1][0], 1.0)
            else:
                out.append((cursor, 1.0))
        return IntervalSet(tuple(out))


_EMPTY = IntervalSet(())
_FULL = IntervalSet(((0.0, 1.0),))


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.union(b)


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.intersect(b)


def complement(a: IntervalSet) -> IntervalSet:
    return a.complement()


def measure(a: IntervalSet) -> float:
    return a.measure()


def contains(a: IntervalSet, alpha: float) -> bool:
    return a.contains(alpha)


def union_many(sets: Sequence[IntervalSet]) -> IntervalSet:
    pairs: list[Tuple[float, float]] = []
    for s in sets:
        pairs.extend(s.intervals)
    if not pairs:
        return _EMPTY
    return IntervalSet(_canonicalize(pairs))
