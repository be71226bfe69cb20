"""Per-edge pruning ranges and the dynamic edge pruning sweep.

An edge (x, y) is redundant at weight ``alpha`` whenever some rival node z is
strictly closer to both endpoints under the blended distance.  Each side of
that condition is linear in alpha, so the alphas where it holds form a single
closed interval determined by sign cases; the intersection of the two sides is
the pruning range contributed by z.  The edge's active range is the closed
complement of the union of all rivals' pruning ranges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .dataset import DistPair, HybridDataset
from .intervals import IntervalSet
from . import _kernels

__all__ = [
    "COEF_EPS",
    "TrianglePair",
    "drng_prune",
    "prune_range",
    "prune_range_one_sided",
]

# Linear coefficients smaller than this are treated as exactly zero so that
# near-degenerate triangles cannot blow up the case ratio.
COEF_EPS = 1e-12


@dataclass(frozen=True)
class TrianglePair:
    """Distance pairs of the triangle (edge xy, rival sides xz and yz)."""

    xy: DistPair
    xz: DistPair
    yz: DistPair


def _one_sided(de_xy: float, ds_xy: float, de_xz: float, ds_xz: float) -> IntervalSet:
    # Solve alpha * coef < rhs over [0, 1], where
    #   rhs  = ds_xy - ds_xz
    #   coef = de_xz - de_xy + rhs
    rhs = ds_xy - ds_xz
    coef = de_xz - de_xy + rhs
    if abs(rhs) < COEF_EPS:
        rhs = 0.0
    if abs(coef) < COEF_EPS:
        coef = 0.0

    if rhs > 0.0:
        if coef > 0.0:
            return IntervalSet.single(0.0, min(1.0, rhs / coef))
        return IntervalSet.full()
    if rhs < 0.0:
        if coef >= 0.0:
            return IntervalSet.empty()
        return IntervalSet.single(min(1.0, rhs / coef), 1.0)
    # rhs == 0: strict inequality fails at alpha = 0; it holds on (0, 1]
    # exactly when coef < 0, and the closed representation of that set is
    # the full interval.
    if coef < 0.0:
        return IntervalSet.full()
    return IntervalSet.empty()


def prune_range_one_sided(edge: DistPair, rival: DistPair) -> IntervalSet:
    """Alphas for which the rival is strictly closer to the edge's base node."""
    return _one_sided(edge.de, edge.ds, rival.de, rival.ds)


def prune_range(t: TrianglePair) -> IntervalSet:
    """Alphas for which the edge (x, y) is the strict longest side of the triangle.

    Intersection of the one-sided ranges for the x-side and the y-side; always
    a single (possibly empty) closed interval.
    """
    r1 = prune_range_one_sided(t.xy, t.xz)
    r2 = prune_range_one_sided(t.xy, t.yz)
    return r1.intersect(r2)


def drng_prune(dataset: HybridDataset, layers: "ParetoLayers", m_max: int,
               th: float) -> List[Tuple[int, IntervalSet]]:
    """Select up to ``m_max`` edges from layered candidates, each with its active range.

    Candidates are visited layer by layer, nearest first, in stored sweep
    order.  A candidate's pruning range is the union of its triangle ranges
    against every already-selected neighbor; it is kept iff the measure of the
    complement (its active range) reaches ``th``.
    """
    from .pareto import ParetoLayers  # local import to avoid a cycle

    if m_max < 1:
        raise ValueError(f"edge cap must be >= 1, got {m_max}")
    if not 0.0 <= th <= 1.0:
        raise ValueError(f"th must lie in [0, 1], got {th}")
    if not isinstance(layers, ParetoLayers):
        raise TypeError("drng_prune expects ParetoLayers candidates")
    if layers.total == 0:
        return []

    ids = np.fromiter(
        (e.node_id for layer in layers.layers for e in layer), dtype=np.int64
    )
    de = np.fromiter(
        (e.de for layer in layers.layers for e in layer), dtype=np.float64
    )
    ds = np.fromiter(
        (e.ds for layer in layers.layers for e in layer), dtype=np.float64
    )
    sel, ranges = _drng_prune_arrays(dataset, ids, de, ds, m_max, th)
    return [(int(ids[i]), rng) for i, rng in zip(sel, ranges)]


def _drng_prune_arrays(dataset: HybridDataset, ids: np.ndarray, de: np.ndarray,
                       ds: np.ndarray, m_max: int,
                       th: float) -> Tuple[np.ndarray, List[IntervalSet]]:
    """Array-level pruning sweep; candidates already in layered sweep order.

    Returns positions (into the candidate arrays) of selected edges plus their
    active ranges.
    """
    e_rows = dataset.e_vectors[ids]
    s_rows = dataset.s_vectors[ids]
    sel_pos, n_sel, bounds, counts = _kernels.drng_sweep(
        e_rows, s_rows, de, ds,
        float(dataset.e_max), float(dataset.s_max),
        int(m_max), float(th), COEF_EPS,
    )
    sel_pos = sel_pos[:n_sel]
    ranges: List[IntervalSet] = []
    for i in range(int(n_sel)):
        k = int(counts[i])
        pairs = [(float(bounds[i, j, 0]), float(bounds[i, j, 1])) for j in range(k)]
        ranges.append(IntervalSet(tuple(pairs)))
    return sel_pos, ranges
