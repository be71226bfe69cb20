"""Incremental index construction, edge seeds, and index serialization.

Nodes are inserted one at a time.  Each insertion runs the greedy frontier
search over the partial graph to gather candidates, prunes them into dynamic
edges carrying active ranges, attempts the reverse edge on every chosen
neighbor (whose adjacency is then re-pruned from scratch), and finally
refreshes the edge-seed set: the nodes farthest from the dataset centroid
under every weighting, i.e. the reverse-dominance frontier of centroid
distances.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import BinaryIO, List, Sequence, Tuple

import numpy as np

from .dataset import HybridDataset
from .intervals import IntervalSet
from .pareto import _gps_arrays, _layer_and_bound
from .pruning import _drng_prune_arrays

__all__ = [
    "DegIndex",
    "DynamicEdge",
    "IndexMeta",
    "build",
    "load",
    "save",
]

MAGIC = b"DEG1"
VERSION = 1
RANGE_GRID = 10_000

DEFAULT_M = 40
DEFAULT_EF_CONSTRUCTION = 200
DEFAULT_TH = 0.1


@dataclass(frozen=True)
class DynamicEdge:
    """A directed edge annotated with the weights at which it is traversable."""

    target: int
    range: IntervalSet


@dataclass(frozen=True)
class IndexMeta:
    m_max: int
    ef_construction: int
    th: float
    e_max: float
    s_max: float
    norm_margin: float
    d: int
    m: int
    n: int


class DegIndex:
    """Immutable adjacency of dynamic edges plus the edge-seed entry points.

    Edges live in flat CSR arrays so the search kernel can walk them without
    per-node indirection; :meth:`edges` rebuilds the object view on demand.
    """

    def __init__(self, meta: IndexMeta, seeds: np.ndarray,
                 edge_off: np.ndarray, edge_tgt: np.ndarray,
                 ival_off: np.ndarray, ival_lo: np.ndarray, ival_hi: np.ndarray):
        self.meta = meta
        self.seeds = np.asarray(seeds, dtype=np.int64)
        self.edge_off = np.asarray(edge_off, dtype=np.int64)
        self.edge_tgt = np.asarray(edge_tgt, dtype=np.int32)
        self.ival_off = np.asarray(ival_off, dtype=np.int64)
        self.ival_lo = np.asarray(ival_lo, dtype=np.float64)
        self.ival_hi = np.asarray(ival_hi, dtype=np.float64)
        for arr in (self.seeds, self.edge_off, self.edge_tgt,
                    self.ival_off, self.ival_lo, self.ival_hi):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.meta.n

    @property
    def num_edges(self) -> int:
        return int(self.edge_tgt.shape[0])

    def degree(self, node: int) -> int:
        return int(self.edge_off[node + 1] - self.edge_off[node])

    def neighbor_targets(self, node: int) -> np.ndarray:
        return self.edge_tgt[self.edge_off[node]:self.edge_off[node + 1]]

    def edges(self, node: int) -> List[DynamicEdge]:
        out = []
        for e in range(self.edge_off[node], self.edge_off[node + 1]):
            pairs = tuple(
                (float(self.ival_lo[t]), float(self.ival_hi[t]))
                for t in range(self.ival_off[e], self.ival_off[e + 1])
            )
            out.append(DynamicEdge(int(self.edge_tgt[e]), IntervalSet(pairs)))
        return out

    def active_targets(self, node: int, alpha: float) -> np.ndarray:
        """Targets of the node's edges whose active range contains ``alpha``."""
        keep = []
        for e in range(self.edge_off[node], self.edge_off[node + 1]):
            for t in range(self.ival_off[e], self.ival_off[e + 1]):
                if self.ival_lo[t] <= alpha <= self.ival_hi[t]:
                    keep.append(int(self.edge_tgt[e]))
                    break
        return np.array(keep, dtype=np.int64)

    def with_full_ranges(self) -> "DegIndex":
        """Same adjacency with every active range forced to [0, 1]."""
        n_edges = self.num_edges
        ival_off = np.arange(n_edges + 1, dtype=np.int64)
        return DegIndex(
            self.meta, self.seeds.copy(), self.edge_off.copy(), self.edge_tgt.copy(),
            ival_off, np.zeros(n_edges), np.ones(n_edges),
        )


# ---------------------------------------------------------------------------
# Edge seeds: reverse-dominance frontier of centroid distances
# ---------------------------------------------------------------------------

class _SeedFrontier:
    """Incremental maximal frontier: keep nodes no other node reverse-dominates.

    ``a`` reverse-dominates ``b`` when a is at least as far from the centroid
    in both modalities and strictly farther in one.  Exact ties coexist.
    """

    def __init__(self):
        self.ids: list[int] = []
        self.de: list[float] = []
        self.ds: list[float] = []

    def add(self, node: int, de: float, ds: float) -> None:
        for i in range(len(self.ids)):
            oe, os = self.de[i], self.ds[i]
            if oe >= de and os >= ds and (oe > de or os > ds):
                return
        kept_ids, kept_de, kept_ds = [], [], []
        for i in range(len(self.ids)):
            oe, os = self.de[i], self.ds[i]
            if de >= oe and ds >= os and (de > oe or ds > os):
                continue
            kept_ids.append(self.ids[i])
            kept_de.append(oe)
            kept_ds.append(os)
        kept_ids.append(node)
        kept_de.append(de)
        kept_ds.append(ds)
        self.ids, self.de, self.ds = kept_ids, kept_de, kept_ds

    def as_array(self) -> np.ndarray:
        return np.sort(np.array(self.ids, dtype=np.int64))


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

class _BuildGraph:
    """Mutable fixed-width adjacency used while inserting nodes."""

    def __init__(self, n: int, m_max: int):
        self.targets = np.zeros((n, m_max), dtype=np.int32)
        self.counts = np.zeros(n, dtype=np.int32)
        self.ranges: list[list[IntervalSet]] = [[] for _ in range(n)]

    def neighbor_targets(self, node: int) -> np.ndarray:
        return self.targets[node, : self.counts[node]]

    def set_edges(self, node: int, ids: Sequence[int], ranges: List[IntervalSet]) -> None:
        k = len(ids)
        self.targets[node, :k] = ids
        self.counts[node] = k
        self.ranges[node] = list(ranges)


def _prune_candidates(dataset: HybridDataset, graph: _BuildGraph, node: int,
                      ids: np.ndarray, de: np.ndarray, ds: np.ndarray,
                      m_max: int, th: float) -> None:
    sel_pos, ranges = _drng_prune_arrays(dataset, ids, de, ds, m_max, th)
    graph.set_edges(node, ids[sel_pos], ranges)


def _reverse_update(dataset: HybridDataset, graph: _BuildGraph, node: int,
                    new_node: int, m_max: int, th: float) -> None:
    """Re-layer and re-prune a node's adjacency with the new node as a candidate."""
    cand = np.append(graph.neighbor_targets(node).astype(np.int64), np.int64(new_node))
    de, ds = dataset.dist_pairs_to(dataset.e_vectors[node], dataset.s_vectors[node], cand)
    ids, de, ds, _ = _layer_and_bound(cand, de, ds, bound=cand.size + 1)
    _prune_candidates(dataset, graph, node, ids, de, ds, m_max, th)


def build(dataset: HybridDataset, m_max: int = DEFAULT_M,
          ef_construction: int = DEFAULT_EF_CONSTRUCTION, th: float = DEFAULT_TH,
          order: np.ndarray | None = None) -> DegIndex:
    """Build the index by inserting nodes one by one.

    ``order`` optionally permutes the insertion sequence (node ids stay the
    dataset row ids).  The dataset centroid is fixed up front, so identical
    inputs and order give an identical index.
    """
    n = dataset.n
    if m_max < 1:
        raise ValueError(f"edge cap must be >= 1, got {m_max}")
    if ef_construction < m_max:
        raise ValueError(
            f"ef_construction ({ef_construction}) must be >= edge cap ({m_max})"
        )
    if not 0.0 <= th <= 1.0:
        raise ValueError(f"th must lie in [0, 1], got {th}")
    if order is None:
        order = np.arange(n, dtype=np.int64)
    else:
        order = np.asarray(order, dtype=np.int64)
        if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
            raise ValueError("order must be a permutation of all node ids")

    centroid_e, centroid_s = dataset.centroid()
    cent_de, cent_ds = dataset.dist_pairs_to(centroid_e, centroid_s)

    graph = _BuildGraph(n, m_max)
    seeds = _SeedFrontier()
    first = int(order[0])
    seeds.add(first, float(cent_de[first]), float(cent_ds[first]))

    for x_raw in order[1:]:
        x = int(x_raw)
        ids, de, ds, _ = _gps_arrays(
            dataset, graph.neighbor_targets,
            dataset.e_vectors[x], dataset.s_vectors[x],
            seeds.ids, ef_construction,
        )
        _prune_candidates(dataset, graph, x, ids, de, ds, m_max, th)
        for y in graph.neighbor_targets(x):
            _reverse_update(dataset, graph, int(y), x, m_max, th)
        seeds.add(x, float(cent_de[x]), float(cent_ds[x]))

    meta = IndexMeta(
        m_max=m_max, ef_construction=ef_construction, th=th,
        e_max=float(dataset.e_max), s_max=float(dataset.s_max),
        norm_margin=float(dataset.norm_margin),
        d=dataset.d, m=dataset.m, n=n,
    )
    return _pack_index(meta, seeds.as_array(), graph)


def _pack_index(meta: IndexMeta, seeds: np.ndarray, graph: _BuildGraph) -> DegIndex:
    n = meta.n
    counts = graph.counts
    edge_off = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=edge_off[1:])
    total_edges = int(edge_off[-1])
    edge_tgt = np.empty(total_edges, dtype=np.int32)
    ival_counts = np.empty(total_edges, dtype=np.int64)
    pos = 0
    for node in range(n):
        k = int(counts[node])
        edge_tgt[pos:pos + k] = graph.targets[node, :k]
        for rng in graph.ranges[node]:
            ival_counts[pos] = len(rng.intervals)
            pos += 1
    ival_off = np.zeros(total_edges + 1, dtype=np.int64)
    np.cumsum(ival_counts, out=ival_off[1:])
    total_ivals = int(ival_off[-1])
    ival_lo = np.empty(total_ivals, dtype=np.float64)
    ival_hi = np.empty(total_ivals, dtype=np.float64)
    t = 0
    for node in range(n):
        for rng in graph.ranges[node]:
            for lo, hi in rng.intervals:
                ival_lo[t] = lo
                ival_hi[t] = hi
                t += 1
    return DegIndex(meta, seeds, edge_off, edge_tgt, ival_off, ival_lo, ival_hi)


# ---------------------------------------------------------------------------
# Serialization: quantized active ranges on a 0..10000 grid
# ---------------------------------------------------------------------------

def _quantize_down(value: float) -> int:
    """Largest grid tick k with k/GRID <= value (float comparison exact)."""
    k = int(np.floor(value * RANGE_GRID))
    while k + 1 <= RANGE_GRID and (k + 1) / RANGE_GRID <= value:
        k += 1
    while k > 0 and k / RANGE_GRID > value:
        k -= 1
    return min(max(k, 0), RANGE_GRID)


def _quantize_up(value: float) -> int:
    """Smallest grid tick k with k/GRID >= value (float comparison exact)."""
    k = int(np.ceil(value * RANGE_GRID))
    while k - 1 >= 0 and (k - 1) / RANGE_GRID >= value:
        k -= 1
    while k < RANGE_GRID and k / RANGE_GRID < value:
        k += 1
    return min(max(k, 0), RANGE_GRID)


def _quantize_range(pairs: Sequence[Tuple[float, float]]) -> List[Tuple[int, int]]:
    """Widen each interval to grid ticks, merging any that now touch."""
    out: List[Tuple[int, int]] = []
    for lo, hi in pairs:
        qlo, qhi = _quantize_down(lo), _quantize_up(hi)
        if out and qlo <= out[-1][1]:
            if qhi > out[-1][1]:
                out[-1] = (out[-1][0], qhi)
        else:
            out.append((qlo, qhi))
    return out


def save(index: DegIndex, path) -> None:
    with open(path, "wb") as fh:
        _write_index(index, fh)


def _write_index(index: DegIndex, fh: BinaryIO) -> None:
    meta = index.meta
    fh.write(MAGIC)
    fh.write(struct.pack("<I", VERSION))
    fh.write(struct.pack(
        "<II d d d d III",
        meta.m_max, meta.ef_construction, meta.th, meta.e_max, meta.s_max,
        meta.norm_margin, meta.d, meta.m, meta.n,
    ))
    fh.write(struct.pack("<I", index.seeds.shape[0]))
    fh.write(index.seeds.astype("<u4").tobytes())
    for node in range(meta.n):
        lo_edge, hi_edge = int(index.edge_off[node]), int(index.edge_off[node + 1])
        fh.write(struct.pack("<H", hi_edge - lo_edge))
        for e in range(lo_edge, hi_edge):
            pairs = [
                (float(index.ival_lo[t]), float(index.ival_hi[t]))
                for t in range(index.ival_off[e], index.ival_off[e + 1])
            ]
            quantized = _quantize_range(pairs)
            fh.write(struct.pack("<IH", int(index.edge_tgt[e]), len(quantized)))
            for qlo, qhi in quantized:
                fh.write(struct.pack("<HH", qlo, qhi))


class IndexFormatError(ValueError):
    """Raised for bad magic, version, corruption, or truncation."""


def _read_exact(fh: BinaryIO, size: int) -> bytes:
    data = fh.read(size)
    if len(data) != size:
        raise IndexFormatError("truncated index file")
    return data


def load(path) -> DegIndex:
    with open(path, "rb") as fh:
        return _read_index(fh)


def _read_index(fh: BinaryIO) -> DegIndex:
    if _read_exact(fh, 4) != MAGIC:
        raise IndexFormatError("not an index file (bad magic)")
    (version,) = struct.unpack("<I", _read_exact(fh, 4))
    if version != VERSION:
        raise IndexFormatError(f"unsupported index version {version}")
    m_max, ef_c, th, e_max, s_max, margin, d, m, n = struct.unpack(
        "<II d d d d III", _read_exact(fh, 4 * 2 + 8 * 4 + 4 * 3)
    )
    meta = IndexMeta(m_max, ef_c, th, e_max, s_max, margin, d, m, n)
    (n_seeds,) = struct.unpack("<I", _read_exact(fh, 4))
    seeds = np.frombuffer(_read_exact(fh, 4 * n_seeds), dtype="<u4").astype(np.int64)

    edge_counts = np.empty(n, dtype=np.int64)
    targets: list[int] = []
    ival_counts: list[int] = []
    bounds: list[Tuple[float, float]] = []
    for node in range(n):
        (k,) = struct.unpack("<H", _read_exact(fh, 2))
        edge_counts[node] = k
        for _ in range(k):
            tgt, n_iv = struct.unpack("<IH", _read_exact(fh, 6))
            if tgt >= n:
                raise IndexFormatError(f"edge target {tgt} out of range")
            targets.append(tgt)
            ival_counts.append(n_iv)
            for _ in range(n_iv):
                qlo, qhi = struct.unpack("<HH", _read_exact(fh, 4))
                if qlo > qhi or qhi > RANGE_GRID:
                    raise IndexFormatError(
                        f"corrupt active range ({qlo}, {qhi}) on edge to {tgt}"
                    )
                bounds.append((qlo / RANGE_GRID, qhi / RANGE_GRID))
    if fh.read(1):
        raise IndexFormatError("trailing bytes after index payload")

    edge_off = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(edge_counts, out=edge_off[1:])
    ival_off = np.zeros(len(targets) + 1, dtype=np.int64)
    if targets:
        np.cumsum(np.asarray(ival_counts, dtype=np.int64), out=ival_off[1:])
    ival_lo = np.array([b[0] for b in bounds], dtype=np.float64)
    ival_hi = np.array([b[1] for b in bounds], dtype=np.float64)
    return DegIndex(
        meta, seeds, edge_off,
        np.asarray(targets, dtype=np.int32),
        ival_off, ival_lo, ival_hi,
    )
