"""Multi-layer Pareto frontiers and the greedy frontier search.

Candidates around a focal node live in the two-objective space of their
normalized per-modality distances.  Layer 1 is the set of non-dominated
candidates (no other candidate is at most as far in both modalities and
strictly closer in one); layer i+1 is the frontier of what remains.  The
greedy frontier search grows this structure over a partially built graph by
expanding neighbors of the nearest unexplored frontier nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Tuple

import numpy as np

from .dataset import HybridDataset
from . import _kernels

__all__ = ["ParetoEntry", "ParetoLayers", "find_pf", "gps"]


@dataclass(frozen=True)
class ParetoEntry:
    """One candidate: node id plus its normalized distances to the focal node."""

    node_id: int
    de: float
    ds: float


@dataclass(frozen=True)
class ParetoLayers:
    """Frontier layers, nearest first; within a layer, ds ascending."""

    layers: Tuple[Tuple[ParetoEntry, ...], ...]

    @property
    def total(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def flat(self) -> Tuple[ParetoEntry, ...]:
        return tuple(e for layer in self.layers for e in layer)

    def node_ids(self) -> Tuple[int, ...]:
        return tuple(e.node_id for layer in self.layers for e in layer)


def _sweep_order(ids: np.ndarray, de: np.ndarray, ds: np.ndarray):
    """Layered sweep order: layer-major, within a layer (ds, de, id) ascending.

    Returns a permutation of positions plus each permuted position's layer id.
    """
    order = np.lexsort((ids, de, ds))
    layer_of_sorted = _kernels.pareto_layer_sweep(de[order])
    perm = np.argsort(layer_of_sorted, kind="stable")
    return order[perm], layer_of_sorted[perm]


def _apply_bound(final: np.ndarray, layers: np.ndarray, bound: int):
    """Keep whole layers while the running total stays below ``bound``.

    If the first layer alone reaches the bound, its first ``bound - 1``
    entries are kept instead so callers always make progress.
    """
    if final.size == 0:
        return final, layers
    sizes = np.bincount(layers)
    if sizes[0] >= bound:
        keep = bound - 1
        return final[:keep], layers[:keep]
    total = 0
    for size in sizes:
        if total + size < bound:
            total += int(size)
        else:
            break
    return final[:total], layers[:total]


def _layer_and_bound(ids: np.ndarray, de: np.ndarray, ds: np.ndarray, bound: int):
    """Full layering + bound truncation over candidate arrays.

    Returns (ids, de, ds, layer) arrays in final sweep order.
    """
    final, layers = _sweep_order(ids, de, ds)
    final, layers = _apply_bound(final, layers, bound)
    return ids[final], de[final], ds[final], layers


def _to_layers_object(ids: np.ndarray, de: np.ndarray, ds: np.ndarray,
                      layers: np.ndarray) -> ParetoLayers:
    out: list[tuple[ParetoEntry, ...]] = []
    current: list[ParetoEntry] = []
    last = -1
    for i in range(ids.shape[0]):
        if layers[i] != last:
            if current:
                out.append(tuple(current))
            current = []
            last = int(layers[i])
        current.append(ParetoEntry(int(ids[i]), float(de[i]), float(ds[i])))
    if current:
        out.append(tuple(current))
    return ParetoLayers(tuple(out))


def find_pf(candidates: Sequence[ParetoEntry], bound: int) -> ParetoLayers:
    """Layer candidates into Pareto frontiers, keeping whole layers below ``bound``.

    Candidates must be deduplicated by node id.  An empty candidate list
    yields empty layers.
    """
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    if not candidates:
        return ParetoLayers(())
    ids = np.array([c.node_id for c in candidates], dtype=np.int64)
    if np.unique(ids).size != ids.size:
        raise ValueError("candidates must be deduplicated by node_id")
    de = np.array([c.de for c in candidates], dtype=np.float64)
    ds = np.array([c.ds for c in candidates], dtype=np.float64)
    out = _layer_and_bound(ids, de, ds, bound)
    return _to_layers_object(*out)


NeighborFn = Callable[[int], np.ndarray]


def _gps_arrays(dataset: HybridDataset, neighbors: NeighborFn,
                focal_e: np.ndarray, focal_s: np.ndarray,
                seed_ids: Iterable[int], bound: int):
    """Greedy Pareto frontier search; returns candidate arrays in sweep order.

    Each node's distances are evaluated exactly once (on first visit).  Nodes
    truncated away by the bound stay visited and never re-enter.
    """
    n = dataset.n
    visited = np.zeros(n, dtype=bool)
    flagged = np.zeros(n, dtype=bool)

    seed_arr = np.unique(np.asarray(list(seed_ids), dtype=np.int64))
    if seed_arr.size == 0:
        raise ValueError("seed set must be nonempty")
    visited[seed_arr] = True
    de, ds = dataset.dist_pairs_to(focal_e, focal_s, seed_arr)
    ids, de, ds, layers = _layer_and_bound(seed_arr, de, ds, bound)

    while ids.size < bound:
        unflagged = ~flagged[ids]
        if not unflagged.any():
            break
        first = int(np.argmax(unflagged))
        nns = ids[(layers == layers[first]) & unflagged]
        flagged[nns] = True
        fresh: list[np.ndarray] = []
        for u in nns:
            targets = neighbors(int(u))
            if targets.size:
                fresh.append(targets)
        if fresh:
            cand = np.unique(np.concatenate(fresh).astype(np.int64))
            cand = cand[~visited[cand]]
        else:
            cand = np.empty(0, dtype=np.int64)
        if cand.size:
            visited[cand] = True
            nde, nds = dataset.dist_pairs_to(focal_e, focal_s, cand)
            ids = np.concatenate([ids, cand])
            de = np.concatenate([de, nde])
            ds = np.concatenate([ds, nds])
        ids, de, ds, layers = _layer_and_bound(ids, de, ds, bound)
    return ids, de, ds, layers


def gps(dataset: HybridDataset, graph, focal_e: np.ndarray, focal_s: np.ndarray,
        seeds: Iterable[int], bound: int) -> ParetoLayers:
    """Greedy Pareto frontier search over a (partially built) graph.

    ``graph`` needs a ``neighbor_targets(node_id) -> np.ndarray`` method; all
    stored edges are traversed regardless of their active ranges.  Returns the
    layered candidate pool for the focal vectors, total below ``bound``.
    """
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    out = _gps_arrays(dataset, graph.neighbor_targets, focal_e, focal_s, seeds, bound)
    return _to_layers_object(*out)
