"""Weight-aware greedy search with range skipping and an early-stop bound.

The beam expands only edges whose active range contains the query weight.
Before paying for both modality distances, the cheaper modality (smaller
dimension) is evaluated alone: its weighted term already lower-bounds the
hybrid distance, so a node whose partial term cannot beat the current result
heap is dropped after a single partial evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from .dataset import HybridDataset, HybridQuery
from . import _kernels

__all__ = ["SearchParams", "SearchResult", "SearchStats", "search", "search_fixed_graph"]


@dataclass(frozen=True)
class SearchParams:
    ef_search: int
    early_stop: bool = True
    collect_stats: bool = False


@dataclass(frozen=True)
class SearchStats:
    distance_evals_full: int
    distance_evals_partial: int
    nodes_popped: int
    edges_skipped_by_range: int


@dataclass(frozen=True)
class SearchResult:
    """Result ids and hybrid distances, ascending; ties broken by id."""

    ids: np.ndarray
    dists: np.ndarray
    stats: SearchStats | None
    incomplete: bool

    def __iter__(self) -> Iterator[Tuple[int, float]]:
        return ((int(i), float(d)) for i, d in zip(self.ids, self.dists))

    def __len__(self) -> int:
        return int(self.ids.shape[0])


def _run(graph, dataset: HybridDataset, query: HybridQuery, params: SearchParams,
         use_ranges: bool) -> SearchResult:
    if params.ef_search < query.k:
        raise ValueError(
            f"ef_search ({params.ef_search}) must be >= k ({query.k})"
        )
    if query.k > dataset.n:
        raise ValueError(f"k ({query.k}) exceeds dataset size ({dataset.n})")
    if query.e.shape[0] != dataset.d or query.s.shape[0] != dataset.m:
        raise ValueError("query dimensions do not match the dataset")
    e_first = dataset.d < dataset.m
    ids, dists, n_out, full, partial, popped, skipped = _kernels.beam_search(
        dataset.e_vectors, dataset.s_vectors,
        float(dataset.e_max), float(dataset.s_max),
        graph.edge_off, graph.edge_tgt,
        graph.ival_off, graph.ival_lo, graph.ival_hi,
        graph.seeds.astype(np.int64),
        query.e, query.s, float(query.alpha), int(query.k), int(params.ef_search),
        use_ranges, params.early_stop, e_first,
    )
    stats = None
    if params.collect_stats:
        stats = SearchStats(int(full), int(partial), int(popped), int(skipped))
    return SearchResult(
        ids=np.asarray(ids[:n_out]), dists=np.asarray(dists[:n_out]),
        stats=stats, incomplete=int(n_out) < query.k,
    )


def search(index, dataset: HybridDataset, query: HybridQuery,
           params: SearchParams) -> SearchResult:
    """Top-k search on a dynamic-edge index, skipping edges inactive at the query weight."""
    return _run(index, dataset, query, params, use_ranges=True)


def search_fixed_graph(graph, dataset: HybridDataset, query: HybridQuery,
                       params: SearchParams) -> SearchResult:
    """Top-k search on a static-edge graph; every stored edge is traversable."""
    return _run(graph, dataset, query, params, use_ranges=False)
