"""Oracles and metrics: exact scans, the triangle-pruning graph oracle,
recall/QPS, and the fixed-weight baseline graph builder."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence, Set, Tuple

import numpy as np

from .dataset import HybridDataset, HybridQuery
from . import _kernels

__all__ = [
    "FixedGraph",
    "GroundTruth",
    "brute_force_topk",
    "build_fusion_baseline",
    "ground_truth_batch",
    "qps",
    "recall_at_k",
    "rng_oracle",
]

RNG_ORACLE_LIMIT = 1_000


@dataclass(frozen=True)
class GroundTruth:
    """Exact nearest ids and hybrid distances per query, nearest first."""

    ids: np.ndarray    # (Q, k') int32
    dists: np.ndarray  # (Q, k') float32

    @property
    def k(self) -> int:
        return int(self.ids.shape[1])

    def __len__(self) -> int:
        return int(self.ids.shape[0])


def brute_force_topk(dataset: HybridDataset, query: HybridQuery,
                     k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Exact top-k by the hybrid distance; ties broken by id ascending."""
    if k > dataset.n:
        raise ValueError(f"k ({k}) exceeds dataset size ({dataset.n})")
    de, ds = dataset.dist_pairs_to(query.e, query.s)
    dist = query.alpha * de + (1.0 - query.alpha) * ds
    order = np.lexsort((np.arange(dataset.n), dist))[:k]
    return order.astype(np.int64), dist[order]


def ground_truth_batch(dataset: HybridDataset, e_queries: np.ndarray,
                       s_queries: np.ndarray, alphas: np.ndarray,
                       k: int) -> GroundTruth:
    ids = np.empty((len(alphas), k), dtype=np.int32)
    dists = np.empty((len(alphas), k), dtype=np.float32)
    for i, alpha in enumerate(alphas):
        q = HybridQuery(e_queries[i], s_queries[i], float(alpha), k)
        gid, gd = brute_force_topk(dataset, q, k)
        ids[i] = gid
        dists[i] = gd
    return GroundTruth(ids, dists)


def recall_at_k(result_ids: Sequence[int], truth_ids: Sequence[int], k: int) -> float:
    """Fraction of the k exact nearest present among the first k results."""
    res = list(result_ids)[:k]
    truth = list(truth_ids)[:k]
    if len(res) < k or len(truth) < k:
        raise ValueError(f"both id lists must hold at least k={k} entries")
    return len(set(res) & set(truth)) / k


def qps(timings: Sequence[float]) -> float:
    """Queries per second from per-query (or per-batch) wall timings."""
    arr = np.asarray(timings, dtype=np.float64)
    total = float(arr.sum())
    if total <= 0.0:
        raise ValueError("total measured time must be positive")
    return arr.size / total


def rng_oracle(dataset: HybridDataset, alpha: float) -> Set[Tuple[int, int]]:
    """Exact triangle-pruned edge set at one weight (O(N^3), small N only).

    Edge (x, y) survives iff no z is strictly closer to both endpoints under
    the blended distance; ties keep the edge.
    """
    n = dataset.n
    if n > RNG_ORACLE_LIMIT:
        raise ValueError(f"oracle limited to n <= {RNG_ORACLE_LIMIT}, got {n}")
    e = dataset.e_vectors.astype(np.float64)
    s = dataset.s_vectors.astype(np.float64)

    def pairwise(x: np.ndarray) -> np.ndarray:
        sq = (x * x).sum(axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
        np.maximum(d2, 0.0, out=d2)
        return np.sqrt(d2)

    dist = (
        alpha * pairwise(e) / dataset.e_max
        + (1.0 - alpha) * pairwise(s) / dataset.s_max
    )
    edges: Set[Tuple[int, int]] = set()
    for x in range(n):
        dx = dist[x]
        # pruned[y] = exists z with dist[x,z] < dist[x,y] and dist[y,z] < dist[x,y]
        closer_to_x = dx[None, :] < dx[:, None]          # (y, z)
        closer_to_y = dist < dx[:, None]                 # (y, z)
        pruned = (closer_to_x & closer_to_y).any(axis=1)
        for y in range(x + 1, n):
            if not pruned[y]:
                edges.add((x, y))
    return edges


# ---------------------------------------------------------------------------
# Fixed-weight baseline graph
# ---------------------------------------------------------------------------

class FixedGraph:
    """A static proximity graph built at one fixed weight (no active ranges)."""

    def __init__(self, alpha_built: float, m_max: int, ef_construction: int,
                 seeds: np.ndarray, edge_off: np.ndarray, edge_tgt: np.ndarray):
        self.alpha_built = alpha_built
        self.m_max = m_max
        self.ef_construction = ef_construction
        self.seeds = np.asarray(seeds, dtype=np.int64)
        self.edge_off = np.asarray(edge_off, dtype=np.int64)
        self.edge_tgt = np.asarray(edge_tgt, dtype=np.int32)
        # no ranges: the interval table is empty and never consulted
        self.ival_off = np.zeros(self.edge_tgt.shape[0] + 1, dtype=np.int64)
        self.ival_lo = np.zeros(0, dtype=np.float64)
        self.ival_hi = np.zeros(0, dtype=np.float64)

    @property
    def n(self) -> int:
        return int(self.edge_off.shape[0] - 1)

    def neighbor_targets(self, node: int) -> np.ndarray:
        return self.edge_tgt[self.edge_off[node]:self.edge_off[node + 1]]

    def degree(self, node: int) -> int:
        return int(self.edge_off[node + 1] - self.edge_off[node])


def _scalar_prune(dataset: HybridDataset, focal: int, cand: np.ndarray,
                  alpha: float, m_max: int) -> np.ndarray:
    """Strict triangle pruning of candidates around one node at a fixed weight."""
    de, ds = dataset.dist_pairs_to(
        dataset.e_vectors[focal], dataset.s_vectors[focal], cand
    )
    dist = alpha * de + (1.0 - alpha) * ds
    order = np.lexsort((cand, dist))
    cand, dist = cand[order], dist[order]
    sel, n_sel = _kernels.scalar_rng_prune(
        dataset.e_vectors[cand], dataset.s_vectors[cand], dist,
        float(dataset.e_max), float(dataset.s_max), float(alpha), int(m_max),
    )
    return cand[sel[:n_sel]]


def build_fusion_baseline(dataset: HybridDataset, alpha: float, m_max: int,
                          ef_construction: int) -> FixedGraph:
    """Incrementally build a static graph under the blended distance at one weight.

    Candidate acquisition is a plain greedy beam of size ``ef_construction``
    over the partial graph; edges come from strict triangle pruning on the
    scalar distance, with reverse edges re-pruned the same way.  Node 0 is the
    entry point.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if m_max < 1 or ef_construction < m_max:
        raise ValueError("need ef_construction >= m_max >= 1")
    n = dataset.n
    targets = np.zeros((n, m_max), dtype=np.int32)
    counts = np.zeros(n, dtype=np.int32)
    seeds = np.array([0], dtype=np.int64)

    for x in range(1, n):
        cand_ids, _ = _kernels.beam_search_build(
            dataset.e_vectors, dataset.s_vectors,
            float(dataset.e_max), float(dataset.s_max),
            targets, counts, seeds,
            dataset.e_vectors[x], dataset.s_vectors[x],
            float(alpha), int(ef_construction),
        )
        chosen = _scalar_prune(dataset, x, cand_ids.astype(np.int64), alpha, m_max)
        counts[x] = chosen.shape[0]
        targets[x, : chosen.shape[0]] = chosen
        for y in chosen:
            cand = np.append(targets[y, : counts[y]].astype(np.int64), np.int64(x))
            kept = _scalar_prune(dataset, int(y), cand, alpha, m_max)
            counts[y] = kept.shape[0]
            targets[y, : kept.shape[0]] = kept

    edge_off = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=edge_off[1:])
    edge_tgt = np.empty(int(edge_off[-1]), dtype=np.int32)
    for node in range(n):
        edge_tgt[edge_off[node]:edge_off[node + 1]] = targets[node, : counts[node]]
    return FixedGraph(alpha, m_max, ef_construction, seeds, edge_off, edge_tgt)
