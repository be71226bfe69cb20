"""Core data model: bimodal datasets, queries, and the weighted hybrid distance.

Every object carries two vectors, one in an embedding space of dimension ``d``
and one in a second modality of dimension ``m``.  Distances in each space are
Euclidean, normalized by per-modality diameters ``e_max`` / ``s_max``, and a
query blends them as ``alpha * de + (1 - alpha) * ds``.

Vectors are stored in float32; all distance arithmetic is float64.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

__all__ = [
    "DistPair",
    "ExactDiameter",
    "HybridDataset",
    "HybridQuery",
    "SampledDiameter",
    "dist_pair",
    "hybrid_dist",
    "normalize_dataset",
]

# Exact O(N^2) diameter scans are the default up to this size; beyond it the
# sampled estimator with a 5% safety margin takes over.
EXACT_DIAMETER_LIMIT = 20_000
DEFAULT_SAMPLE_PAIRS = 200_000
DEFAULT_SAMPLE_MARGIN = 0.05


@dataclass(frozen=True)
class ExactDiameter:
    """Exact max pairwise distance per modality (O(N^2), small N only)."""


@dataclass(frozen=True)
class SampledDiameter:
    """Max distance over random pairs, inflated by ``1 + margin``."""

    pairs: int = DEFAULT_SAMPLE_PAIRS
    margin: float = DEFAULT_SAMPLE_MARGIN
    seed: int = 0


Estimator = Union[ExactDiameter, SampledDiameter]


@dataclass(frozen=True)
class DistPair:
    """The two normalized per-modality distances between a pair of points."""

    de: float
    ds: float

    def blend(self, alpha: float) -> float:
        return alpha * self.de + (1.0 - alpha) * self.ds


@dataclass(frozen=True)
class HybridQuery:
    """A weighted top-k query: two query vectors, a weight, a result count."""

    e: np.ndarray
    s: np.ndarray
    alpha: float
    k: int

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        object.__setattr__(self, "e", np.asarray(self.e, dtype=np.float32).reshape(-1))
        object.__setattr__(self, "s", np.asarray(self.s, dtype=np.float32).reshape(-1))


@dataclass(frozen=True)
class HybridDataset:
    """Two aligned float32 vector collections plus their normalization diameters."""

    e_vectors: np.ndarray
    s_vectors: np.ndarray
    e_max: float
    s_max: float
    norm_margin: float = 0.0

    def __post_init__(self):
        e = np.ascontiguousarray(self.e_vectors, dtype=np.float32)
        s = np.ascontiguousarray(self.s_vectors, dtype=np.float32)
        if e.ndim != 2 or s.ndim != 2:
            raise ValueError("vector collections must be 2-D (n, dim) arrays")
        if e.shape[0] != s.shape[0]:
            raise ValueError(
                f"modalities disagree on object count: {e.shape[0]} vs {s.shape[0]}"
            )
        if e.shape[0] < 1:
            raise ValueError("dataset must contain at least one object")
        if not (self.e_max > 0.0 and self.s_max > 0.0):
            raise ValueError("normalization diameters must be positive")
        object.__setattr__(self, "e_vectors", e)
        object.__setattr__(self, "s_vectors", s)
        self.e_vectors.setflags(write=False)
        self.s_vectors.setflags(write=False)

    @property
    def n(self) -> int:
        return self.e_vectors.shape[0]

    @property
    def d(self) -> int:
        return self.e_vectors.shape[1]

    @property
    def m(self) -> int:
        return self.s_vectors.shape[1]

    def dist_pairs_to(self, e_vec: np.ndarray, s_vec: np.ndarray,
                      ids: np.ndarray | None = None) -> Tuple[np.ndarray, np.ndarray]:
        """Normalized (de, ds) float64 arrays from one point to many objects."""
        if ids is None:
            e_rows, s_rows = self.e_vectors, self.s_vectors
        else:
            e_rows, s_rows = self.e_vectors[ids], self.s_vectors[ids]
        qe = np.asarray(e_vec, dtype=np.float32).astype(np.float64)
        qs = np.asarray(s_vec, dtype=np.float32).astype(np.float64)
        de = np.sqrt(((e_rows.astype(np.float64) - qe) ** 2).sum(axis=1)) / self.e_max
        ds = np.sqrt(((s_rows.astype(np.float64) - qs) ** 2).sum(axis=1)) / self.s_max
        return de, ds

    def centroid(self) -> Tuple[np.ndarray, np.ndarray]:
        """Component-wise mean of each modality over the whole dataset."""
        return (
            self.e_vectors.astype(np.float64).mean(axis=0),
            self.s_vectors.astype(np.float64).mean(axis=0),
        )


def _max_pairwise_distance(vectors: np.ndarray, block: int = 512) -> float:
    """Exact maximum Euclidean distance between any two rows, blockwise."""
    x = vectors.astype(np.float64)
    sq = (x * x).sum(axis=1)
    best = 0.0
    for start in range(0, x.shape[0], block):
        stop = min(start + block, x.shape[0])
        cross = x[start:stop] @ x.T
        d2 = sq[start:stop, None] + sq[None, :] - 2.0 * cross
        m = float(d2.max())
        if m > best:
            best = m
    return float(np.sqrt(max(best, 0.0)))


def _sampled_max_distance(vectors: np.ndarray, pairs: int, rng: np.random.Generator) -> float:
    n = vectors.shape[0]
    i = rng.integers(0, n, size=pairs)
    j = rng.integers(0, n, size=pairs)
    diff = vectors[i].astype(np.float64) - vectors[j].astype(np.float64)
    return float(np.sqrt((diff * diff).sum(axis=1).max()))


def normalize_dataset(e_vectors: np.ndarray, s_vectors: np.ndarray,
                      estimator: Estimator | None = None) -> HybridDataset:
    """Wrap raw vector collections into a dataset with diameter normalizers.

    ``estimator=None`` picks the exact scan for small collections and the
    sampled estimator above :data:`EXACT_DIAMETER_LIMIT` objects.  A modality
    whose estimated diameter is zero (all vectors identical) is rejected,
    since its normalized distance would be undefined.
    """
    e = np.ascontiguousarray(e_vectors, dtype=np.float32)
    s = np.ascontiguousarray(s_vectors, dtype=np.float32)
    if e.ndim != 2 or s.ndim != 2:
        raise ValueError("vector collections must be 2-D (n, dim) arrays")
    if e.shape[0] != s.shape[0]:
        raise ValueError(
            f"modalities disagree on object count: {e.shape[0]} vs {s.shape[0]}"
        )
    if e.shape[0] < 1:
        raise ValueError("cannot normalize an empty collection")

    if estimator is None:
        if e.shape[0] <= EXACT_DIAMETER_LIMIT:
            estimator = ExactDiameter()
        else:
            estimator = SampledDiameter()

    if isinstance(estimator, ExactDiameter):
        e_max = _max_pairwise_distance(e)
        s_max = _max_pairwise_distance(s)
        margin = 0.0
    elif isinstance(estimator, SampledDiameter):
        rng = np.random.default_rng(estimator.seed)
        e_max = _sampled_max_distance(e, estimator.pairs, rng) * (1.0 + estimator.margin)
        s_max = _sampled_max_distance(s, estimator.pairs, rng) * (1.0 + estimator.margin)
        margin = float(estimator.margin)
    else:
        raise TypeError(f"unknown estimator {estimator!r}")

    if e_max <= 0.0:
        raise ValueError("zero e-diameter: all embedding vectors are identical")
    if s_max <= 0.0:
        raise ValueError("zero s-diameter: all second-modality vectors are identical")
    return HybridDataset(e, s, e_max=e_max, s_max=s_max, norm_margin=margin)


def dist_pair(dataset: HybridDataset, a: Union[int, HybridQuery, Tuple[np.ndarray, np.ndarray]],
              b: int) -> DistPair:
    """Normalized (de, ds) between ``a`` (object id, query, or vector pair) and object ``b``."""
    if isinstance(a, (int, np.integer)):
        e_vec = dataset.e_vectors[int(a)]
        s_vec = dataset.s_vectors[int(a)]
    elif isinstance(a, HybridQuery):
        e_vec, s_vec = a.e, a.s
    else:
        e_vec, s_vec = a
    de, ds = dataset.dist_pairs_to(e_vec, s_vec, np.array([b], dtype=np.int64))
    return DistPair(float(de[0]), float(ds[0]))


def hybrid_dist(dataset: HybridDataset, query: HybridQuery, object_id: int) -> float:
    """The weighted hybrid distance ``alpha * de + (1 - alpha) * ds``."""
    return dist_pair(dataset, query, object_id).blend(query.alpha)
