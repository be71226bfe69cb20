"""Synthetic bimodal datasets and query files, fully seed-deterministic.

Cluster mode draws one cluster assignment per modality; with correlation rho
the second modality reuses the first assignment with probability rho and draws
independently otherwise, so the agreement rate is rho + (1 - rho)/c.  Negative
rho forces disagreement with probability |rho| instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .dataset import HybridDataset, normalize_dataset
from .io import write_hqry

__all__ = ["SynthSpec", "generate", "make_query_set", "ALPHA_GRID"]

# Weight grid shared by the oracle suites: 21 evenly spaced points.
ALPHA_GRID = np.round(np.linspace(0.0, 1.0, 21), 10)


@dataclass(frozen=True)
class SynthSpec:
    n: int = 5_000
    d: int = 32
    m: int = 4
    distribution: str = "clusters"  # "uniform" or "clusters"
    clusters: int = 20
    sigma: float = 0.05
    rho: float = 0.5
    seed: int = 0
    q_count: int = 1_000

    def __post_init__(self):
        if self.n < 1 or self.d < 1 or self.m < 1:
            raise ValueError("n, d, m must all be >= 1")
        if self.distribution not in ("uniform", "clusters"):
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.clusters < 1 or self.sigma <= 0.0:
            raise ValueError("need clusters >= 1 and sigma > 0")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho}")
        if self.q_count < 0:
            raise ValueError("q_count must be >= 0")


def _paired_assignments(rng: np.random.Generator, count: int, c: int,
                        rho: float) -> Tuple[np.ndarray, np.ndarray]:
    first = rng.integers(0, c, size=count)
    if rho >= 0.0:
        reuse = rng.random(count) < rho
        independent = rng.integers(0, c, size=count)
        second = np.where(reuse, first, independent)
    else:
        force_diff = rng.random(count) < -rho
        independent = rng.integers(0, c, size=count)
        shifted = (first + 1 + rng.integers(0, max(c - 1, 1), size=count)) % c
        second = np.where(force_diff, shifted, independent)
    return first, second


def _cluster_points(rng: np.random.Generator, assign: np.ndarray,
                    centers: np.ndarray, sigma: float) -> np.ndarray:
    noise = rng.normal(0.0, sigma, size=(assign.shape[0], centers.shape[1]))
    return centers[assign] + noise


def generate(spec: SynthSpec) -> Tuple[HybridDataset, np.ndarray, np.ndarray]:
    """Dataset plus held-out query vectors drawn from the same process."""
    rng = np.random.default_rng(spec.seed)
    if spec.distribution == "uniform":
        e = rng.uniform(0.0, 1.0, size=(spec.n, spec.d))
        s = rng.uniform(0.0, 1.0, size=(spec.n, spec.m))
        qe = rng.uniform(0.0, 1.0, size=(spec.q_count, spec.d))
        qs = rng.uniform(0.0, 1.0, size=(spec.q_count, spec.m))
    else:
        centers_e = rng.uniform(0.0, 1.0, size=(spec.clusters, spec.d))
        centers_s = rng.uniform(0.0, 1.0, size=(spec.clusters, spec.m))
        a_e, a_s = _paired_assignments(rng, spec.n, spec.clusters, spec.rho)
        e = _cluster_points(rng, a_e, centers_e, spec.sigma)
        s = _cluster_points(rng, a_s, centers_s, spec.sigma)
        q_e, q_s = _paired_assignments(rng, spec.q_count, spec.clusters, spec.rho)
        qe = _cluster_points(rng, q_e, centers_e, spec.sigma)
        qs = _cluster_points(rng, q_s, centers_s, spec.sigma)
    dataset = normalize_dataset(
        e.astype(np.float32), s.astype(np.float32)
    )
    return dataset, qe.astype(np.float32), qs.astype(np.float32)


def modal_assignments(spec: SynthSpec) -> Tuple[np.ndarray, np.ndarray]:
    """The per-object cluster ids the generator would draw (cluster mode only)."""
    if spec.distribution != "clusters":
        raise ValueError("assignments exist only for the clusters distribution")
    rng = np.random.default_rng(spec.seed)
    rng.uniform(0.0, 1.0, size=(spec.clusters, spec.d))
    rng.uniform(0.0, 1.0, size=(spec.clusters, spec.m))
    return _paired_assignments(rng, spec.n, spec.clusters, spec.rho)


def make_query_set(path, e_queries: np.ndarray, s_queries: np.ndarray,
                   scheme: str, k: int, seed: int = 0) -> int:
    """Pair query vectors with weights and write an HQRY file.

    Schemes: ``grid`` repeats every query at each of the 21 grid weights;
    ``interval:LO:HI`` draws one uniform weight per query; ``fixed:A`` uses a
    constant.  Returns the number of rows written.
    """
    q = e_queries.shape[0]
    if s_queries.shape[0] != q:
        raise ValueError("query modalities disagree on row count")
    parts = scheme.split(":")
    kind = parts[0]
    if kind == "grid":
        if len(parts) != 1:
            raise ValueError(f"malformed scheme {scheme!r}")
        reps = ALPHA_GRID.shape[0]
        e_out = np.repeat(e_queries, reps, axis=0)
        s_out = np.repeat(s_queries, reps, axis=0)
        alphas = np.tile(ALPHA_GRID, q)
    elif kind == "interval":
        if len(parts) != 3:
            raise ValueError(f"malformed scheme {scheme!r}")
        lo, hi = float(parts[1]), float(parts[2])
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError(f"interval [{lo}, {hi}] must sit inside [0, 1]")
        rng = np.random.default_rng(seed)
        e_out, s_out = e_queries, s_queries
        alphas = rng.uniform(lo, hi, size=q)
    elif kind == "fixed":
        if len(parts) != 2:
            raise ValueError(f"malformed scheme {scheme!r}")
        alpha = float(parts[1])
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"fixed alpha {alpha} must lie in [0, 1]")
        e_out, s_out = e_queries, s_queries
        alphas = np.full(q, alpha)
    else:
        raise ValueError(f"unknown weight scheme {kind!r}")
    write_hqry(path, e_out, s_out, alphas, k)
    return int(alphas.shape[0])
