"""Hybrid vector search over bimodal data with per-edge active weight ranges.

One graph index answers weighted top-k queries for every blend weight
alpha in [0, 1]: each edge carries the set of weights at which it survives
triangle pruning, and search traverses only the edges active at the query's
weight.
"""

from .dataset import (
    DistPair,
    ExactDiameter,
    HybridDataset,
    HybridQuery,
    SampledDiameter,
    dist_pair,
    hybrid_dist,
    normalize_dataset,
)
from .intervals import IntervalSet
from .pareto import ParetoEntry, ParetoLayers, find_pf, gps
from .pruning import TrianglePair, drng_prune, prune_range, prune_range_one_sided
from .index import DegIndex, DynamicEdge, IndexMeta, build, load, save
from .search import SearchParams, SearchResult, SearchStats, search, search_fixed_graph
from .eval import (
    FixedGraph,
    GroundTruth,
    brute_force_topk,
    build_fusion_baseline,
    ground_truth_batch,
    qps,
    recall_at_k,
    rng_oracle,
)
from .synth import ALPHA_GRID, SynthSpec, generate, make_query_set

__version__ = "0.1.0"

__all__ = [
    "ALPHA_GRID",
    "DegIndex",
    "DistPair",
    "DynamicEdge",
    "ExactDiameter",
    "FixedGraph",
    "GroundTruth",
    "HybridDataset",
    "HybridQuery",
    "IndexMeta",
    "IntervalSet",
    "ParetoEntry",
    "ParetoLayers",
    "SampledDiameter",
    "SearchParams",
    "SearchResult",
    "SearchStats",
    "SynthSpec",
    "TrianglePair",
    "brute_force_topk",
    "build",
    "build_fusion_baseline",
    "dist_pair",
    "drng_prune",
    "find_pf",
    "generate",
    "gps",
    "ground_truth_batch",
    "hybrid_dist",
    "load",
    "make_query_set",
    "normalize_dataset",
    "prune_range",
    "prune_range_one_sided",
    "qps",
    "recall_at_k",
    "rng_oracle",
    "save",
    "search",
    "search_fixed_graph",
]
