"""Command-line front end: synth, build, gt, search, bench, verify.

Every command validates file magics and parameter ranges, exits 0 on success,
and on the first failure prints a machine-readable JSON error to stderr and
exits nonzero.  Commands that write artifacts drop a ``<out>.run.json``
sidecar recording parameters, input/output content hashes, and timings.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .dataset import (
    ExactDiameter,
    HybridDataset,
    HybridQuery,
    SampledDiameter,
    normalize_dataset,
)
from .eval import build_fusion_baseline, ground_truth_batch, recall_at_k
from .index import DEFAULT_EF_CONSTRUCTION, DEFAULT_M, DEFAULT_TH, build, load, save
from .io import read_hgt, read_hqry, read_hvec, write_hgt, write_hvec
from .search import SearchParams, search, search_fixed_graph
from .synth import SynthSpec, generate, make_query_set
from .verify import SUITES, run_suites

BENCH_COLUMNS = [
    "alpha_lo", "alpha_hi", "ef_search", "recall_at_k", "qps",
    "full_evals", "partial_evals", "nodes_popped", "edges_skipped",
]

ALPHA_INTERVALS = [(0.0, 0.2), (0.2, 0.4), (0.4, 0.6), (0.6, 0.8), (0.8, 1.0)]


class CliError(Exception):
    pass


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_run_record(out_path, command: str, params: dict, inputs: dict,
                      outputs: dict, seconds: float, metrics: dict | None = None) -> None:
    record = {
        "command": command,
        "parameters": {k: v for k, v in params.items()
                       if k != "func" and not callable(v)},
        "inputs": {str(k): _sha256(v) for k, v in inputs.items()},
        "outputs": {str(k): _sha256(v) for k, v in outputs.items()},
        "elapsed_seconds": round(seconds, 3),
        "metrics": metrics or {},
    }
    with open(str(out_path) + ".run.json", "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_dataset(e_path, s_path, e_max: float, s_max: float,
                  norm_margin: float) -> HybridDataset:
    """Rehydrate a dataset from HVEC files with diameters taken from index meta."""
    return HybridDataset(read_hvec(e_path), read_hvec(s_path),
                         e_max=e_max, s_max=s_max, norm_margin=norm_margin)


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

def cmd_synth(args) -> int:
    spec = SynthSpec(
        n=args.n, d=args.d, m=args.m, distribution=args.dist,
        clusters=args.clusters, sigma=args.sigma, rho=args.rho,
        seed=args.seed, q_count=args.queries,
    )
    t0 = time.perf_counter()
    dataset, q_e, q_s = generate(spec)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    e_path = f"{prefix}.e.hvec"
    s_path = f"{prefix}.s.hvec"
    q_path = f"{prefix}.hqry"
    write_hvec(e_path, dataset.e_vectors)
    write_hvec(s_path, dataset.s_vectors)
    rows = make_query_set(q_path, q_e, q_s, args.alpha_scheme, args.k, seed=spec.seed)
    _write_run_record(
        str(prefix), "synth", vars(args) | {"query_rows": rows}, {},
        {"e": e_path, "s": s_path, "queries": q_path}, time.perf_counter() - t0,
    )
    print(f"wrote {e_path}, {s_path}, {q_path} ({rows} query rows)")
    return 0


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------

def _parse_norm(text: str):
    if text == "exact":
        return ExactDiameter()
    if text == "sample":
        return SampledDiameter()
    if text.startswith("sample:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise CliError(f"bad --norm value {text!r}; use sample:PAIRS:MARGIN")
        return SampledDiameter(pairs=int(parts[1]), margin=float(parts[2]))
    raise CliError(f"bad --norm value {text!r}")


def _parse_order(text: str, n: int):
    if text == "dataset":
        return None
    if text.startswith("shuffle:"):
        seed = int(text.split(":", 1)[1])
        return np.random.default_rng(seed).permutation(n)
    raise CliError(f"bad --order value {text!r}; use dataset or shuffle:SEED")


def cmd_build(args) -> int:
    t0 = time.perf_counter()
    e = read_hvec(args.e)
    s = read_hvec(args.s)
    dataset = normalize_dataset(e, s, _parse_norm(args.norm) if args.norm else None)
    order = _parse_order(args.order, dataset.n)
    index = build(dataset, m_max=args.m_max, ef_construction=args.ef_construction,
                  th=args.th, order=order)
    save(index, args.out)
    elapsed = time.perf_counter() - t0
    _write_run_record(
        args.out, "build",
        {"M": args.m_max, "ef_construction": args.ef_construction, "th": args.th,
         "norm": args.norm or "auto", "order": args.order,
         "e_max": dataset.e_max, "s_max": dataset.s_max},
        {"e": args.e, "s": args.s}, {"index": args.out}, elapsed,
        {"n": index.n, "edges": index.num_edges, "seeds": int(index.seeds.size)},
    )
    print(f"built index over {index.n} objects: {index.num_edges} edges, "
          f"{index.seeds.size} seeds, {elapsed:.1f}s -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# gt
# ---------------------------------------------------------------------------

def cmd_gt(args) -> int:
    t0 = time.perf_counter()
    e = read_hvec(args.e)
    s = read_hvec(args.s)
    dataset = normalize_dataset(e, s)
    q_e, q_s, alphas, _k = read_hqry(args.queries)
    truth = ground_truth_batch(dataset, q_e, q_s, alphas, args.k_prime)
    write_hgt(args.out, truth.ids, truth.dists)
    _write_run_record(
        args.out, "gt", {"k_prime": args.k_prime},
        {"e": args.e, "s": args.s, "queries": args.queries},
        {"gt": args.out}, time.perf_counter() - t0,
    )
    print(f"wrote exact top-{args.k_prime} for {len(truth)} queries -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

def cmd_search(args) -> int:
    index = load(args.index)
    dataset = _load_dataset(args.e, args.s, index.meta.e_max, index.meta.s_max,
                            index.meta.norm_margin)
    q_e, q_s, alphas, file_k = read_hqry(args.queries)
    k = args.k or file_k
    params = SearchParams(ef_search=args.ef_search, early_stop=not args.no_early_stop,
                          collect_stats=True)
    writer = csv.writer(open(args.out, "w", newline="") if args.out else sys.stdout)
    writer.writerow(["query", "rank", "id", "dist"])
    totals = np.zeros(4, dtype=np.int64)
    t0 = time.perf_counter()
    for i in range(q_e.shape[0]):
        q = HybridQuery(q_e[i], q_s[i], float(alphas[i]), k)
        res = search(index, dataset, q, params)
        for rank, (ident, dist) in enumerate(res):
            writer.writerow([i, rank, ident, f"{dist:.9f}"])
        st = res.stats
        totals += (st.distance_evals_full, st.distance_evals_partial,
                   st.nodes_popped, st.edges_skipped_by_range)
    elapsed = time.perf_counter() - t0
    if args.stats:
        print(
            f"# queries={q_e.shape[0]} qps={q_e.shape[0] / elapsed:.1f} "
            f"full_evals={totals[0]} partial_evals={totals[1]} "
            f"nodes_popped={totals[2]} edges_skipped={totals[3]}",
            file=sys.stderr,
        )
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def _parse_sweep(text: str) -> list[int]:
    try:
        lo, hi, step = (int(p) for p in text.split(":"))
    except ValueError as exc:
        raise CliError(f"bad sweep {text!r}; use LO:HI:STEP") from exc
    if lo < 1 or hi < lo or step < 1:
        raise CliError(f"bad sweep {text!r}")
    return list(range(lo, hi + 1, step))


def _bucket_queries(alphas: np.ndarray) -> list[np.ndarray]:
    buckets = []
    for lo, hi in ALPHA_INTERVALS:
        if hi < 1.0:
            mask = (alphas >= lo) & (alphas < hi)
        else:
            mask = (alphas >= lo) & (alphas <= hi)
        buckets.append(np.flatnonzero(mask))
    return buckets


def _bench_rows(runner, dataset, q_e, q_s, alphas, gt_ids, k, sweep, threads):
    rows = []
    buckets = _bucket_queries(alphas)
    for ef in sweep:
        params = SearchParams(ef_search=ef, collect_stats=True)
        for (lo, hi), idxs in zip(ALPHA_INTERVALS, buckets):
            if idxs.size == 0:
                continue
            queries = [
                HybridQuery(q_e[i], q_s[i], float(alphas[i]), k) for i in idxs
            ]

            def one(q):
                return runner(dataset, q, params)

            t0 = time.perf_counter()
            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    results = list(pool.map(one, queries))
            else:
                results = [one(q) for q in queries]
            elapsed = time.perf_counter() - t0
            qps_val = len(queries) / (elapsed * threads)
            rec = float(np.mean([
                recall_at_k(res.ids, gt_ids[i], k) for res, i in zip(results, idxs)
            ]))
            stat = np.mean(
                [[r.stats.distance_evals_full, r.stats.distance_evals_partial,
                  r.stats.nodes_popped, r.stats.edges_skipped_by_range]
                 for r in results], axis=0)
            rows.append([lo, hi, ef, f"{rec:.6f}", f"{qps_val:.1f}",
                         f"{stat[0]:.1f}", f"{stat[1]:.1f}", f"{stat[2]:.1f}",
                         f"{stat[3]:.1f}"])
    return rows


def cmd_bench(args) -> int:
    t0 = time.perf_counter()
    index = load(args.index)
    dataset = _load_dataset(args.e, args.s, index.meta.e_max, index.meta.s_max,
                            index.meta.norm_margin)
    q_e, q_s, alphas, _ = read_hqry(args.queries)
    gt_ids, _gt_dists = read_hgt(args.gt)
    if gt_ids.shape[0] != q_e.shape[0]:
        raise CliError("ground truth and query files disagree on query count")
    if gt_ids.shape[1] < args.k:
        raise CliError(f"ground truth holds top-{gt_ids.shape[1]} < k={args.k}")
    sweep = _parse_sweep(args.ef_search_sweep)

    rows = _bench_rows(lambda d, q, p: search(index, d, q, p),
                       dataset, q_e, q_s, alphas, gt_ids, args.k, sweep, args.threads)
    out_fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(out_fh)
    writer.writerow(BENCH_COLUMNS)
    writer.writerows(rows)
    if args.out:
        out_fh.close()

    metrics = {"rows": len(rows)}
    if args.baseline != "none":
        kind, _, alpha_text = args.baseline.partition(":")
        if kind != "fusion" or not alpha_text:
            raise CliError(f"bad --baseline {args.baseline!r}; use none or fusion:ALPHA")
        fixed_alpha = float(alpha_text)
        baseline = build_fusion_baseline(
            dataset, fixed_alpha, index.meta.m_max, index.meta.ef_construction
        )
        base_rows = _bench_rows(
            lambda d, q, p: search_fixed_graph(baseline, d, q, p),
            dataset, q_e, q_s, alphas, gt_ids, args.k, sweep, args.threads)
        base_path = args.baseline_out or (
            (args.out or "baseline") + ".baseline.csv"
        )
        with open(base_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(BENCH_COLUMNS)
            w.writerows(base_rows)
        metrics["baseline_rows"] = len(base_rows)
        print(f"baseline rows -> {base_path}", file=sys.stderr)

    if args.out:
        _write_run_record(
            args.out, "bench",
            {"k": args.k, "sweep": args.ef_search_sweep, "baseline": args.baseline,
             "threads": args.threads, "index_hash": _sha256(args.index)},
            {"index": args.index, "e": args.e, "s": args.s,
             "queries": args.queries, "gt": args.gt},
            {"csv": args.out}, time.perf_counter() - t0, metrics,
        )
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names, n=args.n, seed=args.seed)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: {r.detail}")
        failed += 0 if r.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deg",
        description="Hybrid vector search: build, query, and benchmark a "
                    "dynamic-edge graph index over bimodal vector data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset and query file")
    p.add_argument("--n", type=int, default=5_000)
    p.add_argument("--d", type=int, default=32)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--dist", choices=["uniform", "clusters"], default="clusters")
    p.add_argument("--clusters", type=int, default=20)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--queries", type=int, default=1_000)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--alpha-scheme", default="grid",
                   help="grid | interval:LO:HI | fixed:A")
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("build", help="build an index from HVEC files")
    p.add_argument("--e", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--M", dest="m_max", type=int, default=DEFAULT_M)
    p.add_argument("--ef-construction", type=int, default=DEFAULT_EF_CONSTRUCTION)
    p.add_argument("--th", type=float, default=DEFAULT_TH)
    p.add_argument("--norm", default=None, help="exact | sample[:PAIRS:MARGIN]")
    p.add_argument("--order", default="dataset", help="dataset | shuffle:SEED")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("gt", help="write exact ground truth for a query file")
    p.add_argument("--e", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k-prime", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gt)

    p = sub.add_parser("search", help="run queries against an index")
    p.add_argument("--index", required=True)
    p.add_argument("--e", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=int, default=None,
                   help="default: the k recorded in the query file")
    p.add_argument("--ef-search", type=int, default=50)
    p.add_argument("--no-early-stop", action="store_true")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bench", help="recall/QPS sweep, CSV out")
    p.add_argument("--index", required=True)
    p.add_argument("--e", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--ef-search-sweep", default="10:200:10")
    p.add_argument("--baseline", default="none", help="none | fusion:ALPHA")
    p.add_argument("--baseline-out", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run the oracle suites")
    p.add_argument("--suite", default="all", choices=sorted(SUITES) + ["all"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, OSError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
