"""Numba kernels for the hot paths: layering, pruning sweeps, beam search.

Vectors arrive as float32 rows; every distance is accumulated in float64.
These kernels are the single implementation route for their operations; the
public wrappers in :mod:`deg.pareto`, :mod:`deg.pruning` and
:mod:`deg.search` only adapt argument and result types.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INF = np.inf


@njit(cache=True, inline="always")
def _pair_dist(rows, i, j):
    acc = 0.0
    for c in range(rows.shape[1]):
        diff = np.float64(rows[i, c]) - np.float64(rows[j, c])
        acc += diff * diff
    return np.sqrt(acc)


@njit(cache=True, inline="always")
def _point_dist(rows, i, q):
    acc = 0.0
    for c in range(rows.shape[1]):
        diff = np.float64(rows[i, c]) - np.float64(q[c])
        acc += diff * diff
    return np.sqrt(acc)


# ---------------------------------------------------------------------------
# Pareto layering
# ---------------------------------------------------------------------------

@njit(cache=True)
def pareto_layer_sweep(de_sorted):
    """Layer ids for entries pre-sorted by (ds asc, de asc, id asc).

    Repeatedly sweeps the remaining entries, keeping each whose de strictly
    undercuts the smallest de seen so far in the current layer.
    """
    n = de_sorted.shape[0]
    layer = np.full(n, -1, np.int64)
    remaining = np.empty(n, np.int64)
    scratch = np.empty(n, np.int64)
    for i in range(n):
        remaining[i] = i
    nrem = n
    lay = 0
    while nrem > 0:
        prev = INF
        nnew = 0
        for i in range(nrem):
            idx = remaining[i]
            if de_sorted[idx] < prev:
                layer[idx] = lay
                prev = de_sorted[idx]
            else:
                scratch[nnew] = idx
                nnew += 1
        tmp = remaining
        remaining = scratch
        scratch = tmp
        nrem = nnew
        lay += 1
    return layer


# ---------------------------------------------------------------------------
# Dynamic pruning sweep
# ---------------------------------------------------------------------------

@njit(cache=True, inline="always")
def _one_sided_case(de_xy, ds_xy, de_xz, ds_xz, eps):
    """One linear pruning inequality -> (lo, hi, empty) over alpha in [0, 1]."""
    rhs = ds_xy - ds_xz
    coef = de_xz - de_xy + rhs
    if abs(rhs) < eps:
        rhs = 0.0
    if abs(coef) < eps:
        coef = 0.0
    if rhs > 0.0:
        if coef > 0.0:
            r = rhs / coef
            if r > 1.0:
                r = 1.0
            return 0.0, r, False
        return 0.0, 1.0, False
    if rhs < 0.0:
        if coef >= 0.0:
            return 0.0, 0.0, True
        r = rhs / coef
        if r > 1.0:
            r = 1.0
        return r, 1.0, False
    if coef < 0.0:
        return 0.0, 1.0, False
    return 0.0, 0.0, True


@njit(cache=True)
def drng_sweep(e_rows, s_rows, de, ds, e_max, s_max, m_max, th, eps):
    """Dynamic edge pruning over candidates in layered sweep order.

    ``e_rows``/``s_rows`` are the candidates' raw vectors; ``de``/``ds`` their
    normalized distances to the focal node.  Returns selected positions, the
    selection count, and each selected edge's active-range intervals
    (``bounds[i, :counts[i]]``).
    """
    k = de.shape[0]
    cap = m_max if m_max < k else k
    sel_pos = np.empty(cap, np.int64)
    n_sel = 0
    bounds = np.zeros((cap, cap + 1, 2), np.float64)
    counts = np.zeros(cap, np.int64)

    plo = np.empty(cap, np.float64)
    phi = np.empty(cap, np.float64)

    for x in range(k):
        if n_sel >= m_max:
            break
        # pruning intervals of candidate x against every selected neighbor
        npr = 0
        for t in range(n_sel):
            y = sel_pos[t]
            lo1, hi1, empty1 = _one_sided_case(de[x], ds[x], de[y], ds[y], eps)
            if empty1:
                continue
            de_pair = _pair_dist(e_rows, x, y) / e_max
            ds_pair = _pair_dist(s_rows, x, y) / s_max
            lo2, hi2, empty2 = _one_sided_case(de[x], ds[x], de_pair, ds_pair, eps)
            if empty2:
                continue
            lo = lo1 if lo1 > lo2 else lo2
            hi = hi1 if hi1 < hi2 else hi2
            if lo <= hi:
                plo[npr] = lo
                phi[npr] = hi
                npr += 1
        # sort intervals by lower bound (insertion sort; npr <= m_max)
        for a in range(1, npr):
            l = plo[a]
            h = phi[a]
            b = a - 1
            while b >= 0 and plo[b] > l:
                plo[b + 1] = plo[b]
                phi[b + 1] = phi[b]
                b -= 1
            plo[b + 1] = l
            phi[b + 1] = h
        # merge touching/overlapping
        nm = 0
        for a in range(npr):
            if nm > 0 and plo[a] <= phi[nm - 1]:
                if phi[a] > phi[nm - 1]:
                    phi[nm - 1] = phi[a]
            else:
                plo[nm] = plo[a]
                phi[nm] = phi[a]
                nm += 1
        # closed complement within [0, 1]: drop zero-width gaps and merge
        # segments that touch across a removed single point
        nc = 0
        cursor = 0.0
        for a in range(nm):
            if plo[a] > cursor:
                if nc > 0 and bounds[n_sel, nc - 1, 1] == cursor:
                    bounds[n_sel, nc - 1, 1] = plo[a]
                else:
                    bounds[n_sel, nc, 0] = cursor
                    bounds[n_sel, nc, 1] = plo[a]
                    nc += 1
            if phi[a] > cursor:
                cursor = phi[a]
        if cursor < 1.0:
            if nc > 0 and bounds[n_sel, nc - 1, 1] == cursor:
                bounds[n_sel, nc - 1, 1] = 1.0
            else:
                bounds[n_sel, nc, 0] = cursor
                bounds[n_sel, nc, 1] = 1.0
                nc += 1
        meas = 0.0
        for a in range(nc):
            meas += bounds[n_sel, a, 1] - bounds[n_sel, a, 0]
        if meas >= th:
            sel_pos[n_sel] = x
            counts[n_sel] = nc
            n_sel += 1
    return sel_pos, n_sel, bounds, counts


# ---------------------------------------------------------------------------
# Heap primitives (min-heaps; max-heaps store negated keys)
# ---------------------------------------------------------------------------

@njit(cache=True, inline="always")
def _heap_push(keys, ids, n, key, ident):
    i = n
    keys[i] = key
    ids[i] = ident
    while i > 0:
        p = (i - 1) >> 1
        if keys[p] <= keys[i]:
            break
        keys[p], keys[i] = keys[i], keys[p]
        ids[p], ids[i] = ids[i], ids[p]
        i = p
    return n + 1


@njit(cache=True, inline="always")
def _heap_pop(keys, ids, n):
    key = keys[0]
    ident = ids[0]
    n -= 1
    keys[0] = keys[n]
    ids[0] = ids[n]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= n:
            break
        c = l
        r = l + 1
        if r < n and keys[r] < keys[l]:
            c = r
        if keys[i] <= keys[c]:
            break
        keys[i], keys[c] = keys[c], keys[i]
        ids[i], ids[c] = ids[c], ids[i]
        i = c
    return key, ident, n


# ---------------------------------------------------------------------------
# Greedy beam search
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def beam_search(e_vecs, s_vecs, e_max, s_max,
                edge_off, edge_tgt, ival_off, ival_lo, ival_hi,
                seeds, q_e, q_s, alpha, k, ef,
                use_ranges, early_stop, e_first):
    """Greedy beam search with range skipping and the partial-distance bound.

    Returns (ids, dists, count, full_evals, partial_evals, popped, skipped);
    ids/dists hold the k best ascending by (distance, id).
    """
    n = e_vecs.shape[0]
    visited = np.zeros(n, np.uint8)

    s_keys = np.empty(n + 1, np.float64)
    s_ids = np.empty(n + 1, np.int64)
    s_n = 0
    # result heap: max-heap via negated keys
    r_keys = np.empty(ef + 1, np.float64)
    r_ids = np.empty(ef + 1, np.int64)
    r_n = 0

    full_evals = 0
    partial_evals = 0
    popped = 0
    skipped = 0

    beta = 1.0 - alpha
    for si in range(seeds.shape[0]):
        v = seeds[si]
        if visited[v]:
            continue
        visited[v] = 1
        de = _point_dist(e_vecs, v, q_e) / e_max
        ds = _point_dist(s_vecs, v, q_s) / s_max
        dist = alpha * de + beta * ds
        full_evals += 1
        s_n = _heap_push(s_keys, s_ids, s_n, dist, v)
        r_n = _heap_push(r_keys, r_ids, r_n, -dist, v)
        if r_n > ef:
            _, _, r_n = _heap_pop(r_keys, r_ids, r_n)

    while s_n > 0:
        dist, v, s_n = _heap_pop(s_keys, s_ids, s_n)
        popped += 1
        if r_n > 0 and dist > -r_keys[0]:
            break
        for eidx in range(edge_off[v], edge_off[v + 1]):
            if use_ranges:
                active = False
                for t in range(ival_off[eidx], ival_off[eidx + 1]):
                    if ival_lo[t] <= alpha <= ival_hi[t]:
                        active = True
                        break
                if not active:
                    skipped += 1
                    continue
            u = edge_tgt[eidx]
            if visited[u]:
                continue
            visited[u] = 1
            r_full = r_n >= ef
            bound = -r_keys[0] if r_n > 0 else INF
            if e_first:
                de = _point_dist(e_vecs, u, q_e) / e_max
                part = alpha * de
            else:
                ds = _point_dist(s_vecs, u, q_s) / s_max
                part = beta * ds
            if early_stop and r_full and part >= bound:
                partial_evals += 1
                continue
            if e_first:
                ds = _point_dist(s_vecs, u, q_s) / s_max
            else:
                de = _point_dist(e_vecs, u, q_e) / e_max
            full_evals += 1
            dist_u = alpha * de + beta * ds
            if (not r_full) or dist_u < bound:
                s_n = _heap_push(s_keys, s_ids, s_n, dist_u, u)
                r_n = _heap_push(r_keys, r_ids, r_n, -dist_u, u)
                if r_n > ef:
                    _, _, r_n = _heap_pop(r_keys, r_ids, r_n)

    # extract the k best ascending by (distance, id)
    out_n = k if k < r_n else r_n
    res_d = np.empty(r_n, np.float64)
    res_i = np.empty(r_n, np.int64)
    for a in range(r_n):
        res_d[a] = -r_keys[a]
        res_i[a] = r_ids[a]
    for a in range(1, r_n):
        kd = res_d[a]
        ki = res_i[a]
        b = a - 1
        while b >= 0 and (res_d[b] > kd or (res_d[b] == kd and res_i[b] > ki)):
            res_d[b + 1] = res_d[b]
            res_i[b + 1] = res_i[b]
            b -= 1
        res_d[b + 1] = kd
        res_i[b + 1] = ki
    return (res_i[:out_n], res_d[:out_n], out_n,
            full_evals, partial_evals, popped, skipped)


@njit(cache=True)
def beam_search_build(e_vecs, s_vecs, e_max, s_max,
                      adj_targets, adj_counts,
                      seeds, q_e, q_s, alpha, ef):
    """Scalar beam over a mutable fixed-width adjacency; serves graph builds.

    Returns all beam entries sorted ascending by (distance, id).
    """
    n = e_vecs.shape[0]
    visited = np.zeros(n, np.uint8)
    s_keys = np.empty(n + 1, np.float64)
    s_ids = np.empty(n + 1, np.int64)
    s_n = 0
    r_keys = np.empty(ef + 1, np.float64)
    r_ids = np.empty(ef + 1, np.int64)
    r_n = 0
    beta = 1.0 - alpha

    for si in range(seeds.shape[0]):
        v = seeds[si]
        if visited[v]:
            continue
        visited[v] = 1
        de = _point_dist(e_vecs, v, q_e) / e_max
        ds = _point_dist(s_vecs, v, q_s) / s_max
        dist = alpha * de + beta * ds
        s_n = _heap_push(s_keys, s_ids, s_n, dist, v)
        r_n = _heap_push(r_keys, r_ids, r_n, -dist, v)
        if r_n > ef:
            _, _, r_n = _heap_pop(r_keys, r_ids, r_n)

    while s_n > 0:
        dist, v, s_n = _heap_pop(s_keys, s_ids, s_n)
        if r_n > 0 and dist > -r_keys[0]:
            break
        for t in range(adj_counts[v]):
            u = adj_targets[v, t]
            if visited[u]:
                continue
            visited[u] = 1
            de = _point_dist(e_vecs, u, q_e) / e_max
            ds = _point_dist(s_vecs, u, q_s) / s_max
            dist_u = alpha * de + beta * ds
            bound = -r_keys[0] if r_n > 0 else INF
            if r_n < ef or dist_u < bound:
                s_n = _heap_push(s_keys, s_ids, s_n, dist_u, u)
                r_n = _heap_push(r_keys, r_ids, r_n, -dist_u, u)
                if r_n > ef:
                    _, _, r_n = _heap_pop(r_keys, r_ids, r_n)

    res_d = np.empty(r_n, np.float64)
    res_i = np.empty(r_n, np.int64)
    for a in range(r_n):
        res_d[a] = -r_keys[a]
        res_i[a] = r_ids[a]
    for a in range(1, r_n):
        kd = res_d[a]
        ki = res_i[a]
        b = a - 1
        while b >= 0 and (res_d[b] > kd or (res_d[b] == kd and res_i[b] > ki)):
            res_d[b + 1] = res_d[b]
            res_i[b + 1] = res_i[b]
            b -= 1
        res_d[b + 1] = kd
        res_i[b + 1] = ki
    return res_i, res_d


@njit(cache=True)
def scalar_rng_prune(e_rows, s_rows, dists, e_max, s_max, alpha, m_max):
    """Classic strict triangle pruning at one fixed alpha.

    Candidates must arrive sorted ascending by (dist, id); a candidate is
    dropped iff some already-selected neighbor is strictly closer to both the
    focal node and the candidate.
    """
    k = dists.shape[0]
    cap = m_max if m_max < k else k
    sel = np.empty(cap, np.int64)
    n_sel = 0
    beta = 1.0 - alpha
    for x in range(k):
        if n_sel >= m_max:
            break
        keep = True
        for t in range(n_sel):
            y = sel[t]
            if dists[y] < dists[x]:
                de_pair = _pair_dist(e_rows, x, y) / e_max
                ds_pair = _pair_dist(s_rows, x, y) / s_max
                if alpha * de_pair + beta * ds_pair < dists[x]:
                    keep = False
                    break
        if keep:
            sel[n_sel] = x
            n_sel += 1
    return sel[:n_sel], n_sel
