"""Pure-Python kernel backend (numpy/scipy).

Mirrors the signatures of the compiled ``_kernels`` module so callers can
swap backends without branching.  Arrays are int64 throughout; ``INF``
marks unreachable.
"""

from __future__ import annotations

import heapq

import numpy as np

INF: int = 2 ** 62

try:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import dijkstra as _sp_dijkstra

    _HAVE_SCIPY = True
except ImportError:  # pragma: no cover - scipy is a hard dependency in practice
    _HAVE_SCIPY = False


def _dijkstra_heapq(n, indptr, indices, weights, source):
    dist = [INF] * n
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, node = heapq.heappop(heap)
        if d > dist[node]:
            continue
        for e in range(indptr[node], indptr[node + 1]):
            nxt = indices[e]
            nd = d + weights[e]
            if nd < dist[nxt]:
                dist[nxt] = nd
                heapq.heappush(heap, (nd, nxt))
    return dist


def shortest_path_rows(n: int, indptr, indices, weights, sources) -> np.ndarray:
    """Row-wise shortest path costs from each source over a CSR digraph.

    Float64 holds every reachable cost exactly (integer weights, totals far
    below 2**53), so the scipy path rounds back to int64 losslessly.
    Explicitly stored zero-weight edges are honored by csgraph.
    """
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.int64)
    sources = np.asarray(sources, dtype=np.int64)
    if _HAVE_SCIPY and indices.size:
        g = csr_matrix(
            (weights.astype(np.float64), indices.astype(np.int32), indptr.astype(np.int32)),
            shape=(n, n),
        )
        dist = _sp_dijkstra(g, directed=True, indices=sources)
        return np.asarray(np.rint(np.where(np.isinf(dist), INF, dist)), dtype=np.int64)
    out = np.empty((len(sources), n), dtype=np.int64)
    ip = indptr.tolist()
    ix = indices.tolist()
    w = weights.tolist()
    for r, s in enumerate(sources.tolist()):
        out[r, :] = _dijkstra_heapq(n, ip, ix, w, s)
    return out


def min_access(access: np.ndarray, mask: np.ndarray, out: np.ndarray) -> None:
    """out[u] = min over stops v with mask[v] of access[u, v]; INF if none."""
    cols = np.flatnonzero(mask)
    if cols.size == 0:
        out[:] = INF
    else:
        np.min(access[:, cols], axis=1, out=out)


# Padded candidate matrices, rebuilt only when the CSR arrays change.  The
# strong reference inside the cache entry pins the buffers, so the address
# key cannot alias a different live array.
_pad_cache: dict = {}


def _padded(cand_ptr, cand_idx, cand_d):
    key = (cand_ptr.ctypes.data, cand_idx.ctypes.data, cand_d.ctypes.data, len(cand_ptr))
    hit = _pad_cache.get("entry")
    if hit is not None and hit[0] == key:
        return hit[1]
    n_u = len(cand_ptr) - 1
    counts = np.diff(cand_ptr)
    width = int(counts.max()) if n_u else 0
    pos_v = np.full((n_u, max(width, 1)), -1, dtype=np.int32)
    pos_d = np.full((n_u, max(width, 1)), INF, dtype=np.int64)
    for u in range(n_u):
        lo, hi = int(cand_ptr[u]), int(cand_ptr[u + 1])
        pos_v[u, : hi - lo] = cand_idx[lo:hi]
        pos_d[u, : hi - lo] = cand_d[lo:hi]
    entry = (pos_v, pos_d, pos_v >= 0, (cand_ptr, cand_idx, cand_d))
    _pad_cache["entry"] = (key, entry)
    return entry


def node_eval(cand_ptr, cand_idx, cand_d, out_mask, weights, pair_cap,
              best_d, best_stop, second_d):
    """Optimistic per-zone bests under a forced-out stop mask.

    Fills best_d (cheapest still-allowed candidate per zone), best_stop (its
    stop index; candidate order breaks ties) and second_d (cheapest allowed
    candidate at a different stop, INF if none).  Returns (status, payload):
    (0, bound) with bound = sum(weights * best_d) when every zone kept a
    candidate and the optimistic pairwise check passes, (1, zone_index) when
    a zone lost all candidates, (2, i * n_u + j) when pair (i, j) exceeds its
    cap already at the per-zone bests.
    """
    n_u = len(cand_ptr) - 1
    pos_v, pos_d, valid, _ = _padded(cand_ptr, cand_idx, cand_d)
    allowed = valid & (out_mask[pos_v] == 0)
    masked = np.where(allowed, pos_d, INF)
    rows = np.arange(n_u)
    # argmin lands on the earliest candidate slot, matching the (d, id) order
    first = masked.argmin(axis=1)
    b = masked[rows, first]
    starved = b >= INF
    if starved.any():
        return 1, int(np.argmax(starved))
    best_d[:n_u] = b
    best_stop[:n_u] = pos_v[rows, first]
    masked[rows, first] = INF
    second_d[:n_u] = masked.min(axis=1)
    lhs = b[:, None] + b[None, :]
    bad = lhs > pair_cap
    if bad.any():
        # symmetry puts the first row-major hit in the upper triangle
        flat = int(np.flatnonzero(bad.ravel())[0])
        return 2, flat
    bound = int(np.dot(weights[:n_u], b))
    return 0, bound
