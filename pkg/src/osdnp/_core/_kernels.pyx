# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend: typed Dijkstra, masked min-access, node bounds.

Same contract as ``pykernels``; see the docstrings there.  All arrays are
C-contiguous, times are int64, INF = 2**62 marks unreachable.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

INF = 2 ** 62

cdef long long C_INF = 2 ** 62


def shortest_path_rows(long long n, const long long[::1] indptr, const long long[::1] indices,
                       const long long[::1] weights, const long long[::1] sources):
    cdef Py_ssize_t n_src = sources.shape[0]
    out_arr = np.empty((n_src, n), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    cdef long long m = indices.shape[0]
    # each node is scanned at most once (nonnegative weights), so pushes <= m + 1
    cdef long long cap = m + n + 2
    heap_d_arr = np.empty(cap, dtype=np.int64)
    heap_v_arr = np.empty(cap, dtype=np.int64)
    dist_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] heap_d = heap_d_arr
    cdef long long[::1] heap_v = heap_v_arr
    cdef long long[::1] dist = dist_arr
    cdef Py_ssize_t r
    cdef long long s, size, node, d, e, nxt, nd, i, parent, child, td, tv
    for r in range(n_src):
        s = sources[r]
        for i in range(n):
            dist[i] = C_INF
        dist[s] = 0
        heap_d[0] = 0
        heap_v[0] = s
        size = 1
        while size > 0:
            d = heap_d[0]
            node = heap_v[0]
            size -= 1
            if size > 0:
                heap_d[0] = heap_d[size]
                heap_v[0] = heap_v[size]
                i = 0
                while True:
                    child = 2 * i + 1
                    if child >= size:
                        break
                    if child + 1 < size and heap_d[child + 1] < heap_d[child]:
                        child += 1
                    if heap_d[child] < heap_d[i]:
                        td = heap_d[i]; heap_d[i] = heap_d[child]; heap_d[child] = td
                        tv = heap_v[i]; heap_v[i] = heap_v[child]; heap_v[child] = tv
                        i = child
                    else:
                        break
            if d > dist[node]:
                continue
            for e in range(indptr[node], indptr[node + 1]):
                nxt = indices[e]
                nd = d + weights[e]
                if nd < dist[nxt]:
                    dist[nxt] = nd
                    i = size
                    heap_d[i] = nd
                    heap_v[i] = nxt
                    size += 1
                    while i > 0:
                        parent = (i - 1) // 2
                        if heap_d[parent] > heap_d[i]:
                            td = heap_d[i]; heap_d[i] = heap_d[parent]; heap_d[parent] = td
                            tv = heap_v[i]; heap_v[i] = heap_v[parent]; heap_v[parent] = tv
                            i = parent
                        else:
                            break
        for i in range(n):
            out[r, i] = dist[i]
    return out_arr


def min_access(const long long[:, ::1] access, const unsigned char[::1] mask, long long[::1] out):
    cdef Py_ssize_t n_u = access.shape[0]
    cdef Py_ssize_t n_t = access.shape[1]
    cdef Py_ssize_t u, v
    cdef long long best
    for u in range(n_u):
        best = C_INF
        for v in range(n_t):
            if mask[v] and access[u, v] < best:
                best = access[u, v]
        out[u] = best
    return None


def node_eval(const long long[::1] cand_ptr, const int[::1] cand_idx, const long long[::1] cand_d,
              const unsigned char[::1] out_mask, const long long[::1] weights,
              const long long[:, ::1] pair_cap,
              long long[::1] best_d, int[::1] best_stop, long long[::1] second_d):
    cdef Py_ssize_t n_u = cand_ptr.shape[0] - 1
    cdef Py_ssize_t u, i, j
    cdef long long lo, hi, e, b, s, bound
    cdef int bs, v
    for u in range(n_u):
        lo = cand_ptr[u]
        hi = cand_ptr[u + 1]
        b = C_INF
        bs = -1
        s = C_INF
        for e in range(lo, hi):
            v = cand_idx[e]
            if out_mask[v]:
                continue
            if bs < 0:
                b = cand_d[e]
                bs = v
            else:
                s = cand_d[e]
                break
        if bs < 0:
            return 1, u
        best_d[u] = b
        best_stop[u] = bs
        second_d[u] = s
    for i in range(n_u):
        for j in range(i, n_u):
            if best_d[i] + best_d[j] > pair_cap[i, j]:
                return 2, i * n_u + j
    bound = 0
    for u in range(n_u):
        bound += weights[u] * best_d[u]
    return 0, bound
