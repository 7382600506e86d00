"""Derived network quantities.

From an Instance: the stop-to-stop shortest path matrix, nearest-stop
assignment per zone, candidate stop sets, demand weights, the objective's
constant part, and the integer caps that make constraint checks exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from ._core import min_access, shortest_path_rows
from .common import INF, add_times, floor_frac
from .errors import UnreachablePairError
from .model import Instance

# full PC matrix is materialized up to this many stops; above, only the
# rows for access stops are computed (the only rows used downstream)
PC_FULL_LIMIT = 2000


@dataclass(frozen=True, eq=False)
class MetricsBundle:
    instance: Instance
    pc: Optional[np.ndarray]  # (n_t, n_t) int64, None above PC_FULL_LIMIT
    acc_idx: np.ndarray  # (n_u,) nearest stop index per zone
    d_acc_arr: np.ndarray  # (n_u,) int64 access time to it
    access_cap: np.ndarray  # (n_u,) int64 floor(k_u * d_acc_u), constraint A cap
    cand_ptr: np.ndarray  # (n_u + 1,) int64 CSR offsets into cand_idx/cand_d
    cand_idx: np.ndarray  # int32 stop indices, per zone ascending (d, id)
    cand_d: np.ndarray  # int64 access times matching cand_idx
    weight_arr: np.ndarray  # (n_u,) int64 demand weight w(u)
    pc_zone: np.ndarray  # (n_u, n_u) int64 pc[acc(u1)][acc(u2)]
    pair_cap: np.ndarray  # (n_u, n_u) int64, INF where pair unconstrained
    pair_mask: np.ndarray  # (n_u, n_u) bool, True where constraint B applies
    stop_rank: np.ndarray  # (n_t,) rank of each stop index in id-lex order
    pc_const: int
    twt_baseline: int
    dropped_pairs: Tuple[Tuple[str, str], ...]  # OD pairs dropped as unreachable

    @property
    def acc(self) -> Dict[str, str]:
        ids = self.instance.stop_ids
        return {z: ids[self.acc_idx[i]] for i, z in enumerate(self.instance.zone_ids)}

    @property
    def d_acc(self) -> Dict[str, int]:
        return {z: int(self.d_acc_arr[i]) for i, z in enumerate(self.instance.zone_ids)}

    @property
    def candidates(self) -> Dict[str, Tuple[str, ...]]:
        ids = self.instance.stop_ids
        out = {}
        for i, z in enumerate(self.instance.zone_ids):
            lo, hi = self.cand_ptr[i], self.cand_ptr[i + 1]
            out[z] = tuple(ids[v] for v in self.cand_idx[lo:hi])
        return out

    @property
    def weight(self) -> Dict[str, int]:
        return {z: int(self.weight_arr[i]) for i, z in enumerate(self.instance.zone_ids)}


def _build_csr(inst: Instance):
    n = inst.n_t
    idx = inst.stop_index
    arcs: List[Tuple[int, int, int]] = []
    for e in inst.edges:
        ia, ib = idx[e.a], idx[e.b]
        arcs.append((ia, ib, e.cost))
        arcs.append((ib, ia, e.cost))
    arcs.sort()
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = np.empty(len(arcs), dtype=np.int64)
    weights = np.empty(len(arcs), dtype=np.int64)
    for pos, (a, b, c) in enumerate(arcs):
        indptr[a + 1] += 1
        indices[pos] = b
        weights[pos] = c
    np.cumsum(indptr, out=indptr)
    return indptr, indices, weights


def all_pairs_shortest_paths(inst: Instance) -> np.ndarray:
    """Full stop-to-stop shortest path matrix (INF sentinel, symmetric).

    Repeated single-source runs with a priority queue; O(n_t) rows of
    memory, so callers on very large graphs may prefer compute_metrics,
    which restricts itself to access-stop rows.
    """
    indptr, indices, weights = _build_csr(inst)
    sources = np.arange(inst.n_t, dtype=np.int64)
    return shortest_path_rows(inst.n_t, indptr, indices, weights, sources)


def _nearest_stops(inst: Instance, stop_rank: np.ndarray):
    access = inst.access
    d_acc = access.min(axis=1)
    # among the stops attaining d_acc, take the lexicographically smallest id
    tied = access == d_acc[:, None]
    rank_grid = np.where(tied, stop_rank[None, :], np.iinfo(np.int64).max)
    pick_rank = rank_grid.min(axis=1)
    order = np.argsort(stop_rank, kind="stable")  # rank -> stop index
    acc_idx = order[pick_rank]
    return acc_idx.astype(np.int64), d_acc.astype(np.int64)


def compute_metrics(inst: Instance) -> MetricsBundle:
    n_t, n_u = inst.n_t, inst.n_u
    stop_ids = inst.stop_ids
    zone_ids = inst.zone_ids
    stop_rank = np.argsort(np.argsort(np.array(stop_ids, dtype=object), kind="stable"), kind="stable").astype(np.int64)
    acc_idx, d_acc_arr = _nearest_stops(inst, stop_rank)

    # candidate sets D_u^k: d(u, v) <= k_u * d_acc(u), exact rational compare
    # via the integer cap floor(k_u * d_acc(u))
    access_cap = np.empty(n_u, dtype=np.int64)
    for i, z in enumerate(zone_ids):
        access_cap[i] = floor_frac(inst.params.k[z] * int(d_acc_arr[i]))
    ptr = [0]
    cidx: List[int] = []
    cd: List[int] = []
    for i in range(n_u):
        row = inst.access[i]
        members = [v for v in range(n_t) if row[v] <= access_cap[i]]
        members.sort(key=lambda v: (row[v], stop_ids[v]))
        cidx.extend(members)
        cd.extend(int(row[v]) for v in members)
        ptr.append(len(cidx))
    cand_ptr = np.array(ptr, dtype=np.int64)
    cand_idx = np.array(cidx, dtype=np.int32)
    cand_d = np.array(cd, dtype=np.int64)

    # shortest-path rows: full matrix when small, access-stop rows otherwise
    indptr, indices, weights_csr = _build_csr(inst)
    if n_t <= PC_FULL_LIMIT:
        pc = shortest_path_rows(n_t, indptr, indices, weights_csr, np.arange(n_t, dtype=np.int64))
        pc_rows = pc
        row_of = np.arange(n_t, dtype=np.int64)
    else:
        pc = None
        needed = np.unique(acc_idx)
        pc_rows = shortest_path_rows(n_t, indptr, indices, weights_csr, needed)
        row_of = np.full(n_t, -1, dtype=np.int64)
        row_of[needed] = np.arange(len(needed), dtype=np.int64)
    pc_zone = pc_rows[row_of[acc_idx]][:, acc_idx].astype(np.int64)

    # demand weights and constant objective part, dropping unreachable pairs
    # when the instance allows disconnected graphs
    weight_arr = np.zeros(n_u, dtype=np.int64)
    zidx = inst.zone_index
    dropped: List[Tuple[str, str]] = []
    pc_const = 0
    twt_base = 0
    for (o, d), n in sorted(inst.od.items()):
        io, id_ = zidx[o], zidx[d]
        leg = int(pc_zone[io, id_])
        if leg >= INF:
            if not inst.params.allow_disconnected:
                raise UnreachablePairError(o, d)
            dropped.append((o, d))
            continue
        weight_arr[io] += n
        weight_arr[id_] += n
        pc_const += n * leg
        twt_base += n * (int(d_acc_arr[io]) + int(d_acc_arr[id_]) + leg)

    pair_mask, pair_cap = _pair_caps(inst, d_acc_arr, pc_zone, set(dropped))

    return MetricsBundle(
        instance=inst,
        pc=pc,
        acc_idx=acc_idx,
        d_acc_arr=d_acc_arr,
        access_cap=access_cap,
        cand_ptr=cand_ptr,
        cand_idx=cand_idx,
        cand_d=cand_d,
        weight_arr=weight_arr,
        pc_zone=pc_zone,
        pair_cap=pair_cap,
        pair_mask=pair_mask,
        stop_rank=stop_rank,
        pc_const=pc_const,
        twt_baseline=twt_base,
        dropped_pairs=tuple(dropped),
    )


def _pair_caps(inst: Instance, d_acc_arr, pc_zone, dropped):
    """Integer caps for constraint B.

    For a configured pair, d_sol(u1) + d_sol(u2) <= floor(alpha * OptV) - pc
    is exactly equivalent to the rational constraint (the left side is an
    integer).  Unconfigured or unreachable pairs get an INF cap.
    """
    n_u = inst.n_u
    alpha = inst.params.alpha
    zidx = inst.zone_index
    pair_mask = np.zeros((n_u, n_u), dtype=bool)
    if inst.params.constraint3_pairs == "all-pairs":
        pair_mask[:, :] = True
    else:
        for (o, d), n in inst.od.items():
            if n > 0 and (o, d) not in dropped:
                io, id_ = zidx[o], zidx[d]
                pair_mask[io, id_] = True
                pair_mask[id_, io] = True
    an, ad = alpha.numerator, alpha.denominator
    d_sum = d_acc_arr[:, None] + d_acc_arr[None, :]
    reachable = pc_zone < INF
    opt_v_mat = np.where(reachable, d_sum + pc_zone, 0)
    if an * int(opt_v_mat.max(initial=0)) < INF:
        cap = (an * opt_v_mat) // ad - pc_zone
    else:  # pragma: no cover - absurd alpha magnitudes
        cap = np.array(
            [[(an * int(opt_v_mat[i, j])) // ad - int(pc_zone[i, j]) for j in range(n_u)] for i in range(n_u)],
            dtype=np.int64,
        )
    pair_cap = np.where(pair_mask & reachable, cap, INF).astype(np.int64)
    return pair_mask, pair_cap


def opt_v(metrics: MetricsBundle, u1: str, u2: str) -> int:
    """Best possible door-to-door time between two zones over the full network."""
    zidx = metrics.instance.zone_index
    i, j = zidx[u1], zidx[u2]
    legs = add_times(int(metrics.d_acc_arr[i]), int(metrics.d_acc_arr[j]))
    return add_times(legs, int(metrics.pc_zone[i, j]))


def d_sol_array(metrics: MetricsBundle, mask: np.ndarray) -> np.ndarray:
    """Per-zone min access time over the kept-stop mask (INF when empty)."""
    out = np.empty(metrics.instance.n_u, dtype=np.int64)
    min_access(metrics.instance.access, mask.view(np.uint8), out)
    return out


def export_metrics_csv(metrics: MetricsBundle, sink) -> None:
    writer = csv.writer(sink)
    writer.writerow(["zone_id", "acc_stop", "d_acc", "n_candidates", "weight"])
    inst = metrics.instance
    for i, z in enumerate(inst.zone_ids):
        writer.writerow(
            [
                z,
                inst.stop_ids[metrics.acc_idx[i]],
                int(metrics.d_acc_arr[i]),
                int(metrics.cand_ptr[i + 1] - metrics.cand_ptr[i]),
                int(metrics.weight_arr[i]),
            ]
        )
