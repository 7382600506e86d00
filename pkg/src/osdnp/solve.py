"""Selection search: exhaustive oracle, greedy heuristic, exact branch-and-bound.

The branch-and-bound works over the candidate structure: a node forces some
stops in and some out, its bound is the demand-weighted sum of each zone's
cheapest still-allowed candidate.  When the per-zone bests (plus forced-in
stops) already fit the cardinality budget the node is solved exactly at its
bound, which is what makes the search fast: most of the tree collapses
through that shortcut.
"""

from __future__ import annotations

import heapq
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._core import node_eval
from .common import INF
from .errors import ConsistencyError, GuardError
from .evaluate import StopSelection, budget, evaluate_selection, mask_feasible, selection_to_json
from .metrics import MetricsBundle

ORACLE_LIMIT = 20
_REGRET_GAP_CAP = 2 ** 30
_REGRET_W_CAP = 2 ** 20

ProgressFn = Callable[[int, Optional[int], Optional[int]], None]


@dataclass(frozen=True, eq=False)
class SolveReport:
    best: Optional[StopSelection]  # None when infeasible (or heuristic failure)
    proof: str  # optimal | gap-bounded | heuristic-only | infeasible-proven
    lower_bound: Optional[int]  # weighted-access units; twt = bound + pc_const
    nodes_explored: int
    wall_time: float
    seed: int = 0
    root_bound: Optional[int] = None
    infeasible_zone: Optional[str] = None


def report_to_json(report: SolveReport, metrics: MetricsBundle, instance_id: Optional[str] = None) -> dict:
    return {
        "proof": report.proof,
        "lower_bound": report.lower_bound,
        "pc_const": metrics.pc_const,
        "nodes_explored": report.nodes_explored,
        "wall_time": report.wall_time,
        "seed": report.seed,
        "root_bound": report.root_bound,
        "infeasible_zone": report.infeasible_zone,
        "solution": None if report.best is None else selection_to_json(report.best, metrics, instance_id),
    }


# ----------------------------------------------------------------------
# exhaustive oracle
# ----------------------------------------------------------------------


def oracle_solve(metrics: MetricsBundle) -> SolveReport:
    """Enumerate every stop subset; the reference answer for small instances.

    Deliberately avoids the candidate structure the branch-and-bound uses:
    subsets are checked straight against the access matrix and integer caps,
    so the two paths share no search code.  Guarded at 20 stops.
    """
    inst = metrics.instance
    n = inst.n_t
    if n > ORACLE_LIMIT:
        raise GuardError(f"oracle enumerates 2^n_t subsets; n_t = {n} exceeds {ORACLE_LIMIT}")
    start = time.monotonic()
    max_kept = budget(inst)
    access = inst.access
    weights = metrics.weight_arr
    caps = metrics.access_cap
    pair_cap = metrics.pair_cap
    stop_ids = inst.stop_ids
    total = 1 << n
    chunk = 1 << 14
    shifts = np.arange(n, dtype=np.uint32)
    best: Optional[Tuple[int, int, Tuple[str, ...], int]] = None  # (twt, size, ids, code)

    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(lo + chunk, total), dtype=np.uint32)
        masks = (codes[:, None] >> shifts[None, :]) & 1  # (m, n_t)
        kept_counts = masks.sum(axis=1)
        d_sol = np.empty((len(codes), inst.n_u), dtype=np.int64)
        for u in range(inst.n_u):
            row = np.where(masks.astype(bool), access[u][None, :], INF)
            d_sol[:, u] = row.min(axis=1)
        covered = (d_sol < INF).all(axis=1)
        within_a = (d_sol <= caps[None, :]).all(axis=1)
        within_c = kept_counts <= max_kept
        clamped = np.minimum(d_sol, 2 ** 40)  # keeps pair sums clear of overflow
        lhs = clamped[:, :, None] + clamped[:, None, :]
        within_b = (lhs <= pair_cap[None, :, :]).all(axis=(1, 2))
        ok = covered & within_a & within_b & within_c
        idx = np.flatnonzero(ok)
        if idx.size == 0:
            continue
        twts = (d_sol[idx] @ weights) + metrics.pc_const
        m = twts.min()
        sel = idx[twts == m]
        counts = kept_counts[sel]
        sel = sel[counts == counts.min()]
        for s in sel:
            code = int(codes[s])
            ids = tuple(sorted(stop_ids[v] for v in range(n) if code >> v & 1))
            entry = (int(m), int(kept_counts[s]), ids, code)
            if best is None or entry[:3] < best[:3]:
                best = entry

    wall = time.monotonic() - start
    if best is None:
        return SolveReport(None, "infeasible-proven", None, total, wall)
    selection = evaluate_selection(metrics, best[2])
    if not selection.feasible or selection.twt != best[0]:  # pragma: no cover - cross-check
        raise ConsistencyError("oracle winner disagrees with evaluate_selection")
    return SolveReport(selection, "optimal", best[0] - metrics.pc_const, total, wall)


# ----------------------------------------------------------------------
# greedy heuristic
# ----------------------------------------------------------------------


def _id_sorted(metrics: MetricsBundle, indices) -> List[int]:
    order = metrics.stop_rank
    return sorted((int(v) for v in indices), key=lambda v: order[v])


def greedy_solve(metrics: MetricsBundle, seed: int = 0, restarts: int = 0) -> SolveReport:
    """Delete-then-swap heuristic; also the branch-and-bound's incumbent.

    Phase 1 keeps only the nearest stop of each zone; when that fits the
    budget it is optimal outright (zero delay).  Phase 2 starts from the full
    set and deletes whichever stop raises twt least while staying feasible on
    access, delay and coverage, then runs a first-improvement one-out/one-in
    swap search.  restarts > 0 reruns the swap search with seed-shuffled scan
    orders and keeps the best outcome.
    """
    inst = metrics.instance
    start = time.monotonic()
    max_kept = budget(inst)
    n_t = inst.n_t
    stop_ids = inst.stop_ids

    if max_kept >= n_t:
        sel = evaluate_selection(metrics, stop_ids)
        if sel.feasible:
            return SolveReport(sel, "optimal", sel.twt - metrics.pc_const, 0, time.monotonic() - start, seed)

    acc_ids = sorted({stop_ids[int(i)] for i in metrics.acc_idx})
    if len(acc_ids) <= max_kept:
        sel = evaluate_selection(metrics, acc_ids)
        if sel.feasible:
            return SolveReport(sel, "optimal", sel.twt - metrics.pc_const, 0, time.monotonic() - start, seed)

    mask = np.ones(n_t, dtype=bool)
    while int(mask.sum()) > max_kept:
        choice = None  # (new_twt, rank, stop index)
        for v in _id_sorted(metrics, np.flatnonzero(mask)):
            mask[v] = False
            feasible, twt, _ = mask_feasible(metrics, mask, n_t)  # budget not binding yet
            mask[v] = True
            if feasible and (choice is None or twt < choice[0]):
                choice = (twt, v)
        if choice is None:
            return SolveReport(
                None, "heuristic-only", None, 0, time.monotonic() - start, seed
            )
        mask[choice[1]] = False

    base_twt = mask_feasible(metrics, mask, max_kept)[1]
    mask, best_twt = _swap_search(metrics, mask, base_twt, max_kept, None)
    if restarts > 0:
        rng = random.Random(seed)
        for _ in range(restarts):
            alt_mask, alt_twt = _swap_search(metrics, mask.copy(), best_twt, max_kept, rng)
            if alt_twt < best_twt:
                mask, best_twt = alt_mask, alt_twt

    sel = evaluate_selection(metrics, [stop_ids[v] for v in np.flatnonzero(mask)])
    return SolveReport(sel, "heuristic-only", None, 0, time.monotonic() - start, seed)


def _swap_search(metrics, mask, current_twt, max_kept, rng, cap: int = 10000):
    n_t = metrics.instance.n_t
    for _ in range(cap):
        kept = _id_sorted(metrics, np.flatnonzero(mask))
        spare = _id_sorted(metrics, np.flatnonzero(~mask))
        if rng is not None:
            rng.shuffle(kept)
            rng.shuffle(spare)
        improved = False
        for out_v in kept:
            for in_v in spare:
                mask[out_v] = False
                mask[in_v] = True
                feasible, twt, _ = mask_feasible(metrics, mask, max_kept)
                if feasible and twt < current_twt:
                    current_twt = twt
                    improved = True
                    break
                mask[out_v] = True
                mask[in_v] = False
            if improved:
                break
        if not improved:
            break
    return mask, current_twt


# ----------------------------------------------------------------------
# branch and bound
# ----------------------------------------------------------------------


def bnb_solve(
    metrics: MetricsBundle,
    time_limit: Optional[float] = None,
    gap_target: Fraction = Fraction(0),
    seed: int = 0,
    progress: Optional[ProgressFn] = None,
    progress_every: int = 2000,
) -> SolveReport:
    """Best-first exact search.

    Nodes carry forced-in/forced-out stop masks; priority is the parent's
    evaluated bound (a valid lower bound for the child subtree), so the
    minimum open key is a certified global bound at any instant.  A node
    whose per-zone bests plus forced-in stops fit the budget is closed
    exactly at its bound.  Branching picks the undecided stop with the
    largest weighted regret (ties to the lowest id); the forced-in child is
    explored first.  Hitting time_limit or gap_target reports gap-bounded.
    """
    inst = metrics.instance
    start = time.monotonic()
    n_t, n_u = inst.n_t, inst.n_u
    max_kept = budget(inst)
    zone_ids = inst.zone_ids
    stop_ids = inst.stop_ids

    for i, z in enumerate(zone_ids):
        if metrics.cand_ptr[i] == metrics.cand_ptr[i + 1]:
            return SolveReport(
                None, "infeasible-proven", None, 0, time.monotonic() - start, seed, None, z
            )
    if max_kept <= 0:
        return SolveReport(None, "infeasible-proven", None, 0, time.monotonic() - start, seed)

    warm = greedy_solve(metrics, seed=seed)
    if warm.proof == "optimal":
        # the heuristic only claims optimality when it is certain (zero delay)
        return SolveReport(
            warm.best, "optimal", warm.lower_bound, 0, time.monotonic() - start, seed, warm.lower_bound
        )
    if warm.best is not None and warm.best.feasible:
        incumbent_obj: int = warm.best.twt - metrics.pc_const
        incumbent_kept: Optional[frozenset] = warm.best.kept
    else:
        incumbent_obj = INF
        incumbent_kept = None

    cand_ptr, cand_idx, cand_d = metrics.cand_ptr, metrics.cand_idx, metrics.cand_d
    weights = metrics.weight_arr
    pair_cap = metrics.pair_cap
    w_clip = np.minimum(weights, _REGRET_W_CAP)
    best_d = np.empty(n_u, dtype=np.int64)
    best_stop = np.empty(n_u, dtype=np.int32)
    second_d = np.empty(n_u, dtype=np.int64)

    root_out = np.zeros(n_t, dtype=np.uint8)
    root_in = np.zeros(n_t, dtype=np.uint8)
    heap: List[Tuple[int, int, np.ndarray, np.ndarray, int]] = [(0, 0, root_out, root_in, 0)]
    seq = 1
    nodes = 0
    root_bound: Optional[int] = None
    open_min: Optional[int] = None
    limit_hit = False
    infeasible_zone: Optional[str] = None

    while heap:
        key, _, out_mask, in_mask, n_in = heapq.heappop(heap)
        if key >= incumbent_obj:
            heap.clear()
            break
        if incumbent_obj < INF and gap_target > 0:
            if Fraction(incumbent_obj - key) <= gap_target * incumbent_obj:
                open_min = key
                limit_hit = True
                break
        if time_limit is not None and time.monotonic() - start > time_limit:
            open_min = key
            limit_hit = True
            break

        status, payload = node_eval(
            cand_ptr, cand_idx, cand_d, out_mask, weights, pair_cap, best_d, best_stop, second_d
        )
        if root_bound is None:
            if status == 1:
                infeasible_zone = zone_ids[int(payload)]
                break
            root_bound = int(payload) if status == 0 else None
        if status != 0:
            continue
        bound = int(payload)
        if bound >= incumbent_obj:
            continue
        nodes += 1
        if progress is not None and nodes % progress_every == 0:
            lb = min([key] + [entry[0] for entry in heap[:1]])
            progress(nodes, None if incumbent_obj >= INF else incumbent_obj + metrics.pc_const, lb + metrics.pc_const)

        forced_idx = np.flatnonzero(in_mask)
        union = np.union1d(best_stop, forced_idx)
        if union.size <= max_kept:
            # every zone sits at its optimistic best: the node is solved
            incumbent_obj = bound
            incumbent_kept = frozenset(stop_ids[int(v)] for v in union)
            continue

        gaps = np.minimum(second_d - best_d, _REGRET_GAP_CAP)
        # regret scores are exact in float64: clipped products stay below 2**51
        per_stop = np.bincount(best_stop, weights=(w_clip * gaps).astype(np.float64), minlength=n_t)
        eligible = np.zeros(n_t, dtype=bool)
        eligible[best_stop] = True
        eligible &= in_mask == 0
        scores = np.where(eligible, per_stop, -1.0)
        top = scores.max()
        tied = np.flatnonzero(scores == top)
        v = int(tied[np.argmin(metrics.stop_rank[tied])])

        if n_in + 1 <= max_kept:
            child_in = in_mask.copy()
            child_in[v] = 1
            heapq.heappush(heap, (bound, seq, out_mask, child_in, n_in + 1))
            seq += 1
        child_out = out_mask.copy()
        child_out[v] = 1
        heapq.heappush(heap, (bound, seq, child_out, in_mask, n_in))
        seq += 1

    wall = time.monotonic() - start
    if infeasible_zone is not None:
        return SolveReport(None, "infeasible-proven", None, nodes, wall, seed, None, infeasible_zone)
    if limit_hit:
        lb = open_min if open_min is not None else None
        best = evaluate_selection(metrics, incumbent_kept) if incumbent_kept is not None else None
        proof = "gap-bounded" if best is not None else "heuristic-only"
        return SolveReport(best, proof, lb, nodes, wall, seed, root_bound)
    if incumbent_kept is None:
        return SolveReport(None, "infeasible-proven", None, nodes, wall, seed, root_bound)
    best = evaluate_selection(metrics, incumbent_kept)
    if not best.feasible or best.twt != incumbent_obj + metrics.pc_const:  # pragma: no cover
        raise ConsistencyError("incumbent disagrees with evaluate_selection")
    return SolveReport(best, "optimal", incumbent_obj, nodes, wall, seed, root_bound)
