"""Candidate-solution evaluation: coverage, constraints A/B/C, objective.

All checks run on integers: constraint A against the per-zone cap
floor(k_u * d_acc(u)), constraint B against the per-pair cap
floor(alpha * OptV) - pc, both exactly equivalent to their rational forms
because the compared quantities are integers.  Violation margins are exact:
adding the margin to the integer right-hand side makes the constraint tight.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .common import INF, ceil_frac, floor_frac
from .errors import ValidationError
from .metrics import MetricsBundle, d_sol_array
from .model import Instance


@dataclass(frozen=True)
class Violation:
    kind: str  # access | delay | cardinality | coverage
    subject: object  # zone id, (zone, zone) pair, or kept count
    margin: int  # > 0, exact excess over the integer cap

    def to_json(self) -> dict:
        subject = list(self.subject) if isinstance(self.subject, tuple) else self.subject
        return {"kind": self.kind, "subject": subject, "margin": self.margin}


@dataclass(frozen=True, eq=False)
class StopSelection:
    kept: frozenset
    d_acc_sol: Dict[str, int]  # INF sentinel when no kept stop exists
    twt: Optional[int]  # None when some demand zone is uncovered
    delay: Optional[int]
    feasible: bool
    violations: Tuple[Violation, ...]


def budget(inst: Instance) -> int:
    """Maximum kept-stop count: floor((1 - p_elim) * n_t)."""
    return floor_frac((1 - inst.params.p_elim) * inst.n_t)


def required_deletions(inst: Instance) -> int:
    """Minimum stops to delete: ceil(p_elim * n_t) = n_t - budget."""
    return ceil_frac(inst.params.p_elim * inst.n_t)


def kept_mask(inst: Instance, kept: Iterable[str]) -> np.ndarray:
    mask = np.zeros(inst.n_t, dtype=bool)
    idx = inst.stop_index
    for s in kept:
        if s not in idx:
            raise ValidationError(f"unknown stop id in kept set: {s}", str(s))
        mask[idx[s]] = True
    return mask


def mask_feasible(metrics: MetricsBundle, mask: np.ndarray, max_kept: int):
    """Fast verdict used by exhaustive search: (feasible, twt or None).

    Same semantics as evaluate_selection without building the violation
    report.  The uncovered check must come first: INF access values would
    overflow the pairwise sums.
    """
    d_sol = d_sol_array(metrics, mask)
    if bool((d_sol >= INF).any()):
        return False, None, d_sol
    twt = int(metrics.weight_arr @ d_sol) + metrics.pc_const
    if bool((d_sol > metrics.access_cap).any()):
        return False, twt, d_sol
    if int(mask.sum()) > max_kept:
        return False, twt, d_sol
    lhs = d_sol[:, None] + d_sol[None, :]
    if bool((lhs > metrics.pair_cap).any()):
        return False, twt, d_sol
    return True, twt, d_sol


def evaluate_selection(metrics: MetricsBundle, kept: Iterable[str]) -> StopSelection:
    """Evaluate a stop subset against every constraint.

    An empty (or unreachable) kept set yields a coverage violation for every
    zone rather than arithmetic on the INF sentinel; this keeps the empty
    selection infeasible on every instance, demand or not, in step with the
    cover rows of the integer program.
    """
    inst = metrics.instance
    kept_ids = frozenset(kept)
    mask = kept_mask(inst, kept_ids)
    d_sol = d_sol_array(metrics, mask)
    zone_ids = inst.zone_ids
    violations: List[Violation] = []

    uncovered = d_sol >= INF
    for i in np.flatnonzero(uncovered):
        violations.append(Violation("coverage", zone_ids[i], 1))

    covered = ~uncovered
    too_far = covered & (d_sol > metrics.access_cap)
    for i in np.flatnonzero(too_far):
        violations.append(Violation("access", zone_ids[i], int(d_sol[i] - metrics.access_cap[i])))

    if covered.all():
        lhs = d_sol[:, None] + d_sol[None, :]
        over = lhs > metrics.pair_cap
        for i, j in np.argwhere(np.triu(over)):
            violations.append(
                Violation("delay", (zone_ids[i], zone_ids[j]), int(lhs[i, j] - metrics.pair_cap[i, j]))
            )

    max_kept = budget(inst)
    if len(kept_ids) > max_kept:
        violations.append(Violation("cardinality", len(kept_ids), len(kept_ids) - max_kept))

    if covered.all():
        twt: Optional[int] = int(metrics.weight_arr @ d_sol) + metrics.pc_const
        delay: Optional[int] = twt - metrics.twt_baseline
    else:
        twt = None
        delay = None

    return StopSelection(
        kept=kept_ids,
        d_acc_sol={z: int(d_sol[i]) for i, z in enumerate(zone_ids)},
        twt=twt,
        delay=delay,
        feasible=not violations,
        violations=tuple(violations),
    )


def selection_to_json(selection: StopSelection, metrics: MetricsBundle, instance_id: Optional[str] = None) -> dict:
    """Solution document: the exchange format for files and the service."""
    from .model import instance_hash

    inst = metrics.instance
    params = inst.params
    return {
        "kept": sorted(selection.kept),
        "twt": selection.twt,
        "delay": selection.delay,
        "feasible": selection.feasible,
        "violations": [v.to_json() for v in selection.violations],
        "d_acc_sol": {z: (None if d >= INF else d) for z, d in selection.d_acc_sol.items()},
        "params_echo": {
            "p_elim": str(params.p_elim),
            "alpha": str(params.alpha),
            "k": {z: str(v) for z, v in params.k.items()},
            "constraint3_pairs": params.constraint3_pairs,
            "budget": budget(inst),
            "n_t": inst.n_t,
        },
        "instance_hash": instance_id if instance_id is not None else instance_hash(inst),
    }
