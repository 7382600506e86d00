"""Line-level what-if analysis on top of a finished stop selection.

Given the lines of the network and a threshold t, lines whose share of
still-open stops falls below t are marked for deletion, the stops they
strand are removed from the solution, and each zone's remaining access
slack is reported so a planner can see which areas a threshold would hurt.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ._core import min_access
from .common import INF, to_fraction
from .errors import ValidationError
from .evaluate import StopSelection
from .metrics import MetricsBundle
from .model import Line

NEG_INF = float("-inf")

BinEdge = Union[Fraction, str]


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    t: Fraction
    analyzed: frozenset
    kept_lines: frozenset
    deleted_lines: frozenset
    v_s: frozenset
    uf: Mapping[str, Union[int, float]]  # int slack, or -inf when no stop remains
    violated: frozenset
    p_ros: Mapping[str, Fraction]


def _unique_stops(line: Line, known: Optional[frozenset]) -> frozenset:
    stops = line.unique_stops()
    if known is not None:
        missing = stops - known
        if missing:
            raise ValidationError(
                f"line {line.id!r} references unknown stop {sorted(missing)[0]!r}", entity=line.id
            )
    return stops


def line_percentages(
    selection: StopSelection,
    lines: Sequence[Line],
    min_line_size: int = 10,
    known_stops: Optional[Iterable[str]] = None,
) -> Dict[str, Fraction]:
    """Share of a line's unique stops the selection keeps open.

    Only lines with strictly more than min_line_size unique stops are
    analyzed; shorter ones are left out of the mapping entirely.
    """
    if min_line_size < 0:
        raise ValidationError("min_line_size must be >= 0")
    known = frozenset(known_stops) if known_stops is not None else None
    out: Dict[str, Fraction] = {}
    for line in lines:
        stops = _unique_stops(line, known)
        if len(stops) <= min_line_size:
            continue
        out[line.id] = Fraction(len(selection.kept & stops), len(stops))
    return out


def _scenario(
    selection: StopSelection,
    lines: Sequence[Line],
    t: Fraction,
    p_ros: Dict[str, Fraction],
    metrics: MetricsBundle,
    strict_removal: bool,
) -> ScenarioResult:
    inst = metrics.instance
    analyzed = frozenset(p_ros)
    kept_lines = frozenset(l for l, p in p_ros.items() if p >= t)
    deleted_lines = analyzed - kept_lines

    on_kept: Dict[str, bool] = {}
    on_deleted: Dict[str, bool] = {}
    for line in lines:
        if line.id not in analyzed:
            continue
        target = on_kept if line.id in kept_lines else on_deleted
        for s in line.unique_stops():
            target[s] = True
    removed = set()
    for s in selection.kept:
        if not on_deleted.get(s, False):
            continue
        if strict_removal or not on_kept.get(s, False):
            removed.add(s)
    v_s = frozenset(selection.kept - removed)

    uf: Dict[str, Union[int, float]] = {}
    if v_s:
        mask = np.zeros(inst.n_t, dtype=bool)
        for s in v_s:
            mask[inst.stop_index[s]] = True
        d_scn = np.empty(inst.n_u, dtype=np.int64)
        min_access(inst.access, mask.view(np.uint8), d_scn)
        for i, z in enumerate(inst.zone_ids):
            if d_scn[i] >= INF:
                uf[z] = NEG_INF
            else:
                uf[z] = int(metrics.access_cap[i]) - int(d_scn[i])
    else:
        for z in inst.zone_ids:
            uf[z] = NEG_INF
    violated = frozenset(z for z, slack in uf.items() if slack < 0)
    return ScenarioResult(t, analyzed, kept_lines, deleted_lines, v_s, uf, violated, p_ros)


def build_scenario(
    selection: StopSelection,
    lines: Sequence[Line],
    t,
    min_line_size: int = 10,
    metrics: Optional[MetricsBundle] = None,
    strict_removal: bool = False,
) -> ScenarioResult:
    """Apply threshold t: partition analyzed lines, derive V_S, uf and UF_S.

    A kept stop is removed only when some deleted analyzed line serves it
    and no kept analyzed line does; strict_removal=True removes it whenever
    any of its analyzed lines is deleted.
    """
    if metrics is None:
        raise ValidationError("build_scenario needs the instance metrics")
    t = to_fraction(t)
    if not (0 <= t <= 1):
        raise ValidationError(f"threshold t must lie in [0, 1], got {t}")
    known = frozenset(metrics.instance.stop_ids)
    p_ros = line_percentages(selection, lines, min_line_size, known)
    return _scenario(selection, lines, t, p_ros, metrics, strict_removal)


def scenario_sweep(
    selection: StopSelection,
    lines: Sequence[Line],
    thresholds: Sequence,
    min_line_size: int = 10,
    metrics: Optional[MetricsBundle] = None,
    strict_removal: bool = False,
) -> List[ScenarioResult]:
    """One ScenarioResult per threshold, sharing a single p_ros pass."""
    if metrics is None:
        raise ValidationError("scenario_sweep needs the instance metrics")
    ts = [to_fraction(t) for t in thresholds]
    for t in ts:
        if not (0 <= t <= 1):
            raise ValidationError(f"threshold t must lie in [0, 1], got {t}")
    if any(a > b for a, b in zip(ts, ts[1:])):
        raise ValidationError("thresholds must be sorted ascending")
    known = frozenset(metrics.instance.stop_ids)
    p_ros = line_percentages(selection, lines, min_line_size, known)
    return [_scenario(selection, lines, t, p_ros, metrics, strict_removal) for t in ts]


def histogram(values: Iterable, bin_count: int = 20) -> List[Tuple[BinEdge, int]]:
    """Equal-width bins over [min, max] as (lower edge, count) pairs.

    -inf sentinels land in a trailing "unreachable" bucket; the counts
    always sum to the number of input values.  Empty input gives [].
    """
    if bin_count < 1:
        raise ValidationError("bin_count must be >= 1")
    vals = list(values)
    if not vals:
        return []
    finite = [v for v in vals if not (isinstance(v, float) and math.isinf(v))]
    unreachable = len(vals) - len(finite)
    out: List[Tuple[BinEdge, int]] = []
    if finite:
        lo = Fraction(min(finite))
        hi = Fraction(max(finite))
        if lo == hi:
            out.append((lo, len(finite)))
        else:
            width = (hi - lo) / bin_count
            counts = [0] * bin_count
            for v in finite:
                i = int((Fraction(v) - lo) / width)
                counts[min(i, bin_count - 1)] += 1
            out = [(lo + i * width, c) for i, c in enumerate(counts)]
    if unreachable:
        out.append(("unreachable", unreachable))
    return out


def _edge_jsonable(edge: BinEdge):
    return edge if isinstance(edge, str) else float(edge)


def scenario_to_json(result: ScenarioResult, bin_count: int = 20) -> dict:
    uf_hist = histogram(list(result.uf.values()), bin_count)
    pros_hist = histogram(list(result.p_ros.values()), bin_count)
    return {
        "t": float(result.t),
        "analyzed": sorted(result.analyzed),
        "kept_lines": sorted(result.kept_lines),
        "deleted_lines": sorted(result.deleted_lines),
        "v_s": sorted(result.v_s),
        "violated": sorted(result.violated),
        "uf": {z: ("neg_inf" if v == NEG_INF else int(v)) for z, v in result.uf.items()},
        "p_ros": {l: float(p) for l, p in result.p_ros.items()},
        "histograms": {
            "uf": [[_edge_jsonable(e), c] for e, c in uf_hist],
            "p_ros": [[_edge_jsonable(e), c] for e, c in pros_hist],
        },
    }


def export_uf_csv(result: ScenarioResult, sink) -> None:
    writer = csv.writer(sink)
    writer.writerow(["zone_id", "uf"])
    for z, v in result.uf.items():
        writer.writerow([z, "neg_inf" if v == NEG_INF else int(v)])


def export_p_ros_csv(result: ScenarioResult, sink) -> None:
    writer = csv.writer(sink)
    writer.writerow(["line_id", "p_ros", "status"])
    for l in sorted(result.p_ros):
        status = "kept" if l in result.kept_lines else "deleted"
        writer.writerow([l, str(result.p_ros[l]), status])
