"""Problem input model: stop graph, urban zones, access times, demand, parameters.

Instances are immutable after load and safe to share across threads.  All
travel times are stored as non-negative integers in scaled units: decimal
inputs are multiplied by ``params.time_scale`` (default 1000) and rounded
half-up at parse time, so no downstream comparison ever touches floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .common import round_half_up, to_fraction
from .errors import ConnectivityError, ParseError, ValidationError

Coord = Tuple[float, float]


@dataclass(frozen=True)
class Stop:
    id: str
    coord: Optional[Coord] = None  # map units, reporting only


@dataclass(frozen=True)
class UrbanZone:
    id: str
    coord: Optional[Coord] = None


@dataclass(frozen=True)
class TransitEdge:
    a: str
    b: str
    cost: int  # scaled integer time units, >= 0


@dataclass(frozen=True)
class Line:
    """A bus route: ordered stops, duplicates permitted in input."""

    id: str
    stops: Tuple[str, ...]

    def unique_stops(self) -> frozenset:
        return frozenset(self.stops)


@dataclass(frozen=True)
class Parameters:
    p_elim: Fraction  # deletion rate, in [0, 1]
    alpha: Fraction  # delay factor, >= 1
    k: Mapping[str, Fraction]  # access factor per zone, >= 0
    constraint3_pairs: str = "all-pairs"  # or "od-positive-only"
    time_scale: int = 1000
    allow_disconnected: bool = False


@dataclass(frozen=True)
class Warning:
    code: str
    message: str
    subject: str = ""


@dataclass(frozen=True, eq=False)
class Instance:
    stops: Tuple[Stop, ...]
    zones: Tuple[UrbanZone, ...]
    edges: Tuple[TransitEdge, ...]
    access: np.ndarray  # int64 (n_u, n_t), scaled units, read-only
    od: Mapping[Tuple[str, str], int]
    params: Parameters
    lines: Tuple[Line, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_stop_index", {s.id: i for i, s in enumerate(self.stops)})
        object.__setattr__(self, "_zone_index", {z.id: i for i, z in enumerate(self.zones)})
        self.access.setflags(write=False)

    @property
    def n_t(self) -> int:
        return len(self.stops)

    @property
    def n_u(self) -> int:
        return len(self.zones)

    @property
    def stop_ids(self) -> Tuple[str, ...]:
        return tuple(s.id for s in self.stops)

    @property
    def zone_ids(self) -> Tuple[str, ...]:
        return tuple(z.id for z in self.zones)

    @property
    def stop_index(self) -> Dict[str, int]:
        return self._stop_index  # type: ignore[attr-defined]

    @property
    def zone_index(self) -> Dict[str, int]:
        return self._zone_index  # type: ignore[attr-defined]

    def k_for(self, zone_id: str) -> Fraction:
        return self.params.k[zone_id]

    def __eq__(self, other: object) -> bool:
        """Field-by-field equality over semantic content.

        time_scale is a parse-time conversion directive, not content: two
        instances holding identical scaled integers are equal regardless of
        the scale their sources used.
        """
        if not isinstance(other, Instance):
            return NotImplemented
        a, b = self.params, other.params
        return (
            self.stops == other.stops
            and self.zones == other.zones
            and self.edges == other.edges
            and np.array_equal(self.access, other.access)
            and dict(self.od) == dict(other.od)
            and self.lines == other.lines
            and (a.p_elim, a.alpha, dict(a.k), a.constraint3_pairs, a.allow_disconnected)
            == (b.p_elim, b.alpha, dict(b.k), b.constraint3_pairs, b.allow_disconnected)
        )

    __hash__ = None  # type: ignore[assignment]


# ----------------------------------------------------------------------
# loading
# ----------------------------------------------------------------------


def _read_source(source: Any) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def load_instance(source: Any, format: str = "json") -> Instance:
    """Parse and validate an instance document.

    ``source`` may be bytes, text, or a readable stream.  Only the JSON
    format is currently defined.  Decimal times are scaled to integers here;
    params accept rationals as JSON numbers or strings ("1/3", "0.35").
    """
    if format != "json":
        raise ParseError(f"unknown instance format: {format}")
    text = _read_source(source)
    try:
        doc = json.loads(text, parse_float=Fraction, parse_int=int)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    return instance_from_doc(doc)


def _want_list(doc: Mapping, key: str) -> list:
    if key not in doc:
        raise ValidationError(f"missing required key: {key}", key)
    if not isinstance(doc[key], list):
        raise ValidationError(f"{key} must be an array", key)
    return doc[key]


def _parse_coord(entry: Mapping, ident: str) -> Optional[Coord]:
    has_x = "x" in entry
    has_y = "y" in entry
    if has_x != has_y:
        raise ValidationError(f"{ident}: coordinate needs both x and y", ident)
    if not has_x:
        return None
    try:
        return (float(to_fraction(entry["x"])), float(to_fraction(entry["y"])))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{ident}: bad coordinate: {exc}", ident) from exc


def _parse_points(raw: list, what: str):
    out = []
    seen = set()
    with_coord = 0
    for entry in raw:
        if not isinstance(entry, dict) or "id" not in entry:
            raise ValidationError(f"each {what} needs an id", what)
        ident = entry["id"]
        if not isinstance(ident, str) or not ident:
            raise ValidationError(f"{what} id must be a non-empty string", str(ident))
        if ident in seen:
            raise ValidationError(f"duplicate {what} id: {ident}", ident)
        seen.add(ident)
        coord = _parse_coord(entry, ident)
        if coord is not None:
            with_coord += 1
        out.append((ident, coord))
    if with_coord not in (0, len(out)):
        raise ValidationError(f"coordinates must be present for all {what}s or for none", what)
    return out


def _scaled_time(value: Any, scale: int, ident: str) -> int:
    try:
        q = to_fraction(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{ident}: bad time value: {exc}", ident) from exc
    if q < 0:
        raise ValidationError(f"{ident}: negative time", ident)
    return round_half_up(q * scale)


def _parse_params(doc: Mapping, zone_ids: Sequence[str]) -> Parameters:
    raw = doc.get("params")
    if not isinstance(raw, dict):
        raise ValidationError("missing required key: params", "params")
    for key in ("p_elim", "alpha", "k"):
        if key not in raw:
            raise ValidationError(f"params.{key} is required", key)
    try:
        p_elim = to_fraction(raw["p_elim"])
        alpha = to_fraction(raw["alpha"])
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad params: {exc}", "params") from exc
    if not (0 <= p_elim <= 1):
        raise ValidationError("p_elim must lie in [0, 1]", "p_elim")
    if alpha < 1:
        raise ValidationError("alpha must be >= 1", "alpha")
    raw_k = raw["k"]
    if isinstance(raw_k, dict):
        k_map = {}
        for zone, val in raw_k.items():
            if zone not in zone_ids:
                raise ValidationError(f"k references unknown zone: {zone}", zone)
            k_map[zone] = to_fraction(val)
        for zone in zone_ids:
            if zone not in k_map:
                raise ValidationError(f"k missing zone: {zone}", zone)
    else:
        k_map = {zone: to_fraction(raw_k) for zone in zone_ids}
    for zone, val in k_map.items():
        if val < 0:
            raise ValidationError(f"k[{zone}] must be >= 0", zone)
    pairs_mode = raw.get("constraint3_pairs", "all-pairs")
    if pairs_mode not in ("all-pairs", "od-positive-only"):
        raise ValidationError(f"unknown constraint3_pairs mode: {pairs_mode}", "constraint3_pairs")
    time_scale = raw.get("time_scale", 1000)
    if not isinstance(time_scale, int) or time_scale < 1:
        raise ValidationError("time_scale must be a positive integer", "time_scale")
    allow_disc = bool(raw.get("allow_disconnected", False))
    return Parameters(
        p_elim=p_elim,
        alpha=alpha,
        k=k_map,
        constraint3_pairs=pairs_mode,
        time_scale=time_scale,
        allow_disconnected=allow_disc,
    )


def _parse_access(doc: Mapping, stops, zones, coords_stop, coords_zone, scale: int) -> np.ndarray:
    raw = doc.get("access")
    if not isinstance(raw, dict):
        raise ValidationError("missing required key: access", "access")
    n_t, n_u = len(stops), len(zones)
    table = np.empty((n_u, n_t), dtype=np.int64)
    if "matrix" in raw:
        zone_order = raw.get("zone_order")
        stop_order = raw.get("stop_order")
        if (
            not isinstance(zone_order, list)
            or not isinstance(stop_order, list)
            or sorted(map(str, zone_order)) != sorted(zones)
            or sorted(map(str, stop_order)) != sorted(stops)
        ):
            raise ValidationError("access zone_order/stop_order must enumerate all ids", "access")
        flat = raw["matrix"]
        if not isinstance(flat, list) or len(flat) != n_u * n_t:
            raise ValidationError(f"access matrix must hold {n_u * n_t} values", "access")
        zpos = {z: i for i, z in enumerate(zones)}
        spos = {s: i for i, s in enumerate(stops)}
        for i, z in enumerate(zone_order):
            for j, s in enumerate(stop_order):
                table[zpos[z], spos[s]] = _scaled_time(flat[i * n_t + j], scale, f"access[{z}][{s}]")
        return table
    if "euclidean" in raw:
        conf = raw["euclidean"]
        if not isinstance(conf, dict) or "walk_speed" not in conf:
            raise ValidationError("euclidean access needs walk_speed", "access")
        speed = float(to_fraction(conf["walk_speed"]))
        if speed <= 0:
            raise ValidationError("walk_speed must be positive", "walk_speed")
        if any(c is None for c in coords_stop) or any(c is None for c in coords_zone):
            raise ValidationError("euclidean access requires coordinates on every stop and zone", "access")
        for i in range(n_u):
            zx, zy = coords_zone[i]
            for j in range(n_t):
                sx, sy = coords_stop[j]
                dist = math.hypot(zx - sx, zy - sy) / speed
                table[i, j] = math.floor(dist * scale + 0.5)
        return table
    raise ValidationError("access must provide either a matrix or euclidean derivation", "access")


def instance_from_doc(doc: Any) -> Instance:
    """Validate a parsed JSON document into an Instance."""
    if not isinstance(doc, dict):
        raise ValidationError("instance document must be a JSON object")
    stop_pts = _parse_points(_want_list(doc, "stops"), "stop")
    if not stop_pts:
        raise ValidationError("at least one stop is required", "stops")
    zone_pts = _parse_points(_want_list(doc, "zones"), "zone")
    if not zone_pts:
        raise ValidationError("at least one zone is required", "zones")
    stop_ids = [s for s, _ in stop_pts]
    zone_ids = [z for z, _ in zone_pts]
    overlap = set(stop_ids) & set(zone_ids)
    if overlap:
        raise ValidationError(f"id used for both a stop and a zone: {sorted(overlap)[0]}", sorted(overlap)[0])

    params = _parse_params(doc, zone_ids)
    scale = params.time_scale
    stop_set = set(stop_ids)

    edges: List[TransitEdge] = []
    seen_pairs = set()
    for entry in _want_list(doc, "edges"):
        if not isinstance(entry, dict) or not {"a", "b", "cost"} <= entry.keys():
            raise ValidationError("each edge needs a, b and cost", "edges")
        a, b = entry["a"], entry["b"]
        for end in (a, b):
            if end not in stop_set:
                raise ValidationError(f"edge references unknown stop id: {end}", str(end))
        if a == b:
            raise ValidationError(f"self-loop edge at {a}", a)
        key = (a, b) if a <= b else (b, a)
        if key in seen_pairs:
            raise ValidationError(f"duplicate edge between {key[0]} and {key[1]}", key[0])
        seen_pairs.add(key)
        edges.append(TransitEdge(a=a, b=b, cost=_scaled_time(entry["cost"], scale, f"edge {a}-{b}")))

    access = _parse_access(
        doc, stop_ids, zone_ids, [c for _, c in stop_pts], [c for _, c in zone_pts], scale
    )

    od: Dict[Tuple[str, str], int] = {}
    for entry in _want_list(doc, "od"):
        if not isinstance(entry, dict) or not {"o", "d", "n"} <= entry.keys():
            raise ValidationError("each od entry needs o, d and n", "od")
        o, d, n = entry["o"], entry["d"], entry["n"]
        for z in (o, d):
            if z not in zone_ids:
                raise ValidationError(f"od references unknown zone id: {z}", str(z))
        if isinstance(n, Fraction):
            if n.denominator != 1:
                raise ValidationError(f"od count for ({o}, {d}) must be an integer", str(o))
            n = int(n)
        if not isinstance(n, int) or n < 0:
            raise ValidationError(f"od count for ({o}, {d}) must be a non-negative integer", str(o))
        if (o, d) in od:
            raise ValidationError(f"duplicate od entry for ({o}, {d})", str(o))
        if n > 0:
            od[(o, d)] = n

    lines: List[Line] = []
    if "lines" in doc and doc["lines"] is not None:
        seen_lines = set()
        for entry in _want_list(doc, "lines"):
            if not isinstance(entry, dict) or "id" not in entry or "stops" not in entry:
                raise ValidationError("each line needs an id and stops", "lines")
            lid = entry["id"]
            if lid in seen_lines:
                raise ValidationError(f"duplicate line id: {lid}", lid)
            seen_lines.add(lid)
            seq = entry["stops"]
            if not isinstance(seq, list) or not seq:
                raise ValidationError(f"line {lid} needs at least one stop", lid)
            for s in seq:
                if s not in stop_set:
                    raise ValidationError(f"line {lid} references unknown stop id: {s}", str(s))
            lines.append(Line(id=lid, stops=tuple(seq)))

    inst = Instance(
        stops=tuple(Stop(id=s, coord=c) for s, c in stop_pts),
        zones=tuple(UrbanZone(id=z, coord=c) for z, c in zone_pts),
        edges=tuple(edges),
        access=access,
        od=od,
        params=params,
        lines=tuple(lines),
    )
    if not params.allow_disconnected:
        _check_connected(inst)
    return inst


def _check_connected(inst: Instance) -> None:
    n = inst.n_t
    adj: List[List[int]] = [[] for _ in range(n)]
    idx = inst.stop_index
    for e in inst.edges:
        ia, ib = idx[e.a], idx[e.b]
        adj[ia].append(ib)
        adj[ib].append(ia)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        node = stack.pop()
        for nxt in adj[node]:
            if not seen[nxt]:
                seen[nxt] = True
                count += 1
                stack.append(nxt)
    if count != n:
        lost = next(inst.stops[i].id for i in range(n) if not seen[i])
        raise ConnectivityError(
            f"stop graph is disconnected (stop {lost} unreachable from {inst.stops[0].id})", lost
        )


# ----------------------------------------------------------------------
# warnings and serialization
# ----------------------------------------------------------------------


def validate_instance(inst: Instance) -> List[Warning]:
    """Non-fatal advisories; fatal issues are raised by load_instance."""
    out: List[Warning] = []
    for zone in inst.zone_ids:
        if inst.params.k[zone] < 1:
            out.append(Warning("k-below-1", f"k below 1 for {zone}: candidate set may shrink to nothing", zone))
    for (o, d), n in sorted(inst.od.items()):
        if o == d and n > 0:
            out.append(Warning("diagonal-demand", f"diagonal demand at {o} (n={n})", o))
    if not any(n > 0 for n in inst.od.values()):
        out.append(Warning("zero-demand", "instance has no positive demand; objective is constant", ""))
    return out


def serialize_instance(inst: Instance) -> dict:
    """JSON-able document; always emits internal integer units, time_scale 1.

    load(serialize(inst)) == inst (equality ignores the scale directive) and
    serialize is a fixed point, so round-trips are exact for any input scale.
    """

    def point(p):
        entry: Dict[str, Any] = {"id": p.id}
        if p.coord is not None:
            entry["x"], entry["y"] = p.coord[0], p.coord[1]
        return entry

    params = inst.params
    doc: Dict[str, Any] = {
        "stops": [point(s) for s in inst.stops],
        "zones": [point(z) for z in inst.zones],
        "edges": [{"a": e.a, "b": e.b, "cost": e.cost} for e in inst.edges],
        "access": {
            "matrix": [int(v) for v in inst.access.reshape(-1)],
            "zone_order": list(inst.zone_ids),
            "stop_order": list(inst.stop_ids),
        },
        "od": [{"o": o, "d": d, "n": n} for (o, d), n in sorted(inst.od.items())],
        "params": {
            "p_elim": str(params.p_elim),
            "alpha": str(params.alpha),
            "k": {zone: str(v) for zone, v in params.k.items()},
            "constraint3_pairs": params.constraint3_pairs,
            "time_scale": 1,
            "allow_disconnected": params.allow_disconnected,
        },
    }
    if inst.lines:
        doc["lines"] = [{"id": l.id, "stops": list(l.stops)} for l in inst.lines]
    return doc


def dump_instance(inst: Instance, sink) -> None:
    sink.write(json.dumps(serialize_instance(inst), indent=1))


def instance_hash(inst: Instance) -> str:
    from .common import content_id

    return content_id(serialize_instance(inst))


_OVERRIDE_KEYS = ("p_elim", "alpha", "k", "pairs", "constraint3_pairs", "time_limit", "gap", "seed")


def apply_param_overrides(doc: dict, overrides: Mapping) -> dict:
    """Return a copy of an instance document with selected params replaced.

    Accepts the CLI/service override vocabulary; solver-only keys
    (time_limit, gap, seed) are tolerated and ignored here.
    """
    unknown = set(overrides) - set(_OVERRIDE_KEYS)
    if unknown:
        raise ValidationError(f"unknown override {sorted(unknown)[0]!r}")
    out = dict(doc)
    params = dict(out.get("params", {}))
    for key, val in overrides.items():
        if val is None or key in ("time_limit", "gap", "seed"):
            continue
        if key == "pairs":
            mapping = {"all": "all-pairs", "od": "od-positive-only"}
            if val not in mapping:
                raise ValidationError(f"--pairs must be 'all' or 'od', got {val!r}")
            params["constraint3_pairs"] = mapping[val]
        else:
            params[key] = val
    out["params"] = params
    return out
