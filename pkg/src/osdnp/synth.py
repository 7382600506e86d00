"""Synthetic instance generators for demos, benchmarks and tests."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .model import Instance, instance_from_doc


def demo_doc() -> dict:
    """Tiny three-stop corridor with two lines; the service demo fixture."""
    return {
        "stops": [
            {"id": "v1", "x": 0.0, "y": 0.0},
            {"id": "v2", "x": 3.0, "y": 0.0},
            {"id": "v3", "x": 6.0, "y": 0.0},
        ],
        "zones": [
            {"id": "u1", "x": 0.0, "y": 1.0},
            {"id": "u2", "x": 6.0, "y": 1.0},
        ],
        "edges": [
            {"a": "v1", "b": "v2", "cost": 3},
            {"a": "v2", "b": "v3", "cost": 3},
        ],
        "access": {
            "matrix": [1, 2, 5, 5, 2, 1],
            "zone_order": ["u1", "u2"],
            "stop_order": ["v1", "v2", "v3"],
        },
        "od": [{"o": "u1", "d": "u2", "n": 10}],
        "params": {"p_elim": "3/5", "alpha": 2, "k": 2, "time_scale": 1},
        "lines": [
            {"id": "l1", "stops": ["v1", "v2"]},
            {"id": "l2", "stops": ["v2", "v3"]},
        ],
    }


def _spanning_edges(rng: random.Random, points: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    n = len(points)
    order = list(range(n))
    rng.shuffle(order)
    edges = []
    for pos in range(1, n):
        a = order[pos]
        b = order[rng.randrange(pos)]
        edges.append((min(a, b), max(a, b)))
    return edges


def _dist(p: Tuple[int, int], q: Tuple[int, int]) -> int:
    return max(1, int(round(math.hypot(p[0] - q[0], p[1] - q[1]))))


def random_instance(
    seed: int,
    n_t: int = 8,
    n_u: int = 5,
    p_elim=Fraction(1, 3),
    alpha=Fraction(2),
    k=Fraction(2),
    od_density: float = 0.5,
    extra_edges: Optional[int] = None,
    lines: int = 0,
    constraint3_pairs: str = "all-pairs",
) -> Instance:
    """Seeded random instance on planar points; deterministic per seed.

    Stops sit on random grid points, edges form a random spanning tree plus
    a few chords with geometric costs, access times are planar distances
    with small jitter, and demand is a sparse random OD matrix.
    """
    rng = random.Random(seed)
    span = 60
    stop_pts = [(rng.randint(0, span), rng.randint(0, span)) for _ in range(n_t)]
    zone_pts = [(rng.randint(0, span), rng.randint(0, span)) for _ in range(n_u)]
    stop_ids = [f"v{i + 1}" for i in range(n_t)]
    zone_ids = [f"u{i + 1}" for i in range(n_u)]

    edge_set = set(_spanning_edges(rng, stop_pts))
    n_extra = (n_t // 2) if extra_edges is None else extra_edges
    tries = 0
    while len(edge_set) < n_t - 1 + n_extra and tries < 50 * (n_extra + 1):
        tries += 1
        a, b = rng.randrange(n_t), rng.randrange(n_t)
        if a != b:
            edge_set.add((min(a, b), max(a, b)))
    edges = [
        {"a": stop_ids[a], "b": stop_ids[b], "cost": _dist(stop_pts[a], stop_pts[b])}
        for a, b in sorted(edge_set)
    ]

    access = []
    for zp in zone_pts:
        for sp in stop_pts:
            access.append(_dist(zp, sp) + rng.randint(0, 2))

    od = []
    for i, o in enumerate(zone_ids):
        for j, d in enumerate(zone_ids):
            if i != j and rng.random() < od_density:
                od.append({"o": o, "d": d, "n": rng.randint(1, 20)})
    if not od:
        od.append({"o": zone_ids[0], "d": zone_ids[-1], "n": 5})

    doc = {
        "stops": [{"id": s, "x": float(p[0]), "y": float(p[1])} for s, p in zip(stop_ids, stop_pts)],
        "zones": [{"id": z, "x": float(p[0]), "y": float(p[1])} for z, p in zip(zone_ids, zone_pts)],
        "edges": edges,
        "access": {"matrix": access, "zone_order": zone_ids, "stop_order": stop_ids},
        "od": od,
        "params": {
            "p_elim": str(p_elim),
            "alpha": str(alpha),
            "k": str(k),
            "time_scale": 1,
            "constraint3_pairs": constraint3_pairs,
        },
    }
    if lines > 0:
        docs = []
        for li in range(lines):
            size = rng.randint(2, max(2, min(n_t, 8)))
            docs.append({"id": f"l{li + 1}", "stops": rng.sample(stop_ids, size)})
        doc["lines"] = docs
    return instance_from_doc(doc)


def grid_city(
    seed: int = 0,
    cols: int = 10,
    rows: int = 6,
    n_u: int = 100,
    p_elim=Fraction(1, 2),
    alpha=Fraction(3),
    k=Fraction(3),
    od_pairs: int = 300,
    lines: int = 16,
) -> Instance:
    """Desk-scale synthetic city: stops on a cols x rows grid, zones scattered.

    Defaults give 60 stops and 100 zones with half the stops to delete,
    sized for end-to-end runs of the exact solver.
    """
    rng = random.Random(seed)
    spacing = 10
    n_t = cols * rows
    stop_ids = [f"v{i + 1}" for i in range(n_t)]
    stop_pts = [(c * spacing, r * spacing) for r in range(rows) for c in range(cols)]

    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append({"a": stop_ids[i], "b": stop_ids[i + 1], "cost": spacing})
            if r + 1 < rows:
                edges.append({"a": stop_ids[i], "b": stop_ids[i + cols], "cost": spacing})

    zone_ids = [f"u{i + 1}" for i in range(n_u)]
    zone_pts = [
        (rng.randint(0, (cols - 1) * spacing), rng.randint(0, (rows - 1) * spacing))
        for _ in range(n_u)
    ]
    access = []
    for zp in zone_pts:
        for sp in stop_pts:
            access.append(_dist(zp, sp))

    seen = set()
    od = []
    while len(od) < od_pairs:
        i, j = rng.randrange(n_u), rng.randrange(n_u)
        if i == j or (i, j) in seen:
            continue
        seen.add((i, j))
        od.append({"o": zone_ids[i], "d": zone_ids[j], "n": rng.randint(1, 30)})

    line_docs = []
    for li in range(lines):
        # lines run along a full row or column of the grid
        if li % 2 == 0:
            r = rng.randrange(rows)
            stops = [stop_ids[r * cols + c] for c in range(cols)]
        else:
            c = rng.randrange(cols)
            stops = [stop_ids[r * cols + c] for r in range(rows)]
        line_docs.append({"id": f"l{li + 1}", "stops": stops})

    doc = {
        "stops": [{"id": s, "x": float(p[0]), "y": float(p[1])} for s, p in zip(stop_ids, stop_pts)],
        "zones": [{"id": z, "x": float(p[0]), "y": float(p[1])} for z, p in zip(zone_ids, zone_pts)],
        "edges": edges,
        "access": {"matrix": access, "zone_order": zone_ids, "stop_order": stop_ids},
        "od": od,
        "params": {"p_elim": str(p_elim), "alpha": str(alpha), "k": str(k), "time_scale": 1},
        "lines": line_docs,
    }
    return instance_from_doc(doc)
