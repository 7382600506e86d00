"""Shared fixtures: a three-stop corridor everything can be checked on by hand.

Corridor layout: stops v1 - v2 - v3 in a row, edge cost 3 each, two zones.
Zone u1 reaches the stops in (1, 2, 5), zone u2 mirrored (5, 2, 1); the only
demand is 10 trips u1 -> u2.  With alpha = 2 and k = 2 every constraint is
small enough to verify by hand.
"""

import copy
from fractions import Fraction

import numpy as np
import pytest

from osdnp import compute_metrics, instance_from_doc

INF = 2 ** 62


def corridor_doc(p_elim="1/3", with_lines=False, **params):
    doc = {
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
        "params": {"p_elim": p_elim, "alpha": 2, "k": 2, "time_scale": 1},
    }
    if with_lines:
        doc["lines"] = [
            {"id": "l1", "stops": ["v1", "v2"]},
            {"id": "l2", "stops": ["v2", "v3"]},
        ]
    doc["params"].update(params)
    return copy.deepcopy(doc)


@pytest.fixture
def corridor():
    return instance_from_doc(corridor_doc())


@pytest.fixture
def corridor_metrics(corridor):
    return compute_metrics(corridor)


@pytest.fixture
def corridor06_metrics():
    return compute_metrics(instance_from_doc(corridor_doc(p_elim="3/5")))


def slow_paths(n, edges):
    """Reference all-pairs shortest paths by plain relaxation (undirected)."""
    dist = np.full((n, n), INF, dtype=object)
    for i in range(n):
        dist[i, i] = 0
    for a, b, w in edges:
        dist[a, b] = min(dist[a, b], w)
        dist[b, a] = min(dist[b, a], w)
    for _ in range(n):
        changed = False
        for a, b, w in edges:
            for s in range(n):
                if dist[s, a] + w < dist[s, b]:
                    dist[s, b] = dist[s, a] + w
                    changed = True
                if dist[s, b] + w < dist[s, a]:
                    dist[s, a] = dist[s, b] + w
                    changed = True
        if not changed:
            break
    return np.array([[min(int(x), INF) for x in row] for row in dist], dtype=np.int64)


def frac(x) -> Fraction:
    return Fraction(x)
