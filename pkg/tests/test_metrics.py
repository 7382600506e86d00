"""Shortest paths, nearest-stop assignment, candidate sets, integer caps."""

import dataclasses
import io
import random
from fractions import Fraction

import numpy as np
import pytest

from osdnp import UnreachablePairError, compute_metrics, d_sol_array, instance_from_doc, opt_v, random_instance
from osdnp.common import INF, floor_frac
from osdnp.metrics import all_pairs_shortest_paths, export_metrics_csv

from conftest import corridor_doc, slow_paths


def test_corridor_basics(corridor_metrics):
    m = corridor_metrics
    assert m.acc == {"u1": "v1", "u2": "v3"}
    assert m.d_acc == {"u1": 1, "u2": 1}
    assert m.access_cap.tolist() == [2, 2]
    assert m.candidates == {"u1": ("v1", "v2"), "u2": ("v3", "v2")}
    assert m.weight == {"u1": 10, "u2": 10}
    assert m.pc_const == 60
    assert m.twt_baseline == 80
    assert m.pc.tolist() == [[0, 3, 6], [3, 0, 3], [6, 3, 0]]
    assert m.pc_zone.tolist() == [[0, 6], [6, 0]]
    # caps: floor(alpha * OptV) - pc leg
    assert m.pair_cap.tolist() == [[4, 10], [10, 4]]
    assert opt_v(m, "u1", "u2") == 8
    assert opt_v(m, "u1", "u1") == 2


def test_shortest_paths_match_slow_reference():
    for seed in range(12):
        inst = random_instance(seed, n_t=9, n_u=3)
        pc = all_pairs_shortest_paths(inst)
        idx = inst.stop_index
        ref = slow_paths(inst.n_t, [(idx[e.a], idx[e.b], e.cost) for e in inst.edges])
        assert np.array_equal(pc, ref), f"seed {seed}"


def test_shortest_paths_zero_cost_edges():
    doc = corridor_doc()
    doc["edges"][0]["cost"] = 0
    inst = instance_from_doc(doc)
    pc = all_pairs_shortest_paths(inst)
    assert pc.tolist() == [[0, 0, 3], [0, 0, 3], [3, 3, 0]]


def test_nearest_stop_tie_is_lexicographic():
    doc = corridor_doc()
    doc["access"]["matrix"] = [2, 2, 5, 5, 2, 2]
    m = compute_metrics(instance_from_doc(doc))
    assert m.acc == {"u1": "v1", "u2": "v2"}
    # candidate order is ascending (d, id)
    assert m.candidates["u1"][0] == "v1"
    assert m.candidates["u2"][0] == "v2"


def test_nearest_stop_tie_uses_string_order_not_index():
    doc = corridor_doc()
    # rename so index order and id order disagree: v10 sorts before v2
    doc["stops"][0]["id"] = "v10"
    doc["edges"][0]["a"] = "v10"
    doc["access"]["stop_order"] = ["v10", "v2", "v3"]
    doc["access"]["matrix"] = [2, 2, 5, 5, 2, 1]
    m = compute_metrics(instance_from_doc(doc))
    assert m.acc["u1"] == "v10"


def test_access_cap_floor():
    doc = corridor_doc(k="3/2")
    m = compute_metrics(instance_from_doc(doc))
    # d_acc 1, cap floor(3/2) = 1: only the nearest stop qualifies
    assert m.access_cap.tolist() == [1, 1]
    assert m.candidates == {"u1": ("v1",), "u2": ("v3",)}


def test_candidate_sets_respect_cap_boundary():
    doc = corridor_doc(k=5)
    m = compute_metrics(instance_from_doc(doc))
    # cap 5 exactly admits the far stop at distance 5
    assert m.candidates["u1"] == ("v1", "v2", "v3")


def test_pair_caps_match_rational_reference():
    for seed in range(10):
        inst = random_instance(seed, n_t=8, n_u=5, alpha=Fraction(8, 5), k=Fraction(5, 2))
        m = compute_metrics(inst)
        alpha = inst.params.alpha
        for i in range(inst.n_u):
            for j in range(inst.n_u):
                opt = Fraction(int(m.d_acc_arr[i]) + int(m.d_acc_arr[j]) + int(m.pc_zone[i, j]))
                want = floor_frac(alpha * opt) - int(m.pc_zone[i, j])
                assert m.pair_cap[i, j] == want
                # the cap is exact: lhs <= cap iff the rational constraint holds
                cap = int(m.pair_cap[i, j])
                assert cap + int(m.pc_zone[i, j]) <= alpha * opt
                assert cap + 1 + int(m.pc_zone[i, j]) > alpha * opt


def test_od_positive_only_mask(corridor):
    doc = corridor_doc()
    doc["params"]["constraint3_pairs"] = "od-positive-only"
    m = compute_metrics(instance_from_doc(doc))
    assert m.pair_mask.tolist() == [[False, True], [True, False]]
    assert m.pair_cap[0, 0] == INF
    assert m.pair_cap[0, 1] == 10
    full = compute_metrics(corridor)
    assert full.pair_mask.all()


def _split_doc():
    """Two disconnected two-stop islands, demand across them."""
    return {
        "stops": [{"id": f"v{i}"} for i in range(1, 5)],
        "zones": [{"id": "u1"}, {"id": "u2"}],
        "edges": [
            {"a": "v1", "b": "v2", "cost": 3},
            {"a": "v3", "b": "v4", "cost": 3},
        ],
        "access": {
            "matrix": [1, 2, 9, 9, 9, 9, 1, 2],
            "zone_order": ["u1", "u2"],
            "stop_order": ["v1", "v2", "v3", "v4"],
        },
        "od": [{"o": "u1", "d": "u2", "n": 10}],
        "params": {"p_elim": 0, "alpha": 2, "k": 2, "time_scale": 1, "allow_disconnected": True},
    }


def test_unreachable_pair_dropped_when_allowed():
    m = compute_metrics(instance_from_doc(_split_doc()))
    assert m.dropped_pairs == (("u1", "u2"),)
    assert m.weight == {"u1": 0, "u2": 0}
    assert m.pc_const == 0
    assert m.pair_cap[0, 1] == INF  # unreachable pair is unconstrained
    assert m.pair_cap[0, 0] == 4


def test_unreachable_pair_raises_when_strict():
    inst = instance_from_doc(_split_doc())
    strict = dataclasses.replace(
        inst, params=dataclasses.replace(inst.params, allow_disconnected=False)
    )
    with pytest.raises(UnreachablePairError) as err:
        compute_metrics(strict)
    assert "u1" in str(err.value) and "u2" in str(err.value)


def test_pc_row_restriction_above_limit(monkeypatch, corridor):
    import osdnp.metrics as metrics_mod

    full = compute_metrics(corridor)
    monkeypatch.setattr(metrics_mod, "PC_FULL_LIMIT", 2)
    small = compute_metrics(corridor)
    assert small.pc is None
    assert np.array_equal(small.pc_zone, full.pc_zone)
    assert small.pc_const == full.pc_const


def test_d_sol_array(corridor_metrics):
    mask = np.array([True, False, True])
    assert d_sol_array(corridor_metrics, mask).tolist() == [1, 1]
    mask = np.array([False, True, False])
    assert d_sol_array(corridor_metrics, mask).tolist() == [2, 2]
    assert d_sol_array(corridor_metrics, np.zeros(3, dtype=bool)).tolist() == [INF, INF]


def test_weights_accumulate_both_directions():
    doc = corridor_doc()
    doc["od"] = [
        {"o": "u1", "d": "u2", "n": 10},
        {"o": "u2", "d": "u1", "n": 4},
        {"o": "u1", "d": "u1", "n": 2},
    ]
    m = compute_metrics(instance_from_doc(doc))
    # u1: 10 out + 4 in + 2 + 2 diagonal, u2: 10 in + 4 out
    assert m.weight == {"u1": 18, "u2": 14}
    assert m.pc_const == 60 + 24 + 0
    assert m.twt_baseline == 80 + 4 * 8 + 2 * 2


def test_metrics_csv(corridor_metrics):
    buf = io.StringIO()
    export_metrics_csv(corridor_metrics, buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "zone_id,acc_stop,d_acc,n_candidates,weight"
    assert lines[1] == "u1,v1,1,2,10"
    assert lines[2] == "u2,v3,1,2,10"


def test_metrics_deterministic_across_builds():
    rng = random.Random(7)
    for _ in range(5):
        seed = rng.randrange(10 ** 6)
        a = compute_metrics(random_instance(seed))
        b = compute_metrics(random_instance(seed))
        assert np.array_equal(a.pc_zone, b.pc_zone)
        assert np.array_equal(a.cand_idx, b.cand_idx)
        assert a.twt_baseline == b.twt_baseline
