"""Integer-program construction, LP text round-trip, assignment checks.

The linearized model and the direct set evaluation must agree subset by
subset: that equivalence is the core correctness claim, so it is tested
exhaustively on small instances.
"""

import io
import itertools
from fractions import Fraction

import numpy as np
import pytest

from osdnp import (
    ConsistencyError,
    EmptyCandidateError,
    ValidationError,
    build_milp,
    budget,
    compute_metrics,
    decode_assignment,
    export_lp,
    instance_from_doc,
    name_map_json,
    parse_lp,
    random_instance,
    read_values,
)
from osdnp.evaluate import mask_feasible
from osdnp.milp import (
    assignment_satisfies,
    forced_assignment,
    normalized_int_constraints,
    objective_value,
)

from conftest import corridor_doc


@pytest.fixture
def corridor_milp(corridor_metrics):
    return build_milp(corridor_metrics)


def test_corridor_model_shape(corridor_milp):
    m = corridor_milp
    assert len(m.binaries) == 7  # 3 x + 4 y
    assert m.continuous == ("dacc_u1", "dacc_u2")
    assert len(m.constraints) == 16
    assert m.big_m == {"u1": 2, "u2": 2}
    assert m.budget == 2
    assert m.pc_const == 60
    assert m.objective == {"dacc_u1": 10, "dacc_u2": 10}
    assert m.bounds == {"dacc_u1": (0, 2), "dacc_u2": (0, 2)}


def test_corridor_constraint_coefficients(corridor_milp):
    m = corridor_milp
    cover = m.constraint("cover_u1")
    assert cover.terms == {"x_v1": 1, "x_v2": 1} and cover.sense == ">=" and cover.rhs == 1
    # diagonal pair: 2 dacc_u1 <= floor(2 * 2) - 0
    diag = m.constraint("pair_u1_u1")
    assert diag.terms == {"dacc_u1": 2} and diag.rhs == 4
    cross = m.constraint("pair_u1_u2")
    assert cross.terms == {"dacc_u1": 1, "dacc_u2": 1} and cross.rhs == 10
    card = m.constraint("card")
    assert card.terms == {"x_v1": 1, "x_v2": 1, "x_v3": 1} and card.rhs == 2
    ub = m.constraint("linUB_u1_v2")
    assert ub.terms == {"dacc_u1": 1, "x_v2": 2} and ub.rhs == 4
    lb = m.constraint("linLB_u1_v1")
    assert lb.terms == {"x_v1": -2, "dacc_u1": -1, "y_u1_v1": 2, "y_u1_v2": -2}
    assert lb.rhs == -1
    lin_sum = m.constraint("linSum_u2")
    assert lin_sum.sense == "=" and lin_sum.rhs == 1


def test_empty_candidate_zone_rejected():
    doc = corridor_doc(k={"u1": 2, "u2": 0})
    doc["access"]["matrix"] = [1, 2, 5, 5, 2, 1]
    m = compute_metrics(instance_from_doc(doc))
    # k = 0 with d_acc > 0 keeps the nearest stop only (cap = 0 < 1)
    with pytest.raises(EmptyCandidateError) as err:
        build_milp(m)
    assert "u2" in str(err.value)


def test_prune_implied_pairs(corridor_metrics):
    full = build_milp(corridor_metrics)
    pruned = build_milp(corridor_metrics, prune_implied_pairs=True)
    # every corridor pair cap is implied by the dacc bounds
    assert len(pruned.constraints) == 13
    assert not [c for c in pruned.constraints if c.name.startswith("pair_")]
    # equivalence: same verdict on every subset
    for bits in itertools.product([0, 1], repeat=3):
        kept = {s for s, b in zip(("v1", "v2", "v3"), bits) if b}
        a, _ = assignment_satisfies(full, forced_assignment(full, kept))
        b, _ = assignment_satisfies(pruned, forced_assignment(pruned, kept))
        assert a == b, kept


def test_name_sanitization_and_collisions():
    doc = corridor_doc()
    doc["stops"][0]["id"] = "v.1"
    doc["stops"][1]["id"] = "v_1"
    doc["edges"] = [
        {"a": "v.1", "b": "v_1", "cost": 3},
        {"a": "v_1", "b": "v3", "cost": 3},
    ]
    doc["access"]["stop_order"] = ["v.1", "v_1", "v3"]
    model = build_milp(compute_metrics(instance_from_doc(doc)))
    xs = [model.x_of_stop["v.1"], model.x_of_stop["v_1"]]
    assert xs[0] == "x_v_1" and xs[1] == "x_v_1_2"
    names = name_map_json(model)["variables"]
    assert names["x_v_1"] == {"kind": "stop", "stop": "v.1"}
    assert names["x_v_1_2"] == {"kind": "stop", "stop": "v_1"}
    assert names["dacc_u1"] == {"kind": "access", "zone": "u1"}
    assert names[model.y_of[("u1", "v.1")]] == {"kind": "assign", "zone": "u1", "stop": "v.1"}


def test_lp_export_exact_header(corridor_milp):
    buf = io.StringIO()
    export_lp(corridor_milp, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "Minimize"
    assert lines[1] == " obj: 10 dacc_u1 + 10 dacc_u2"
    assert lines[2] == "Subject To"
    assert lines[3] == " cover_u1: x_v1 + x_v2 >= 1"
    assert lines[4] == " linUB_u1_v1: dacc_u1 + 2 x_v1 <= 3"
    assert lines[5] == " linLB_u1_v1: - 2 x_v1 - dacc_u1 + 2 y_u1_v1 - 2 y_u1_v2 <= -1"
    assert "Bounds" in lines and "Binary" in lines and lines[-1] == "End"
    assert " 0 <= dacc_u1 <= 2" in lines


def _round_trip_equal(model):
    buf = io.StringIO()
    export_lp(model, buf)
    parsed = parse_lp(buf.getvalue())
    want_obj = {v: c for v, c in model.objective.items() if c != 0}
    got_obj = {v: c for v, c in parsed.objective.items() if c != 0}
    assert got_obj == want_obj
    assert parsed.binaries == model.binaries
    for var, (lo, hi) in model.bounds.items():
        assert parsed.bounds[var] == (lo, hi)
    assert len(parsed.constraints) == len(model.constraints)
    by_name = {c.name: c for c in parsed.constraints}
    for con in model.constraints:
        got = by_name[con.name]
        assert dict(got.terms) == dict(con.terms), con.name
        assert got.sense == con.sense and got.rhs == con.rhs, con.name


def test_lp_round_trip_corridor(corridor_milp):
    _round_trip_equal(corridor_milp)


def test_lp_round_trip_fractional_alpha():
    inst = random_instance(3, n_t=7, n_u=4, alpha=Fraction(8, 5), k=Fraction(5, 2))
    _round_trip_equal(build_milp(compute_metrics(inst)))


def test_lp_round_trip_zero_demand_zone():
    doc = corridor_doc()
    doc["zones"].append({"id": "u3", "x": 3.0, "y": 1.0})
    doc["access"]["matrix"] = [1, 2, 5, 5, 2, 1, 7, 4, 7]
    doc["access"]["zone_order"] = ["u1", "u2", "u3"]
    model = build_milp(compute_metrics(instance_from_doc(doc)))
    assert model.objective["dacc_u3"] == 0
    _round_trip_equal(model)


def test_parse_lp_tolerates_comments_and_spacing():
    text = "\n".join(
        [
            "\\ written by hand",
            "Minimize",
            " obj: 2 a + b",
            "Subject To",
            " one: a + b <= 3 \\ trailing note",
            " two: - a >= -2",
            "Bounds",
            " 0 <= a <= 5",
            " b free",
            "Binary",
            "End",
        ]
    )
    parsed = parse_lp(text)
    assert parsed.objective == {"a": 2, "b": 1}
    assert parsed.constraints[1].terms == {"a": -1}
    assert parsed.constraints[1].rhs == -2
    assert parsed.bounds["b"] == (0, None)


def test_parse_lp_errors():
    with pytest.raises(ValidationError):
        parse_lp("x + y <= 3")  # no section header
    with pytest.raises(ValidationError):
        parse_lp("Subject To\n bad: x + y\nEnd")  # no sense


def test_forced_assignment_matches_set_semantics(corridor_milp, corridor_metrics):
    vals = forced_assignment(corridor_milp, {"v1", "v3"})
    assert vals["x_v1"] == 1 and vals["x_v2"] == 0 and vals["x_v3"] == 1
    assert vals["dacc_u1"] == 1 and vals["dacc_u2"] == 1
    assert vals["y_u1_v1"] == 1 and vals["y_u1_v2"] == 0
    ok, failed = assignment_satisfies(corridor_milp, vals)
    assert ok and not failed
    assert objective_value(corridor_milp, vals) + corridor_milp.pc_const == 80


def test_forced_assignment_infeasible_names_failing_rows(corridor_milp):
    ok, failed = assignment_satisfies(corridor_milp, forced_assignment(corridor_milp, {"v1"}))
    assert not ok
    assert "bound:dacc_u2" in failed
    assert "cover_u2" in failed
    assert "pair_u2_u2" in failed


def test_model_and_set_agree_on_all_subsets():
    """Exhaustive equivalence on seeded instances: the program accepts a
    subset exactly when the direct constraint check does, with equal cost."""
    for seed in range(10):
        inst = random_instance(seed, n_t=6, n_u=4)
        metrics = compute_metrics(inst)
        model = build_milp(metrics)
        normalized = normalized_int_constraints(model)
        cap = budget(inst)
        ids = inst.stop_ids
        for bits in itertools.product([0, 1], repeat=inst.n_t):
            kept = {ids[i] for i in range(inst.n_t) if bits[i]}
            vals = forced_assignment(model, kept)
            ok, _ = assignment_satisfies(model, vals, normalized=normalized)
            mask = np.array(bits, dtype=bool)
            feas, twt, _ = mask_feasible(metrics, mask, cap)
            assert ok == feas, (seed, kept)
            if feas:
                assert objective_value(model, vals) + model.pc_const == twt, (seed, kept)


def test_linearization_forces_access_value():
    """dacc is pinned: any integer perturbation of a feasible assignment's
    access variable breaks a linearization row or a bound."""
    checked = 0
    for seed in range(40):
        inst = random_instance(seed, n_t=7, n_u=4)
        metrics = compute_metrics(inst)
        model = build_milp(metrics)
        cap = budget(inst)
        ids = inst.stop_ids
        rng = np.random.default_rng(seed)
        for _ in range(6):
            bits = rng.random(inst.n_t) < 0.6
            kept = {ids[i] for i in range(inst.n_t) if bits[i]}
            vals = forced_assignment(model, kept)
            ok, _ = assignment_satisfies(model, vals)
            if not ok:
                continue
            for zone in inst.zone_ids:
                var = model.dacc_of_zone[zone]
                for delta in (-1, 1):
                    bumped = dict(vals)
                    bumped[var] = vals[var] + delta
                    still_ok, failed = assignment_satisfies(model, bumped)
                    assert not still_ok, (seed, zone, delta)
                    assert failed, (seed, zone, delta)
                    checked += 1
    assert checked >= 100


def test_decode_assignment_round_trip(corridor_milp, corridor_metrics):
    vals = forced_assignment(corridor_milp, {"v1", "v3"})
    # float noise within tolerance must decode cleanly
    noisy = {k: v + 4e-7 if k.startswith(("x_", "y_")) else v for k, v in vals.items()}
    sel = decode_assignment(corridor_milp, noisy, corridor_metrics)
    assert sel.kept == frozenset({"v1", "v3"})
    assert sel.twt == 80 and sel.feasible


def test_decode_assignment_missing_vars_are_zero(corridor_milp, corridor_metrics):
    vals = forced_assignment(corridor_milp, {"v1", "v3"})
    sparse = {k: v for k, v in vals.items() if v != 0}
    sel = decode_assignment(corridor_milp, sparse, corridor_metrics)
    assert sel.kept == frozenset({"v1", "v3"})


def test_decode_assignment_rejects_fractional(corridor_milp, corridor_metrics):
    vals = forced_assignment(corridor_milp, {"v1", "v3"})
    vals["x_v2"] = Fraction(2, 5)
    with pytest.raises(ValidationError):
        decode_assignment(corridor_milp, vals, corridor_metrics)


def test_decode_infeasible_selection(corridor_milp, corridor_metrics):
    sel = decode_assignment(corridor_milp, forced_assignment(corridor_milp, {"v1"}), corridor_metrics)
    assert not sel.feasible
    assert {v.kind for v in sel.violations} == {"access", "delay"}


def test_read_values():
    text = "x_v1 1\n# solver banner\ndacc_u1 0.5\nother 1/2\n\n"
    vals = read_values(io.StringIO(text))
    assert vals == {"x_v1": 1, "dacc_u1": Fraction(1, 2), "other": Fraction(1, 2)}
    with pytest.raises(ValidationError):
        read_values("x_v1 1 extra")
