"""Instance parsing, validation, serialization and hashing."""

import json
from fractions import Fraction

import numpy as np
import pytest

from osdnp import (
    ConnectivityError,
    Instance,
    ParseError,
    ValidationError,
    instance_from_doc,
    instance_hash,
    load_instance,
    serialize_instance,
    validate_instance,
)
from osdnp.model import apply_param_overrides

from conftest import corridor_doc


def test_corridor_parses(corridor):
    assert corridor.n_t == 3
    assert corridor.n_u == 2
    assert corridor.stop_ids == ("v1", "v2", "v3")
    assert corridor.zone_ids == ("u1", "u2")
    assert corridor.access.tolist() == [[1, 2, 5], [5, 2, 1]]
    assert corridor.params.p_elim == Fraction(1, 3)
    assert corridor.k_for("u1") == 2


def test_load_instance_accepts_text_and_stream(tmp_path):
    text = json.dumps(corridor_doc())
    a = load_instance(text)
    path = tmp_path / "inst.json"
    path.write_text(text)
    with open(path) as fh:
        b = load_instance(fh)
    assert a == b


def test_load_instance_bad_json():
    with pytest.raises(ParseError):
        load_instance("{not json")
    with pytest.raises(ValidationError):
        load_instance("[]", format="json")  # parses, wrong shape
    with pytest.raises(ParseError):
        load_instance("{}", format="yaml")


def test_time_scaling_rounds_half_up():
    doc = corridor_doc()
    doc["params"]["time_scale"] = 1000
    doc["edges"][0]["cost"] = 0.0015  # 1.5 scaled units
    doc["access"]["matrix"][0] = 0.0005  # exactly .5 rounds up
    inst = instance_from_doc(doc)
    a, b = sorted([inst.edges[0].cost, inst.edges[1].cost])
    assert (a, b) == (2, 3000)
    assert inst.access[0, 0] == 1


def test_string_rationals_in_params():
    doc = corridor_doc(p_elim="2/6", alpha="3/2", k="7/3")
    inst = instance_from_doc(doc)
    assert inst.params.p_elim == Fraction(1, 3)
    assert inst.params.alpha == Fraction(3, 2)
    assert inst.params.k["u2"] == Fraction(7, 3)


def test_float_params_read_as_decimals():
    inst = instance_from_doc(corridor_doc(p_elim=0.35))
    assert inst.params.p_elim == Fraction(35, 100)


def test_param_range_errors():
    with pytest.raises(ValidationError):
        instance_from_doc(corridor_doc(p_elim="3/2"))
    with pytest.raises(ValidationError):
        instance_from_doc(corridor_doc(p_elim=-0.1))
    with pytest.raises(ValidationError):
        instance_from_doc(corridor_doc(alpha="1/2"))
    with pytest.raises(ValidationError):
        instance_from_doc(corridor_doc(k=-1))
    with pytest.raises(ValidationError):
        instance_from_doc(corridor_doc(time_scale=0))


def test_k_mapping_forms():
    inst = instance_from_doc(corridor_doc(k={"u1": 2, "u2": "5/2"}))
    assert inst.k_for("u2") == Fraction(5, 2)
    with pytest.raises(ValidationError):  # incomplete mapping
        instance_from_doc(corridor_doc(k={"u1": 2}))
    with pytest.raises(ValidationError):  # unknown zone
        instance_from_doc(corridor_doc(k={"u1": 2, "u2": 2, "u9": 2}))


def test_duplicate_and_bad_ids():
    doc = corridor_doc()
    doc["stops"].append({"id": "v1", "x": 9.0, "y": 9.0})
    with pytest.raises(ValidationError):
        instance_from_doc(doc)
    doc = corridor_doc()
    doc["zones"][1]["id"] = "v1"  # shared namespace with stops
    with pytest.raises(ValidationError):
        instance_from_doc(doc)


def test_edge_validation():
    doc = corridor_doc()
    doc["edges"].append({"a": "v1", "b": "v1", "cost": 1})
    with pytest.raises(ValidationError):
        instance_from_doc(doc)
    doc = corridor_doc()
    doc["edges"].append({"a": "v2", "b": "v1", "cost": 4})  # same unordered pair
    with pytest.raises(ValidationError):
        instance_from_doc(doc)
    doc = corridor_doc()
    doc["edges"][0]["cost"] = -2
    with pytest.raises(ValidationError):
        instance_from_doc(doc)
    doc = corridor_doc()
    doc["edges"][0]["b"] = "vX"
    with pytest.raises(ValidationError):
        instance_from_doc(doc)


def test_access_matrix_reordered_by_orders():
    doc = corridor_doc()
    doc["access"] = {
        "matrix": [9, 2, 5, 5, 2, 1],  # row u2 over (v3, v2, v1), then row u1
        "zone_order": ["u2", "u1"],
        "stop_order": ["v3", "v2", "v1"],
    }
    inst = instance_from_doc(doc)
    assert inst.access.tolist() == [[1, 2, 5], [5, 2, 9]]


def test_access_matrix_shape_and_order_errors():
    doc = corridor_doc()
    doc["access"]["matrix"] = [1, 2, 3]
    with pytest.raises(ValidationError):
        instance_from_doc(doc)
    doc = corridor_doc()
    doc["access"]["stop_order"] = ["v1", "v2", "v2"]
    with pytest.raises(ValidationError):
        instance_from_doc(doc)


def test_euclidean_access():
    doc = corridor_doc()
    doc["access"] = {"euclidean": {"walk_speed": 2}}
    inst = instance_from_doc(doc)
    # u1 at (0,1): distance to v1 is 1, time 1/2 rounds to 1 at scale 1
    assert inst.access[0, 0] == 1
    doc["access"] = {"euclidean": {"walk_speed": 0}}
    with pytest.raises(ValidationError):
        instance_from_doc(doc)


def test_euclidean_access_needs_coordinates():
    doc = corridor_doc()
    doc["access"] = {"euclidean": {"walk_speed": 1}}
    for s in doc["stops"]:
        s.pop("x")
        s.pop("y")
    with pytest.raises(ValidationError):
        instance_from_doc(doc)


def test_coordinates_all_or_none():
    doc = corridor_doc()
    doc["stops"][1].pop("x")
    with pytest.raises(ValidationError):
        instance_from_doc(doc)


def test_od_validation():
    doc = corridor_doc()
    doc["od"].append({"o": "u1", "d": "u2", "n": 3})  # duplicate pair
    with pytest.raises(ValidationError):
        instance_from_doc(doc)
    doc = corridor_doc()
    doc["od"][0]["n"] = -1
    with pytest.raises(ValidationError):
        instance_from_doc(doc)
    doc = corridor_doc()
    doc["od"][0]["n"] = 1.5
    with pytest.raises(ValidationError):
        instance_from_doc(doc)
    doc = corridor_doc()
    doc["od"][0]["o"] = "nope"
    with pytest.raises(ValidationError):
        instance_from_doc(doc)


def test_od_drops_zero_and_accepts_integral_floats():
    doc = corridor_doc()
    doc["od"] = [
        {"o": "u1", "d": "u2", "n": 2.0},
        {"o": "u2", "d": "u1", "n": 0},
    ]
    # float counts only arrive via the JSON reader, which parses them exactly
    inst = load_instance(json.dumps(doc))
    assert inst.od == {("u1", "u2"): 2}


def test_connectivity_enforced():
    doc = corridor_doc()
    doc["stops"].append({"id": "v4", "x": 50.0, "y": 50.0})
    doc["access"]["matrix"] = [1, 2, 5, 9, 5, 2, 1, 9]
    doc["access"]["stop_order"] = ["v1", "v2", "v3", "v4"]
    with pytest.raises(ConnectivityError) as err:
        instance_from_doc(doc)
    assert "v4" in str(err.value)
    doc["params"]["allow_disconnected"] = True
    inst = instance_from_doc(doc)
    assert inst.n_t == 4


def test_lines_parse_and_validate():
    inst = instance_from_doc(corridor_doc(with_lines=True))
    assert [l.id for l in inst.lines] == ["l1", "l2"]
    assert inst.lines[0].unique_stops() == frozenset({"v1", "v2"})
    doc = corridor_doc(with_lines=True)
    doc["lines"][0]["stops"] = ["v1", "v1", "v2"]  # duplicates allowed in input
    inst = instance_from_doc(doc)
    assert inst.lines[0].unique_stops() == frozenset({"v1", "v2"})
    doc["lines"][0]["stops"] = ["v1", "vX"]
    with pytest.raises(ValidationError):
        instance_from_doc(doc)
    doc = corridor_doc(with_lines=True)
    doc["lines"][1]["id"] = "l1"
    with pytest.raises(ValidationError):
        instance_from_doc(doc)


def test_warnings():
    doc = corridor_doc(k={"u1": "1/2", "u2": 2})
    doc["od"].append({"o": "u1", "d": "u1", "n": 1})
    inst = instance_from_doc(doc)
    codes = {w.code for w in validate_instance(inst)}
    assert "k-below-1" in codes
    assert "diagonal-demand" in codes
    doc = corridor_doc()
    doc["od"] = []
    codes = {w.code for w in validate_instance(instance_from_doc(doc))}
    assert "zero-demand" in codes


def test_serialize_round_trip(corridor):
    doc = serialize_instance(corridor)
    again = instance_from_doc(doc)
    assert again == corridor
    assert instance_hash(again) == instance_hash(corridor)


def test_hash_ignores_formatting_but_not_values():
    a = instance_from_doc(corridor_doc(p_elim="0.6"))
    b = instance_from_doc(corridor_doc(p_elim="3/5"))
    c = instance_from_doc(corridor_doc(p_elim="1/2"))
    assert instance_hash(a) == instance_hash(b)
    assert instance_hash(a) != instance_hash(c)


def test_scaled_instances_compare_equal():
    fine = corridor_doc()
    fine["params"]["time_scale"] = 1000
    fine["edges"] = [
        {"a": "v1", "b": "v2", "cost": 0.003},
        {"a": "v2", "b": "v3", "cost": 0.003},
    ]
    fine["access"]["matrix"] = [0.001, 0.002, 0.005, 0.005, 0.002, 0.001]
    assert instance_from_doc(fine) == instance_from_doc(corridor_doc())


def test_instance_is_frozen(corridor):
    with pytest.raises(Exception):
        corridor.params = None
    with pytest.raises(ValueError):
        corridor.access[0, 0] = 99


def test_apply_param_overrides():
    doc = corridor_doc()
    out = apply_param_overrides(doc, {"p_elim": "0.5", "pairs": "od"})
    assert out["params"]["p_elim"] == "0.5"
    assert out["params"]["constraint3_pairs"] == "od-positive-only"
    assert doc["params"]["p_elim"] == "1/3"  # original untouched
    with pytest.raises(ValidationError):
        apply_param_overrides(doc, {"nope": 1})
    with pytest.raises(ValidationError):
        apply_param_overrides(doc, {"pairs": "everything"})
