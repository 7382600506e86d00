"""Line keep/delete thresholds, scenario stop sets, slack reporting."""

import io
from fractions import Fraction

import pytest

from osdnp import (
    ValidationError,
    build_scenario,
    compute_metrics,
    evaluate_selection,
    histogram,
    instance_from_doc,
    line_percentages,
    scenario_sweep,
    scenario_to_json,
)
from osdnp.model import Line
from osdnp.scenario import NEG_INF, export_p_ros_csv, export_uf_csv

from conftest import corridor_doc


@pytest.fixture
def lined():
    inst = instance_from_doc(corridor_doc(p_elim="3/5", with_lines=True))
    metrics = compute_metrics(inst)
    selection = evaluate_selection(metrics, ["v2"])  # the tight-budget optimum
    return inst, metrics, selection


def test_line_percentages(lined):
    inst, _, selection = lined
    p = line_percentages(selection, inst.lines, min_line_size=1)
    assert p == {"l1": Fraction(1, 2), "l2": Fraction(1, 2)}


def test_min_line_size_is_strict(lined):
    inst, _, selection = lined
    # both lines have exactly 2 unique stops; the cut is "more than", not "at least"
    assert line_percentages(selection, inst.lines, min_line_size=2) == {}
    assert set(line_percentages(selection, inst.lines, min_line_size=1)) == {"l1", "l2"}
    with pytest.raises(ValidationError):
        line_percentages(selection, inst.lines, min_line_size=-1)


def test_duplicate_stops_in_line_count_once(lined):
    _, _, selection = lined
    loop = Line(id="loop", stops=("v1", "v2", "v1", "v2", "v1"))
    p = line_percentages(selection, [loop], min_line_size=1)
    assert p == {"loop": Fraction(1, 2)}


def test_unknown_stop_in_line(lined):
    inst, metrics, selection = lined
    bad = Line(id="ghost", stops=("v1", "vX"))
    with pytest.raises(ValidationError):
        line_percentages(selection, [bad], min_line_size=1, known_stops=inst.stop_ids)
    with pytest.raises(ValidationError):
        build_scenario(selection, [bad], t=0, min_line_size=1, metrics=metrics)


def test_threshold_zero_keeps_everything(lined):
    inst, metrics, selection = lined
    scn = build_scenario(selection, inst.lines, t=0, min_line_size=1, metrics=metrics)
    assert scn.analyzed == frozenset({"l1", "l2"})
    assert scn.deleted_lines == frozenset()
    assert scn.v_s == selection.kept
    assert scn.uf == {"u1": 0, "u2": 0}
    assert scn.violated == frozenset()


def test_threshold_between_shares(lined):
    inst, metrics, selection = lined
    scn = build_scenario(selection, inst.lines, t="0.4", min_line_size=1, metrics=metrics)
    # both lines keep half their stops, 1/2 >= 0.4: nothing deleted
    assert scn.kept_lines == frozenset({"l1", "l2"})
    assert scn.v_s == frozenset({"v2"})
    assert scn.uf == {"u1": 0, "u2": 0}
    assert scn.violated == frozenset()


def test_threshold_above_shares_empties_network(lined):
    inst, metrics, selection = lined
    scn = build_scenario(selection, inst.lines, t="0.6", min_line_size=1, metrics=metrics)
    assert scn.deleted_lines == frozenset({"l1", "l2"})
    assert scn.v_s == frozenset()
    assert scn.uf == {"u1": NEG_INF, "u2": NEG_INF}
    assert scn.violated == frozenset({"u1", "u2"})


def test_lenient_vs_strict_removal():
    # v2 sits on both lines; l2 dies at t = 3/5 while l1 survives
    inst = instance_from_doc(corridor_doc(p_elim="1/3", with_lines=True))
    metrics = compute_metrics(inst)
    selection = evaluate_selection(metrics, ["v1", "v2"])
    lenient = build_scenario(selection, inst.lines, t="3/5", min_line_size=1, metrics=metrics)
    assert lenient.kept_lines == frozenset({"l1"})  # p_ros: l1 = 1, l2 = 1/2
    assert lenient.v_s == frozenset({"v1", "v2"})  # l1 still serves v2
    strict = build_scenario(
        selection, inst.lines, t="3/5", min_line_size=1, metrics=metrics, strict_removal=True
    )
    assert strict.v_s == frozenset({"v1"})  # any deleted line takes the stop out
    assert strict.uf == {"u1": 1, "u2": -3}
    assert strict.violated == frozenset({"u2"})


def test_uf_uses_access_caps(lined):
    inst, metrics, _ = lined
    selection = evaluate_selection(metrics, ["v1", "v2"])
    scn = build_scenario(selection, inst.lines, t=0, min_line_size=1, metrics=metrics)
    # cap is 2 per zone; u1 reaches v1 at 1, u2 reaches v2 at 2
    assert scn.uf == {"u1": 1, "u2": 0}


def test_threshold_validation(lined):
    inst, metrics, selection = lined
    with pytest.raises(ValidationError):
        build_scenario(selection, inst.lines, t="3/2", min_line_size=1, metrics=metrics)
    with pytest.raises(ValidationError):
        build_scenario(selection, inst.lines, t=-0.1, min_line_size=1, metrics=metrics)
    with pytest.raises(ValidationError):
        build_scenario(selection, inst.lines, t=0, min_line_size=1)  # metrics required


def test_scenario_monotone_in_threshold(lined):
    inst, metrics, selection = lined
    results = scenario_sweep(
        selection, inst.lines, ["0", "0.25", "0.5", "0.75", "1"], min_line_size=1, metrics=metrics
    )
    for earlier, later in zip(results, results[1:]):
        assert later.kept_lines <= earlier.kept_lines
        assert later.v_s <= earlier.v_s
        assert earlier.violated <= later.violated
    # all results share one p_ros computation
    assert all(r.p_ros is results[0].p_ros for r in results)


def test_sweep_requires_sorted_thresholds(lined):
    inst, metrics, selection = lined
    with pytest.raises(ValidationError):
        scenario_sweep(selection, inst.lines, ["0.5", "0.2"], min_line_size=1, metrics=metrics)


def test_histogram_equal_width_bins():
    assert histogram([1, 2, 3, 4], bin_count=2) == [(Fraction(1), 2), (Fraction(5, 2), 2)]
    assert histogram([0, 0], bin_count=1) == [(Fraction(0), 2)]
    assert histogram([], bin_count=5) == []
    assert histogram([NEG_INF, 3], bin_count=2) == [(Fraction(3), 1), ("unreachable", 1)]
    assert histogram([NEG_INF, NEG_INF], bin_count=3) == [("unreachable", 2)]


def test_histogram_counts_sum_and_last_bin_inclusive():
    vals = [Fraction(i, 7) for i in range(23)]
    hist = histogram(vals, bin_count=4)
    assert sum(c for _, c in hist) == len(vals)
    # the maximum lands in the last bin, not past it
    assert hist[-1][1] >= 1
    with pytest.raises(ValidationError):
        histogram([1, 2], bin_count=0)


def test_scenario_json(lined):
    inst, metrics, selection = lined
    scn = build_scenario(selection, inst.lines, t="0.6", min_line_size=1, metrics=metrics)
    doc = scenario_to_json(scn, bin_count=4)
    assert doc["t"] == 0.6
    assert doc["analyzed"] == ["l1", "l2"]
    assert doc["deleted_lines"] == ["l1", "l2"]
    assert doc["v_s"] == []
    assert doc["violated"] == ["u1", "u2"]
    assert doc["uf"] == {"u1": "neg_inf", "u2": "neg_inf"}
    assert doc["p_ros"] == {"l1": 0.5, "l2": 0.5}
    assert doc["histograms"]["uf"] == [["unreachable", 2]]
    assert doc["histograms"]["p_ros"] == [[0.5, 2]]
    import json

    json.dumps(doc)  # must be serializable as-is


def test_csv_exports(lined):
    inst, metrics, selection = lined
    scn = build_scenario(selection, inst.lines, t="0.4", min_line_size=1, metrics=metrics)
    buf = io.StringIO()
    export_uf_csv(scn, buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "zone_id,uf"
    assert sorted(lines[1:]) == ["u1,0", "u2,0"]
    buf = io.StringIO()
    export_p_ros_csv(scn, buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "line_id,p_ros,status"
    assert lines[1] == "l1,1/2,kept"
    assert lines[2] == "l2,1/2,kept"
