"""Map and table exports for a solved instance."""

from __future__ import annotations

import json
from typing import Optional, Set

from .errors import ValidationError
from .evaluate import StopSelection
from .metrics import MetricsBundle, export_metrics_csv
from .model import Instance
from .scenario import ScenarioResult, export_p_ros_csv, export_uf_csv


def _coord(entity, kind: str):
    if entity.coord is None:
        raise ValidationError(f"{kind} {entity.id!r} has no coordinates", entity=entity.id)
    return [float(entity.coord[0]), float(entity.coord[1])]


def _violated_zones(selection: StopSelection, scenario: Optional[ScenarioResult]) -> Set[str]:
    if scenario is not None:
        return set(scenario.violated)
    out: Set[str] = set()
    for v in selection.violations:
        if v.kind in ("access", "coverage"):
            out.add(v.subject)
        elif v.kind == "delay":
            out.update(v.subject)
    return out


def geojson_doc(
    inst: Instance,
    selection: StopSelection,
    scenario: Optional[ScenarioResult] = None,
) -> dict:
    """FeatureCollection of stop and zone points with status colors.

    Stops are kept, deleted, or scenario_removed (kept by the solver but
    stranded once the scenario's deleted lines take their stops away);
    zones are ok or violated.
    """
    features = []
    for stop in inst.stops:
        if stop.id not in selection.kept:
            status = "deleted"
        elif scenario is not None and stop.id not in scenario.v_s:
            status = "scenario_removed"
        else:
            status = "kept"
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": _coord(stop, "stop")},
                "properties": {"kind": "stop", "id": stop.id, "status": status},
            }
        )
    violated = _violated_zones(selection, scenario)
    for zone in inst.zones:
        props = {"kind": "zone", "id": zone.id, "status": "violated" if zone.id in violated else "ok"}
        if scenario is not None:
            slack = scenario.uf.get(zone.id)
            props["uf"] = "neg_inf" if slack == float("-inf") else slack
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": _coord(zone, "zone")},
                "properties": props,
            }
        )
    return {"type": "FeatureCollection", "features": features}


def emit_geojson(
    inst: Instance,
    selection: StopSelection,
    scenario: Optional[ScenarioResult] = None,
    sink=None,
) -> dict:
    doc = geojson_doc(inst, selection, scenario)
    if sink is not None:
        json.dump(doc, sink, indent=1)
        sink.write("\n")
    return doc


__all__ = [
    "emit_geojson",
    "geojson_doc",
    "export_metrics_csv",
    "export_uf_csv",
    "export_p_ros_csv",
]
