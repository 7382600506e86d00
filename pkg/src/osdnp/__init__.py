"""Transit stop reduction toolkit.

Pick which stops of a public-transport network to keep when a fixed share
must be deleted, minimizing demand-weighted travel time under access-time
and delay constraints, then explore line-level keep/delete scenarios.
"""

from ._core import backend
from .errors import (
    ConnectivityError,
    ConsistencyError,
    EmptyCandidateError,
    GuardError,
    OsdnpError,
    ParseError,
    UnreachablePairError,
    ValidationError,
)
from .evaluate import (
    StopSelection,
    Violation,
    budget,
    evaluate_selection,
    required_deletions,
    selection_to_json,
)
from .metrics import MetricsBundle, compute_metrics, d_sol_array, export_metrics_csv, opt_v
from .milp import (
    LinearConstraint,
    MilpModel,
    build_milp,
    decode_assignment,
    export_lp,
    name_map_json,
    parse_lp,
    read_values,
)
from .model import (
    Instance,
    Line,
    Parameters,
    Stop,
    TransitEdge,
    UrbanZone,
    apply_param_overrides,
    dump_instance,
    instance_from_doc,
    instance_hash,
    load_instance,
    serialize_instance,
    validate_instance,
)
from .reports import emit_geojson, geojson_doc
from .scenario import (
    ScenarioResult,
    build_scenario,
    histogram,
    line_percentages,
    scenario_sweep,
    scenario_to_json,
)
from .solve import SolveReport, bnb_solve, greedy_solve, oracle_solve, report_to_json
from .store import ArtifactStore, StoredArtifact
from .synth import demo_doc, grid_city, random_instance

__version__ = "0.1.0"

__all__ = [
    "ArtifactStore",
    "ConnectivityError",
    "ConsistencyError",
    "EmptyCandidateError",
    "GuardError",
    "Instance",
    "Line",
    "LinearConstraint",
    "MetricsBundle",
    "MilpModel",
    "OsdnpError",
    "Parameters",
    "ParseError",
    "ScenarioResult",
    "SolveReport",
    "Stop",
    "StopSelection",
    "StoredArtifact",
    "TransitEdge",
    "UnreachablePairError",
    "UrbanZone",
    "ValidationError",
    "Violation",
    "apply_param_overrides",
    "backend",
    "bnb_solve",
    "budget",
    "build_milp",
    "build_scenario",
    "compute_metrics",
    "d_sol_array",
    "decode_assignment",
    "demo_doc",
    "dump_instance",
    "emit_geojson",
    "evaluate_selection",
    "export_lp",
    "export_metrics_csv",
    "geojson_doc",
    "greedy_solve",
    "grid_city",
    "histogram",
    "instance_from_doc",
    "instance_hash",
    "line_percentages",
    "load_instance",
    "name_map_json",
    "opt_v",
    "oracle_solve",
    "parse_lp",
    "random_instance",
    "read_values",
    "report_to_json",
    "required_deletions",
    "scenario_sweep",
    "scenario_to_json",
    "selection_to_json",
    "serialize_instance",
    "validate_instance",
    "__version__",
]
