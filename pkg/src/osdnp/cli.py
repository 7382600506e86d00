"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 invalid input, 3 infeasibility proven,
4 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import List, Optional

from .common import to_fraction
from .errors import ConsistencyError, EmptyCandidateError, GuardError, OsdnpError
from .evaluate import evaluate_selection, selection_to_json
from .metrics import compute_metrics, export_metrics_csv
from .milp import build_milp, decode_assignment, export_lp, name_map_json, read_values
from .model import apply_param_overrides, instance_from_doc, load_instance
from .reports import emit_geojson
from .scenario import build_scenario, export_p_ros_csv, export_uf_csv, scenario_sweep, scenario_to_json
from .solve import bnb_solve, oracle_solve, report_to_json


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p-elim", dest="p_elim", metavar="R", help="deletion rate in [0,1]")
    p.add_argument("--alpha", metavar="R", help="delay factor >= 1")
    p.add_argument("--k", metavar="R|@FILE", help="access factor, scalar or @json mapping")
    p.add_argument("--pairs", choices=["all", "od"], help="which zone pairs get delay rows")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--time-limit", dest="time_limit", type=float, metavar="SECONDS")
    p.add_argument("--gap", metavar="R", help="stop once the relative gap reaches R")
    p.add_argument("--seed", type=int, default=0)


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")


def build_parser() -> _Parser:
    parser = _Parser(prog="osdnp", description="stop-reduction solver and scenario tools")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("solve", help="run the exact solver on an instance")
    p.add_argument("instance")
    _add_overrides(p)
    _add_solver_flags(p)
    _add_out(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="exhaustive reference solve (small instances)")
    p.add_argument("instance")
    _add_overrides(p)
    _add_out(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("check", help="evaluate a given kept set")
    p.add_argument("instance")
    p.add_argument("--kept", required=True, metavar="IDS|@FILE", help="comma list or @json file")
    _add_overrides(p)
    _add_out(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("export-lp", help="write the mixed-integer model as LP text")
    p.add_argument("instance")
    _add_overrides(p)
    _add_out(p)
    p.set_defaults(func=_cmd_export_lp)

    p = sub.add_parser("decode", help="turn solver variable values into a solution report")
    p.add_argument("instance")
    p.add_argument("--values", required=True, metavar="FILE", help="lines of 'name value'")
    _add_overrides(p)
    _add_out(p)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("scenario", help="line keep/delete analysis at one threshold")
    p.add_argument("instance")
    p.add_argument("--solution", required=True, metavar="FILE")
    p.add_argument("--t", required=True, metavar="R")
    p.add_argument("--min-line-size", dest="min_line_size", type=int, default=10)
    p.add_argument("--strict-removal", dest="strict_removal", action="store_true")
    _add_overrides(p)
    _add_out(p)
    p.set_defaults(func=_cmd_scenario)

    p = sub.add_parser("sweep", help="scenario analysis over a threshold list")
    p.add_argument("instance")
    p.add_argument("--solution", required=True, metavar="FILE")
    p.add_argument("--t", required=True, metavar="R,R,...")
    p.add_argument("--min-line-size", dest="min_line_size", type=int, default=10)
    p.add_argument("--strict-removal", dest="strict_removal", action="store_true")
    _add_overrides(p)
    _add_out(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("report", help="write GeoJSON map and CSV tables")
    p.add_argument("instance")
    p.add_argument("--solution", required=True, metavar="FILE")
    p.add_argument("--t", metavar="R", help="also emit scenario tables at this threshold")
    p.add_argument("--min-line-size", dest="min_line_size", type=int, default=10)
    _add_overrides(p)
    p.add_argument("--out", metavar="DIR", default=".", help="output directory")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--data-dir", dest="data_dir", metavar="DIR")
    p.add_argument("--port", type=int)
    p.add_argument("--workers", type=int, default=2)
    p.add_argument("--time-limit", dest="time_limit", type=float, default=60.0)
    p.add_argument("--ui", dest="ui_dir", metavar="DIR", help="also serve a dashboard build from DIR")
    p.set_defaults(func=_cmd_serve)

    return parser


# ----------------------------------------------------------------------
# shared helpers
# ----------------------------------------------------------------------


def _read_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _k_value(raw: Optional[str]):
    if raw is None:
        return None
    if raw.startswith("@"):
        return _read_json(raw[1:])
    return raw


def _load(args):
    with open(args.instance, "r", encoding="utf-8") as fh:
        inst = load_instance(fh)
    overrides = {
        "p_elim": getattr(args, "p_elim", None),
        "alpha": getattr(args, "alpha", None),
        "k": _k_value(getattr(args, "k", None)),
        "pairs": getattr(args, "pairs", None),
    }
    if any(v is not None for v in overrides.values()):
        from .model import serialize_instance

        inst = instance_from_doc(apply_param_overrides(serialize_instance(inst), overrides))
    return inst


def _emit(payload: dict, out: Optional[str], summary: Optional[str] = None) -> None:
    text = json.dumps(payload, indent=1)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        print(summary or f"wrote {out}")
    else:
        print(text)


def _kept_ids(raw: str) -> List[str]:
    if raw.startswith("@"):
        doc = _read_json(raw[1:])
        if isinstance(doc, dict):
            doc = doc.get("kept")
        if not isinstance(doc, list):
            raise OsdnpError("kept file must be a JSON list or contain a 'kept' list")
        return [str(s) for s in doc]
    return [s for s in (part.strip() for part in raw.split(",")) if s]


def _solution_kept(path: str) -> List[str]:
    doc = _read_json(path)
    if isinstance(doc, dict) and isinstance(doc.get("solution"), dict):
        doc = doc["solution"]
    if not isinstance(doc, dict) or not isinstance(doc.get("kept"), list):
        raise OsdnpError(f"{path} has no kept set (was the solve infeasible?)")
    return [str(s) for s in doc["kept"]]


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------


def _cmd_solve(args) -> int:
    inst = _load(args)
    metrics = compute_metrics(inst)
    gap = to_fraction(args.gap) if args.gap is not None else 0
    report = bnb_solve(metrics, time_limit=args.time_limit, gap_target=gap, seed=args.seed)
    payload = report_to_json(report, metrics)
    twt = report.best.twt if report.best is not None else None
    _emit(payload, args.out, f"{report.proof}: twt={twt} nodes={report.nodes_explored} -> {args.out}")
    return 3 if report.proof == "infeasible-proven" else 0


def _cmd_oracle(args) -> int:
    inst = _load(args)
    metrics = compute_metrics(inst)
    report = oracle_solve(metrics)
    payload = report_to_json(report, metrics)
    twt = report.best.twt if report.best is not None else None
    _emit(payload, args.out, f"{report.proof}: twt={twt} -> {args.out}")
    return 3 if report.proof == "infeasible-proven" else 0


def _cmd_check(args) -> int:
    inst = _load(args)
    metrics = compute_metrics(inst)
    selection = evaluate_selection(metrics, _kept_ids(args.kept))
    _emit(selection_to_json(selection, metrics), args.out)
    return 0


def _cmd_export_lp(args) -> int:
    inst = _load(args)
    metrics = compute_metrics(inst)
    model = build_milp(metrics)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            export_lp(model, fh)
        names_path = str(Path(args.out).with_suffix("")) + ".names.json"
        Path(names_path).write_text(json.dumps(name_map_json(model), indent=1) + "\n", encoding="utf-8")
        print(f"wrote {args.out} and {names_path}")
    else:
        export_lp(model, sys.stdout)
    return 0


def _cmd_decode(args) -> int:
    inst = _load(args)
    metrics = compute_metrics(inst)
    model = build_milp(metrics)
    with open(args.values, "r", encoding="utf-8") as fh:
        values = read_values(fh)
    selection = decode_assignment(model, values, metrics)
    _emit(selection_to_json(selection, metrics), args.out)
    return 0


def _cmd_scenario(args) -> int:
    inst = _load(args)
    metrics = compute_metrics(inst)
    selection = evaluate_selection(metrics, _solution_kept(args.solution))
    result = build_scenario(
        selection, inst.lines, args.t, args.min_line_size, metrics, args.strict_removal
    )
    _emit(scenario_to_json(result), args.out)
    return 0


def _cmd_sweep(args) -> int:
    inst = _load(args)
    metrics = compute_metrics(inst)
    selection = evaluate_selection(metrics, _solution_kept(args.solution))
    thresholds = [t for t in (part.strip() for part in args.t.split(",")) if t]
    results = scenario_sweep(
        selection, inst.lines, thresholds, args.min_line_size, metrics, args.strict_removal
    )
    _emit([scenario_to_json(r) for r in results], args.out)
    return 0


def _cmd_report(args) -> int:
    inst = _load(args)
    metrics = compute_metrics(inst)
    selection = evaluate_selection(metrics, _solution_kept(args.solution))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    scenario = None
    if args.t is not None:
        scenario = build_scenario(selection, inst.lines, args.t, args.min_line_size, metrics)
        with open(out_dir / "scenario.json", "w", encoding="utf-8") as fh:
            json.dump(scenario_to_json(scenario), fh, indent=1)
            fh.write("\n")
        with open(out_dir / "uf.csv", "w", encoding="utf-8", newline="") as fh:
            export_uf_csv(scenario, fh)
        with open(out_dir / "p_ros.csv", "w", encoding="utf-8", newline="") as fh:
            export_p_ros_csv(scenario, fh)
        written += ["scenario.json", "uf.csv", "p_ros.csv"]

    with open(out_dir / "map.geojson", "w", encoding="utf-8") as fh:
        emit_geojson(inst, selection, scenario, fh)
    with open(out_dir / "metrics.csv", "w", encoding="utf-8", newline="") as fh:
        export_metrics_csv(metrics, fh)
    written += ["map.geojson", "metrics.csv"]
    print("wrote " + ", ".join(str(out_dir / name) for name in written))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    data_dir = args.data_dir or os.environ.get("OSDNP_DATA_DIR") or "osdnp-data"
    port = args.port if args.port is not None else int(os.environ.get("OSDNP_PORT", "8000"))
    if args.ui_dir is not None and not os.path.isdir(args.ui_dir):
        print(f"invalid input: no such directory: {args.ui_dir}", file=sys.stderr)
        return 2
    app = create_app(
        data_dir, default_time_limit=args.time_limit, workers=args.workers, ui_dir=args.ui_dir
    )
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except EmptyCandidateError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except ConsistencyError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except (OsdnpError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # anything unplanned is an internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
