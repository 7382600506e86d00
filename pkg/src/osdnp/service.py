"""HTTP decision service: instance ingestion, async solve jobs, scenarios.

Solve jobs run on a thread pool and are polled via /api/jobs/{id}; results
land in the content-addressed artifact store, so identical inputs produce
identical ids.  Scenario queries are read-only and cached per
(solution, t, min_line_size).
"""

from __future__ import annotations

import io
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, Optional, Tuple

from fastapi import Body, FastAPI
from fastapi.responses import JSONResponse, Response

from .common import content_id, to_fraction
from .errors import GuardError, ParseError, ValidationError
from .evaluate import budget, evaluate_selection
from .metrics import compute_metrics, export_metrics_csv
from .model import apply_param_overrides, instance_from_doc, serialize_instance
from .reports import geojson_doc
from .scenario import build_scenario, scenario_to_json
from .solve import bnb_solve, report_to_json
from .store import ArtifactStore

def _job_key(instance_id: str, overrides: dict) -> str:
    return content_id({"instance": instance_id, "overrides": overrides})


def _rational_param(value, name: str) -> Fraction:
    try:
        return to_fraction(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad {name}: {exc}") from exc


def create_app(
    data_dir,
    default_time_limit: Optional[float] = 60.0,
    workers: int = 2,
    ui_dir=None,
) -> FastAPI:
    app = FastAPI(title="osdnp service")
    store = ArtifactStore(data_dir)
    executor = ThreadPoolExecutor(max_workers=max(1, workers))
    lock = threading.Lock()
    jobs: Dict[str, dict] = {}
    active: Dict[str, str] = {}  # job key -> job id while queued/running
    built: Dict[str, tuple] = {}  # solution id -> (instance, metrics, selection)
    scenarios: Dict[Tuple[str, str, int], dict] = {}
    app.state.store = store

    @app.exception_handler(ValidationError)
    async def _validation(_, exc):
        return JSONResponse({"detail": str(exc)}, status_code=400)

    @app.exception_handler(ParseError)
    async def _parse(_, exc):
        return JSONResponse({"detail": str(exc)}, status_code=400)

    @app.exception_handler(GuardError)
    async def _guard(_, exc):
        return JSONResponse({"detail": str(exc)}, status_code=400)

    def _not_found(what: str) -> JSONResponse:
        return JSONResponse({"detail": f"unknown {what}"}, status_code=404)

    # ------------------------------------------------------------------
    # instances
    # ------------------------------------------------------------------

    @app.post("/api/instances")
    async def post_instance(doc: dict = Body(...)):
        inst = instance_from_doc(doc)
        iid = store.put("instance", serialize_instance(inst))
        return {"id": iid}

    @app.get("/api/instances/{iid}/metrics")
    async def instance_metrics(iid: str):
        if store.kind_of(iid) != "instance":
            return _not_found("instance")
        inst = instance_from_doc(store.get(iid))
        metrics = compute_metrics(inst)
        out = io.StringIO()
        export_metrics_csv(metrics, out)
        return Response(out.getvalue(), media_type="text/csv")

    # ------------------------------------------------------------------
    # solve jobs
    # ------------------------------------------------------------------

    def _progress_cb(job_id: str):
        def cb(nodes: int, incumbent: Optional[int], lower: Optional[int]) -> None:
            with lock:
                job = jobs.get(job_id)
                if job is None:
                    return
                p = job["progress"]
                p["nodes_explored"] = max(p["nodes_explored"], nodes)
                if incumbent is not None and (p["incumbent"] is None or incumbent < p["incumbent"]):
                    p["incumbent"] = incumbent
                if lower is not None and (p["lower_bound"] is None or lower > p["lower_bound"]):
                    p["lower_bound"] = lower

        return cb

    def _run_job(job_id: str, iid: str, overrides: dict, key: str) -> None:
        with lock:
            jobs[job_id]["state"] = "running"
        try:
            doc = apply_param_overrides(store.get(iid), overrides)
            inst = instance_from_doc(doc)
            metrics = compute_metrics(inst)
            time_limit = overrides.get("time_limit", default_time_limit)
            gap = _rational_param(overrides.get("gap", 0), "gap")
            seed = int(overrides.get("seed", 0))
            report = bnb_solve(metrics, time_limit=time_limit, gap_target=gap, seed=seed,
                               progress=_progress_cb(job_id))
            payload = report_to_json(report, metrics)
            payload["instance_id"] = iid
            payload["overrides"] = overrides
            sol_id = store.put("solution", payload)
            with lock:
                job = jobs[job_id]
                job["result"] = sol_id
                job["state"] = "done"
                if report.best is not None:
                    job["progress"]["incumbent"] = report.best.twt
                if report.lower_bound is not None:
                    job["progress"]["lower_bound"] = report.lower_bound + metrics.pc_const
        except Exception as exc:  # solver failures surface via the job record
            with lock:
                jobs[job_id]["state"] = "failed"
                jobs[job_id]["error"] = str(exc)
        finally:
            with lock:
                if active.get(key) == job_id:
                    del active[key]

    @app.post("/api/solve")
    async def post_solve(body: dict = Body(...)):
        iid = body.get("instance_id")
        if not isinstance(iid, str) or store.kind_of(iid) != "instance":
            return _not_found("instance")
        overrides = body.get("overrides") or {}
        if not isinstance(overrides, dict):
            return JSONResponse({"detail": "overrides must be an object"}, status_code=400)

        _rational_param(overrides.get("gap", 0), "gap")
        tl = overrides.get("time_limit")
        if tl is not None and (not isinstance(tl, (int, float)) or isinstance(tl, bool) or tl <= 0):
            return JSONResponse({"detail": "time_limit must be a positive number"}, status_code=400)
        seed = overrides.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            return JSONResponse({"detail": "seed must be an integer"}, status_code=400)

        doc = apply_param_overrides(store.get(iid), overrides)
        inst = instance_from_doc(doc)
        if inst.n_u > 0 and budget(inst) == 0:
            return JSONResponse(
                {"detail": "infeasible: deletion rate leaves no stops to keep"}, status_code=422
            )
        metrics = compute_metrics(inst)
        for i, z in enumerate(inst.zone_ids):
            if metrics.cand_ptr[i] == metrics.cand_ptr[i + 1]:
                return JSONResponse(
                    {"detail": f"infeasible: zone {z!r} has no candidate stop"}, status_code=422
                )

        key = _job_key(iid, overrides)
        with lock:
            existing = active.get(key)
            if existing is not None and jobs[existing]["state"] in ("queued", "running"):
                return JSONResponse({"id": existing}, status_code=409)
            job_id = uuid.uuid4().hex[:16]
            jobs[job_id] = {
                "id": job_id,
                "instance_id": iid,
                "overrides": overrides,
                "state": "queued",
                "result": None,
                "error": None,
                "progress": {"nodes_explored": 0, "incumbent": None, "lower_bound": None},
            }
            active[key] = job_id
        executor.submit(_run_job, job_id, iid, overrides, key)
        return {"id": job_id}

    @app.get("/api/jobs/{job_id}")
    async def get_job(job_id: str):
        with lock:
            job = jobs.get(job_id)
            if job is None:
                return _not_found("job")
            return {**job, "progress": dict(job["progress"])}

    # ------------------------------------------------------------------
    # solutions and scenarios
    # ------------------------------------------------------------------

    @app.get("/api/solutions/{sid}")
    async def get_solution(sid: str):
        if store.kind_of(sid) != "solution":
            return _not_found("solution")
        return store.get(sid)

    def _solution_context(sid: str):
        with lock:
            if sid in built:
                return built[sid]
        doc = store.get(sid)
        inst = instance_from_doc(apply_param_overrides(store.get(doc["instance_id"]), doc.get("overrides") or {}))
        metrics = compute_metrics(inst)
        sol = doc.get("solution")
        if sol is None:
            raise ValidationError("solution proves infeasibility; nothing to analyze")
        selection = evaluate_selection(metrics, sol["kept"])
        ctx = (inst, metrics, selection)
        with lock:
            if len(built) > 32:
                built.clear()
            built[sid] = ctx
        return ctx

    @app.get("/api/solutions/{sid}/scenario")
    async def get_scenario(sid: str, t: str, min_line_size: int = 10):
        if store.kind_of(sid) != "solution":
            return _not_found("solution")
        threshold = _rational_param(t, "t")
        cache_key = (sid, str(threshold), min_line_size)
        with lock:
            cached = scenarios.get(cache_key)
        if cached is not None:
            return cached
        inst, metrics, selection = _solution_context(sid)
        result = build_scenario(selection, inst.lines, threshold, min_line_size, metrics)
        payload = scenario_to_json(result)
        with lock:
            if len(scenarios) > 256:
                scenarios.clear()
            scenarios[cache_key] = payload
        return payload

    @app.get("/api/solutions/{sid}/geojson")
    async def get_geojson(sid: str, t: Optional[str] = None, min_line_size: int = 10):
        if store.kind_of(sid) != "solution":
            return _not_found("solution")
        inst, metrics, selection = _solution_context(sid)
        scenario = None
        if t is not None:
            scenario = build_scenario(selection, inst.lines, _rational_param(t, "t"), min_line_size, metrics)
        doc = geojson_doc(inst, selection, scenario)
        return JSONResponse(doc, media_type="application/geo+json")

    if ui_dir is not None:
        # mounted last so /api/* keeps precedence
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
