"""Record service responses for the dashboard test fixtures.

Boots the HTTP service in-process against a temp directory, ingests the
built-in corridor demo, runs one solve, and snapshots the responses the
dashboard consumes.  Re-run after changing the service payload shapes:

    python scripts/record_fixtures.py
"""

import json
import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from osdnp.service import create_app
from osdnp.synth import demo_doc

OUT = Path(__file__).resolve().parent.parent / "test" / "fixtures"


def _wait(client, job_id):
    deadline = time.monotonic() + 30.0
    while time.monotonic() < deadline:
        job = client.get(f"/api/jobs/{job_id}").json()
        if job["state"] in ("done", "failed"):
            return job
        time.sleep(0.05)
    raise RuntimeError("job did not finish")


def _dump(name, payload):
    path = OUT / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path.relative_to(OUT.parent.parent)}")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(Path(tmp), default_time_limit=30.0, workers=1)
        with TestClient(app) as client:
            inst = client.post("/api/instances", json=demo_doc()).json()
            job = client.post("/api/solve", json={"instance_id": inst["id"]}).json()
            job = _wait(client, job["id"])
            assert job["state"] == "done", job
            _dump("job.json", job)

            sid = job["result"]
            sol = client.get(f"/api/solutions/{sid}").json()
            _dump("solution.json", sol)

            for t, name in [
                ("0", "scenario_t0.json"),
                ("0.4", "scenario_t0_4.json"),
                ("0.6", "scenario_t0_6.json"),
            ]:
                scn = client.get(
                    f"/api/solutions/{sid}/scenario",
                    params={"t": t, "min_line_size": 1},
                ).json()
                _dump(name, scn)

            sweep = []
            for i in range(10):
                t = f"{i / 10:.1f}"
                scn = client.get(
                    f"/api/solutions/{sid}/scenario",
                    params={"t": t, "min_line_size": 1},
                ).json()
                sweep.append(scn)
            _dump("sweep.json", sweep)

            geo = client.get(f"/api/solutions/{sid}/geojson").json()
            _dump("geojson.json", geo)
            geo6 = client.get(
                f"/api/solutions/{sid}/geojson",
                params={"t": "0.6", "min_line_size": 1},
            ).json()
            _dump("geojson_t0_6.json", geo6)


if __name__ == "__main__":
    main()
