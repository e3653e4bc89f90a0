#!/usr/bin/env python3
"""Record service responses as fixtures for the UI contract tests.

Replays a scripted session against the in-process app (identical bytes to
a live server) and writes each body under test/fixtures/.
"""

import sys
from pathlib import Path

from fastapi.testclient import TestClient

from fairplan.service import Session, create_app

FIXTURES = Path(__file__).resolve().parent.parent / "test" / "fixtures"


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    import tempfile

    with tempfile.TemporaryDirectory() as data_dir:
        session = Session.bundled(data_dir=data_dir, sync_jobs=True)
        client = TestClient(create_app(session))

        def save(name, response):
            assert response.status_code in (200, 202), (name, response.status_code, response.text)
            (FIXTURES / name).write_bytes(response.content)
            print(f"wrote {name} ({len(response.content)} bytes)")

        save("design.json", client.get("/api/design"))
        save("indicators.json", client.get("/api/indicators"))
        save("simulate.json", client.post("/api/simulate", json={"seed": 0}))
        save("heatmap.json", client.get("/api/benefits/heatmap", params={"seed": 0}))
        save("building_detail.json", client.get("/api/buildings/res-a1/detail", params={"seed": 0}))

        job = client.post("/api/recommend",
                          json={"constraints": {"budget_fraction": 0.10}, "seed": 0})
        job_id = job.json()["job_id"]
        save("job_done.json", client.get(f"/api/jobs/{job_id}"))

        client.post("/api/timeline/save", json={"label": "baseline",
                                                "timestamp": "2026-03-01T00:00:00Z"})
        edit = {"action": "modify", "building_id": "cult-1",
                "changes": {"floors": 4, "floor_areas": {"Cultural": 3000.0}}}
        save("design_after_edit.json",
             client.post("/api/design/edits", json={"revision": 0, "edits": [edit]}))
        save("simulate_after_edit.json", client.post("/api/simulate", json={"seed": 0}))
        client.post("/api/timeline/save", json={"label": "more culture",
                                                "timestamp": "2026-03-01T00:05:00Z"})
        save("timeline.json", client.get("/api/timeline"))
        save("timeline_rev1.json", client.get("/api/timeline/1"))

        stale = client.post("/api/design/edits", json={"revision": 0, "edits": [edit]})
        assert stale.status_code == 409
        (FIXTURES / "stale_conflict.json").write_bytes(stale.content)
        print("wrote stale_conflict.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
