import json

import pytest
from fastapi.testclient import TestClient

from fairplan.service import (
    Session,
    building_detail_payload,
    create_app,
    design_payload,
    heatmap_payload,
    indicators_payload,
    simulate_payload,
    timeline_get_payload,
    timeline_list_payload,
    timeline_save_payload,
)
from fairplan.store import canonical_json

pytestmark = pytest.mark.filterwarnings("ignore::DeprecationWarning")


@pytest.fixture
def client(tmp_path):
    session = Session.bundled(data_dir=str(tmp_path), sync_jobs=True)
    app = create_app(session)
    with TestClient(app) as c:
        c.session = session
        yield c


def test_fresh_session_serves_bundled_design(client):
    r = client.get("/api/design")
    assert r.status_code == 200
    body = r.json()
    assert body["revision"] == 0
    assert len(body["design"]["features"]) == 36


def test_simulate_deterministic_bytes(client):
    r1 = client.post("/api/simulate", json={"seed": 4})
    r2 = client.post("/api/simulate", json={"seed": 4})
    assert r1.status_code == 200
    assert r1.content == r2.content
    assert r1.json()["result"]["inequality"]["total"] > 0


def test_simulate_empty_body_uses_default_seed(client):
    bare = client.post("/api/simulate")
    explicit = client.post("/api/simulate", json={"seed": 0})
    assert bare.status_code == 200
    assert bare.content == explicit.content


def test_edit_flow_and_stale_revision(client):
    stale = client.post("/api/design/edits", json={"revision": 99, "edits": []})
    assert stale.status_code == 409
    assert stale.json()["code"] == "stale-revision"

    edit = {
        "action": "add",
        "building": {
            "id": "new-park",
            "block_id": "blk-park",
            "footprint": [[500, 560], [560, 560], [560, 620], [500, 620]],
            "floors": 1,
            "floor_areas": {"Park": 3000.0},
        },
    }
    ok = client.post("/api/design/edits", json={"revision": 0, "edits": [edit]})
    assert ok.status_code == 200
    assert ok.json()["revision"] == 1
    # now the old revision is stale
    again = client.post("/api/design/edits", json={"revision": 0, "edits": [edit]})
    assert again.status_code == 409


def test_edit_validation_failure_is_422(client):
    edit = {
        "action": "add",
        "building": {
            "id": "bad",
            "block_id": "blk-core",
            "footprint": [[0, 0], [10, 0], [10, 10], [0, 10]],
            "floors": 1,
            "floor_areas": {"Office": -5.0},
        },
    }
    r = client.post("/api/design/edits", json={"revision": 0, "edits": [edit]})
    assert r.status_code == 422
    assert r.json()["code"] == "edit-rejected"


def test_indicators_shape(client):
    r = client.get("/api/indicators")
    body = r.json()
    assert body["total_capacity"] == 480
    assert body["residents"] == 600
    assert set(body["floor_areas"]) >= {"Residential", "Park", "Cultural"}
    assert body["population"]["outdoor"]["count"] == 100


def test_heatmap_relative_benefits(client):
    r = client.get("/api/benefits/heatmap", params={"seed": 0})
    body = r.json()
    assert body["global_mean_benefit"] > 0
    rows = {b["id"]: b for b in body["buildings"]}
    occupied = [b for b in rows.values() if b["occupancy"] > 0]
    assert occupied, "some building must be occupied"
    for b in occupied:
        assert b["relative_benefit"] == pytest.approx(b["mean_benefit"] - body["global_mean_benefit"])
    empty = [b for b in rows.values() if b["occupancy"] == 0]
    assert all(b["mean_benefit"] is None for b in empty)


def test_building_detail_trace(client):
    r = client.get("/api/buildings/res-a1/detail", params={"seed": 0})
    body = r.json()
    assert body["capacity"] == 30
    assert set(body["accessibility"]) == {"Office", "Commercial", "Cultural", "Educational", "Park"}
    assert body["accessibility"]["Park"] > body["accessibility"]["Cultural"]
    assert len(body["benefit_distribution"]) == body["occupants"] <= body["capacity"]
    assert set(body["utility_per_type"]) == {"outdoor", "general", "culture", "commercial", "office", "educators"}


def test_building_detail_unknown_404(client):
    r = client.get("/api/buildings/nope/detail")
    assert r.status_code == 404


def test_recommend_job_sync(client):
    r = client.post("/api/recommend", json={"constraints": {"budget_fraction": 0.02}, "seed": 0})
    assert r.status_code == 202
    job_id = r.json()["job_id"]
    j = client.get(f"/api/jobs/{job_id}")
    assert j.status_code == 200
    body = j.json()
    assert body["status"] == "done"
    assert body["result"]["plan"]["predicted_inequality"] < body["result"]["soft_inequality_before"]
    assert client.get("/api/jobs/job-unknown").status_code == 404


def test_timeline_flow(client):
    r = client.post("/api/timeline/save", json={"label": "baseline", "timestamp": "2026-01-01T00:00:00Z"})
    assert r.status_code == 200
    assert r.json()["iteration"]["revision"] == 0
    listing = client.get("/api/timeline").json()
    assert [e["revision"] for e in listing["iterations"]] == [0]
    got = client.get("/api/timeline/0").json()
    assert got["iteration"]["label"] == "baseline"
    assert len(got["design"]["features"]) == 36
    assert client.get("/api/timeline/42").status_code == 404


def test_recorded_session_parity(tmp_path):
    """Replaying a scripted HTTP session yields byte-identical bodies to
    composing the library payload builders directly."""
    session_a = Session.bundled(data_dir=str(tmp_path / "a"), sync_jobs=True)
    client = TestClient(create_app(session_a))
    session_b = Session.bundled(data_dir=str(tmp_path / "b"), sync_jobs=True)

    edit = {
        "action": "modify",
        "building_id": "cult-1",
        "changes": {"floors": 4, "floor_areas": {"Cultural": 2400.0}},
    }

    recorded = []  # (description, http bytes, direct bytes)

    r = client.get("/api/design")
    recorded.append(("design", r.content, canonical_json(design_payload(session_b)).encode()))

    r = client.post("/api/simulate", json={"seed": 3})
    recorded.append(("simulate", r.content, canonical_json(simulate_payload(session_b, 3)).encode()))

    r = client.post("/api/design/edits", json={"revision": 0, "edits": [edit]})
    session_b.apply_edits(0, [edit])
    recorded.append(("edits", r.content, canonical_json(design_payload(session_b)).encode()))

    r = client.get("/api/indicators")
    recorded.append(("indicators", r.content, canonical_json(indicators_payload(session_b)).encode()))

    r = client.post("/api/simulate", json={"seed": 3})
    recorded.append(("simulate-after-edit", r.content,
                     canonical_json(simulate_payload(session_b, 3)).encode()))

    r = client.get("/api/benefits/heatmap", params={"seed": 3})
    recorded.append(("heatmap", r.content, canonical_json(heatmap_payload(session_b, 3)).encode()))

    r = client.get("/api/buildings/res-b3/detail", params={"seed": 3})
    recorded.append(("detail", r.content,
                     canonical_json(building_detail_payload(session_b, "res-b3", 3)).encode()))

    r = client.post("/api/recommend", json={"constraints": {"budget_fraction": 0.02}, "seed": 5})
    job_id = r.json()["job_id"]
    http_job = client.get(f"/api/jobs/{job_id}").content
    job_b = session_b.submit_recommend({"budget_fraction": 0.02}, 5)
    recorded.append(("job", http_job, canonical_json(session_b.job(job_b)).encode()))

    r = client.post("/api/timeline/save", json={"label": "v1", "timestamp": "2026-02-02T00:00:00Z"})
    direct = canonical_json(timeline_save_payload(session_b, "v1", "2026-02-02T00:00:00Z")).encode()
    recorded.append(("timeline-save", r.content, direct))

    r = client.get("/api/timeline")
    recorded.append(("timeline-list", r.content, canonical_json(timeline_list_payload(session_b)).encode()))

    r = client.get("/api/timeline/1")
    recorded.append(("timeline-get", r.content, canonical_json(timeline_get_payload(session_b, 1)).encode()))

    for name, http_bytes, direct_bytes in recorded:
        assert http_bytes == direct_bytes, f"parity broken for {name}"
