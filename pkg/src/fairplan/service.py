"""HTTP JSON API exposing the engine to the dashboard and other clients.

One process owns one session: the current design, its population and
config, a simulation cache, a timeline store, and the async recommendation
jobs. Handlers contain no fairness math; every response body is produced
by composing library calls and serialized canonically, so replaying a
recorded session against direct library invocations yields identical
bytes.

Edits use optimistic concurrency: requests echo the revision they were
made against and stale ones are rejected with 409.
"""

from __future__ import annotations

import itertools
import os
import threading
from typing import Mapping, Optional

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import _kernels, scenario
from .allocate import simulate
from .benefit import Population
from .errors import (
    CalibrationError,
    DomainError,
    EditError,
    FairplanError,
    NotFoundError,
    ParseError,
    StoreError,
)
from .model import CityDesign, DesignArrays, Edit, PlanningConfig, apply_edits
from .recommend import recommend, resolve_constraints
from .store import TimelineStore, canonical_json_bytes, design_to_dict

DEFAULT_SEED = 0

_STATUS_BY_CODE = {
    NotFoundError: 404,
    EditError: 422,
    ParseError: 422,
    DomainError: 422,
    CalibrationError: 422,
    StoreError: 500,
}


class StaleRevisionError(FairplanError):
    code = "stale-revision"


class Session:
    """Mutable per-process state: current design plus caches and jobs."""

    def __init__(self, design: CityDesign, population: Population,
                 config: PlanningConfig, data_dir: Optional[str] = None,
                 sync_jobs: Optional[bool] = None):
        self.design = design
        self.population = population
        self.config = config
        self.lock = threading.RLock()
        self.data_dir = data_dir
        self.timeline = TimelineStore(os.path.join(data_dir, "timeline")) if data_dir else None
        self._sim_cache: dict = {}
        self._jobs: dict = {}
        self._job_counter = itertools.count(1)
        if sync_jobs is None:
            sync_jobs = os.environ.get("FAIRPLAN_SYNC_JOBS", "").strip().lower() in ("1", "true", "on", "yes")
        self.sync_jobs = sync_jobs

    @classmethod
    def bundled(cls, data_dir: Optional[str] = None, sync_jobs: Optional[bool] = None) -> "Session":
        design, population, config = scenario.load_scenario()
        return cls(design, population, config, data_dir=data_dir, sync_jobs=sync_jobs)

    # -- simulation cache ---------------------------------------------------

    def simulation(self, seed: int):
        key = (self.design.revision, seed)
        if key not in self._sim_cache:
            self._sim_cache[key] = simulate(self.design, self.population, self.config, seed)
        return self._sim_cache[key]

    # -- edits ----------------------------------------------------------------

    def apply_edits(self, revision: int, edit_dicts) -> CityDesign:
        with self.lock:
            if revision != self.design.revision:
                raise StaleRevisionError(
                    f"edit made against revision {revision} but current is {self.design.revision}",
                    details={"current_revision": self.design.revision, "sent_revision": revision},
                )
            edits = [Edit.from_dict(e) for e in edit_dicts]
            self.design = apply_edits(self.design, edits)
            return self.design

    # -- jobs -----------------------------------------------------------------

    def submit_recommend(self, constraints_dict: Mapping, seed: int) -> str:
        job_id = f"job-{next(self._job_counter)}"
        snapshot = (self.design, self.population, self.config)
        self._jobs[job_id] = {"job_id": job_id, "status": "queued", "result": None, "error": None}

        def run():
            self._jobs[job_id]["status"] = "running"
            try:
                design, population, config = snapshot
                constraints = resolve_constraints(constraints_dict, design)
                plan = recommend(design, population, constraints, config, seed=seed)
                self._jobs[job_id]["result"] = plan.to_dict()
                self._jobs[job_id]["status"] = "done"
            except Exception as exc:  # job errors surface through polling
                detail = exc.to_dict() if isinstance(exc, FairplanError) else {"code": "error", "message": str(exc)}
                self._jobs[job_id]["error"] = detail
                self._jobs[job_id]["status"] = "failed"

        if self.sync_jobs:
            run()
        else:
            threading.Thread(target=run, daemon=True).start()
        return job_id

    def job(self, job_id: str) -> dict:
        if job_id not in self._jobs:
            raise NotFoundError(f"unknown job '{job_id}'")
        return self._jobs[job_id]


# ---------------------------------------------------------------------------
# payload builders (shared by the API and the parity tests)
# ---------------------------------------------------------------------------

def design_payload(session: Session) -> dict:
    return {"revision": session.design.revision, "design": design_to_dict(session.design)}


def simulate_payload(session: Session, seed: int) -> dict:
    result = session.simulation(seed)
    return {"revision": session.design.revision, "result": result.to_dict()}


def indicators_payload(session: Session) -> dict:
    design = session.design
    totals = design.total_floor_area_by_type()
    counts = session.population.counts_by_type()
    types = {
        t.id: {
            "name": t.name,
            "count": counts.get(t.id, 0),
            "mean_preferences": dict(t.mean_preferences),
        }
        for t in session.population.types
    }
    return {
        "revision": design.revision,
        "floor_areas": {k: totals[k] for k in sorted(totals)},
        "site_area": sum(b.footprint_area for b in design.buildings),
        "total_capacity": design.total_capacity(session.config.area_per_resident),
        "population": types,
        "residents": len(session.population.residents),
    }


def heatmap_payload(session: Session, seed: int) -> dict:
    result = session.simulation(seed)
    design = session.design
    mean = result.stats.global_mean if result.stats else 0.0
    occupancy = result.allocation.occupancy() if result.allocation else {}
    benefits_by_building: dict[str, list] = {}
    if result.allocation:
        for rid, bid in result.allocation.assignments.items():
            if bid is not None:
                benefits_by_building.setdefault(bid, []).append(result.realized_benefits[rid])
    buildings = []
    per_block: dict[str, list] = {}
    for b in design.buildings:
        vals = benefits_by_building.get(b.id, [])
        bmean = float(np.mean(vals)) if vals else None
        buildings.append(
            {
                "id": b.id,
                "block_id": b.block_id,
                "occupancy": occupancy.get(b.id, 0),
                "mean_benefit": bmean,
                "relative_benefit": (bmean - mean) if bmean is not None else None,
            }
        )
        per_block.setdefault(b.block_id, []).extend(vals)
    blocks = []
    for bid in sorted(design.blocks):
        vals = per_block.get(bid, [])
        bmean = float(np.mean(vals)) if vals else None
        blocks.append(
            {
                "block_id": bid,
                "occupancy": sum(occupancy.get(x, 0) for x in design.blocks[bid].building_ids),
                "mean_benefit": bmean,
                "relative_benefit": (bmean - mean) if bmean is not None else None,
            }
        )
    return {
        "revision": design.revision,
        "seed": seed,
        "global_mean_benefit": mean,
        "buildings": buildings,
        "blocks": blocks,
    }


def building_detail_payload(session: Session, building_id: str, seed: int) -> dict:
    design = session.design
    if building_id not in design.buildings_by_id:
        raise NotFoundError(f"unknown building '{building_id}'")
    b = design.buildings_by_id[building_id]
    config = session.config
    arrays = DesignArrays(design, config)
    # accessibility row for this building, whether or not it is residential
    idx = arrays.index_of[building_id]
    dist_row = _kernels.pairwise_distances(arrays.centroids[idx:idx + 1], arrays.centroids)
    access_row = {}
    for f in config.non_residential:
        kappa = config.impedance_of(f)
        within = dist_row[0] <= config.accessibility_cutoff_radius
        decay = np.where(within, np.exp(-kappa * dist_row[0]), 0.0)
        access_row[f] = float((decay * arrays.areas[:, arrays.ft_index[f]]).sum() / config.priority_of(f))
    utility_per_type = {
        t.id: float(sum(w * access_row.get(f, 0.0) for f, w in t.mean_preferences.items()))
        for t in session.population.types
    }
    result = session.simulation(seed)
    occupants = []
    if result.allocation:
        for rid, bid in result.allocation.assignments.items():
            if bid == building_id:
                occupants.append(rid)
    occupants.sort()
    benefits = [result.realized_benefits[rid] for rid in occupants]
    return {
        "revision": design.revision,
        "id": b.id,
        "block_id": b.block_id,
        "floors": b.floors,
        "floor_areas": dict(b.floor_areas),
        "footprint_area": b.footprint_area,
        "capacity": b.occupancy_capacity(config.area_per_resident),
        "accessibility": access_row,
        "utility_per_type": utility_per_type,
        "occupants": len(occupants),
        "benefit_distribution": benefits,
        "mean_benefit": float(np.mean(benefits)) if benefits else None,
    }


def timeline_save_payload(session: Session, label: str, timestamp: Optional[str] = None) -> dict:
    if session.timeline is None:
        raise StoreError("no data directory configured; timeline disabled")
    result = session.simulation(DEFAULT_SEED)
    totals = session.design.total_floor_area_by_type()
    indicators = {
        "total_inequality": result.inequality.total if result.inequality else None,
        "mean_benefit": result.stats.global_mean if result.stats else None,
        "per_group_mean": (
            {g: s.mean for g, s in result.stats.per_group.items()} if result.stats else {}
        ),
        "floor_areas": {k: totals[k] for k in sorted(totals)},
    }
    parents = [e.revision for e in session.timeline.list()]
    iteration = session.timeline.append(
        session.design,
        indicators,
        label=label,
        parent_revision=parents[-1] if parents else None,
        seed=DEFAULT_SEED,
        timestamp=timestamp,
    )
    return {"iteration": iteration.to_index_entry()}


def timeline_list_payload(session: Session) -> dict:
    if session.timeline is None:
        raise StoreError("no data directory configured; timeline disabled")
    return {"iterations": [e.to_index_entry() for e in session.timeline.list()]}


def timeline_get_payload(session: Session, revision: int) -> dict:
    if session.timeline is None:
        raise StoreError("no data directory configured; timeline disabled")
    entry = session.timeline.get(revision)
    return {"iteration": entry.to_index_entry(), "design": design_to_dict(entry.design)}


# ---------------------------------------------------------------------------
# app wiring
# ---------------------------------------------------------------------------

def _json(payload, status_code: int = 200) -> Response:
    return Response(content=canonical_json_bytes(payload), media_type="application/json",
                    status_code=status_code)


def create_app(session: Optional[Session] = None, ui_dir: Optional[str] = None) -> FastAPI:
    session = session or Session.bundled()
    app = FastAPI(title="fairplan", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.session = session

    @app.exception_handler(FairplanError)
    async def fairplan_error(_request: Request, exc: FairplanError):
        status = 409 if isinstance(exc, StaleRevisionError) else _STATUS_BY_CODE.get(type(exc), 500)
        return _json(exc.to_dict(), status_code=status)

    @app.exception_handler(ValueError)
    async def value_error(_request: Request, exc: ValueError):
        return _json({"code": "invalid-request", "message": str(exc), "details": {}}, status_code=422)

    @app.get("/api/design")
    async def get_design():
        return _json(design_payload(session))

    @app.post("/api/design/edits")
    async def post_edits(request: Request):
        body = await request.json()
        if "revision" not in body:
            raise ValueError("body must carry the revision the edits were made against")
        session.apply_edits(int(body["revision"]), body.get("edits", []))
        return _json(design_payload(session))

    @app.post("/api/simulate")
    async def post_simulate(request: Request):
        body = await request.json() if await request.body() else {}
        seed = int(body.get("seed", DEFAULT_SEED))
        return _json(simulate_payload(session, seed))

    @app.get("/api/indicators")
    async def get_indicators():
        return _json(indicators_payload(session))

    @app.get("/api/benefits/heatmap")
    async def get_heatmap(seed: int = DEFAULT_SEED):
        return _json(heatmap_payload(session, seed))

    @app.get("/api/buildings/{building_id}/detail")
    async def get_building_detail(building_id: str, seed: int = DEFAULT_SEED):
        return _json(building_detail_payload(session, building_id, seed))

    @app.post("/api/recommend")
    async def post_recommend(request: Request):
        body = await request.json()
        seed = int(body.get("seed", DEFAULT_SEED))
        job_id = session.submit_recommend(body.get("constraints", {}), seed)
        return _json({"job_id": job_id, "status": session.job(job_id)["status"]}, status_code=202)

    @app.get("/api/jobs/{job_id}")
    async def get_job(job_id: str):
        return _json(session.job(job_id))

    @app.post("/api/timeline/save")
    async def post_timeline_save(request: Request):
        body = await request.json() if await request.body() else {}
        return _json(timeline_save_payload(session, body.get("label", ""), body.get("timestamp")))

    @app.get("/api/timeline")
    async def get_timeline():
        return _json(timeline_list_payload(session))

    @app.get("/api/timeline/{revision}")
    async def get_timeline_revision(revision: int):
        return _json(timeline_get_payload(session, revision))

    if ui_dir and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(port: Optional[int] = None, data_dir: Optional[str] = None,
          ui_dir: Optional[str] = None):
    """Run the API with uvicorn (blocking). When ui_dir points at the built
    dashboard (frontend/ with dist/), it is served at the root path."""
    import uvicorn

    port = port or int(os.environ.get("FAIRPLAN_PORT", "8787"))
    data_dir = data_dir or os.environ.get("FAIRPLAN_DATA_DIR") or None
    app = create_app(Session.bundled(data_dir=data_dir), ui_dir=ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
