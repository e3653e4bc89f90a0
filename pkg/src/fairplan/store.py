"""File formats and design-timeline persistence.

All serialization is canonical: keys sorted, floats cut to 9 significant
digits, compact separators. That makes the determinism contracts upstream
byte-testable, and is the documented precision boundary of the file
formats. Timeline appends are atomic (write-temp-then-rename).
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from .benefit import Population, ResidentProfile, ResidentType, validate_population
from .errors import NotFoundError, ParseError, StoreError
from .model import Building, CityDesign, PlanningConfig, DEFAULT_FUNCTION_TYPES

SCHEMA_VERSION = 1
FLOAT_DIGITS = 9


def round_floats(obj):
    """Recursively cut floats to 9 significant digits (canonical precision)."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite float {obj} is not serializable")
        return float(f"{obj:.{FLOAT_DIGITS}g}")
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def canonical_json(obj) -> str:
    return json.dumps(round_floats(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def canonical_json_bytes(obj) -> bytes:
    return canonical_json(obj).encode("utf-8")


def _write_atomic(path: Path, data: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data, encoding="utf-8")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# city designs
# ---------------------------------------------------------------------------

def design_to_dict(design: CityDesign) -> dict:
    features = []
    for b in design.buildings:
        ring = [[x, y] for x, y in b.footprint]
        if ring and ring[0] != ring[-1]:
            ring = ring + [ring[0]]  # GeoJSON rings are closed
        features.append(
            {
                "type": "Feature",
                "id": b.id,
                "geometry": {"type": "Polygon", "coordinates": [ring]},
                "properties": {
                    "block_id": b.block_id,
                    "floors": b.floors,
                    "floor_areas": dict(b.floor_areas),
                },
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "FeatureCollection",
        "crs_note": design.crs_note,
        "revision": design.revision,
        "features": features,
    }


def design_from_dict(doc: Mapping, known_types: Optional[tuple] = None) -> CityDesign:
    known = tuple(known_types or DEFAULT_FUNCTION_TYPES)
    if doc.get("type") != "FeatureCollection":
        raise ParseError("expected a FeatureCollection document")
    buildings = []
    for idx, feat in enumerate(doc.get("features", [])):
        where = f"feature {idx} (id {feat.get('id')!r})"
        props = feat.get("properties")
        if props is None:
            raise ParseError(f"{where}: missing 'properties'")
        if "floors" not in props:
            raise ParseError(f"{where}: missing 'floors'")
        if "block_id" not in props:
            raise ParseError(f"{where}: missing 'block_id'")
        geom = feat.get("geometry") or {}
        if geom.get("type") != "Polygon":
            raise ParseError(f"{where}: geometry must be a Polygon")
        try:
            ring = geom["coordinates"][0]
            footprint = [(float(x), float(y)) for x, y in ring]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ParseError(f"{where}: invalid polygon coordinates ({exc})") from exc
        if len(footprint) >= 2 and footprint[0] == footprint[-1]:
            footprint = footprint[:-1]
        if len(footprint) < 3:
            raise ParseError(f"{where}: polygon needs at least 3 distinct vertices")
        floor_areas = {}
        for f, v in (props.get("floor_areas") or {}).items():
            if f not in known:
                raise ParseError(
                    f"{where}: unknown function type '{f}' (known: {', '.join(known)})"
                )
            floor_areas[f] = float(v)
        buildings.append(
            Building(
                id=str(feat.get("id", f"feature-{idx}")),
                block_id=str(props["block_id"]),
                footprint=tuple(footprint),
                floors=int(props["floors"]),
                floor_areas=floor_areas,
            )
        )
    return CityDesign.from_buildings(
        buildings,
        crs_note=doc.get("crs_note", "local projected planar CRS (meters)"),
        revision=int(doc.get("revision", 0)),
    )


def save_city(design: CityDesign, path):
    _write_atomic(Path(path), canonical_json(design_to_dict(design)))


def load_city(path, known_types: Optional[tuple] = None) -> CityDesign:
    p = Path(path)
    if not p.exists():
        raise NotFoundError(f"city file not found: {p}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: not valid JSON at line {exc.lineno}: {exc.msg}") from exc
    return design_from_dict(doc, known_types)


# ---------------------------------------------------------------------------
# populations
# ---------------------------------------------------------------------------

def population_to_dict(population: Population) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "types": [
            {"id": t.id, "name": t.name, "mean_preferences": dict(t.mean_preferences)}
            for t in population.types
        ],
        "residents": [
            {
                "id": r.id,
                "type_id": r.type_id,
                "preferences": dict(r.preferences),
                "prior_utility": r.prior_utility,
            }
            for r in population.residents
        ],
    }


def _parse_preferences(raw: Mapping, who: str) -> dict:
    """Preference vectors re-enter through the 9-significant-digit file
    precision; drifts within that boundary are renormalized exactly,
    anything larger is a validation error."""
    prefs = {k: float(v) for k, v in raw.items()}
    total = sum(prefs.values())
    if abs(total - 1.0) > 1e-6:
        raise ParseError(f"{who}: preference vector sums to {total:.6g}, expected 1")
    if total != 1.0 and total > 0:
        prefs = {k: v / total for k, v in prefs.items()}
    return prefs


def population_from_dict(doc: Mapping) -> Population:
    try:
        types = tuple(
            ResidentType(
                id=str(t["id"]),
                name=str(t.get("name", t["id"])),
                mean_preferences={k: float(v) for k, v in t.get("mean_preferences", {}).items()},
            )
            for t in doc.get("types", [])
        )
        residents = tuple(
            ResidentProfile(
                id=str(r["id"]),
                type_id=str(r["type_id"]),
                preferences=_parse_preferences(r["preferences"], f"resident '{r['id']}'"),
                prior_utility=float(r["prior_utility"]),
            )
            for r in doc.get("residents", [])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed population document: {exc}") from exc
    population = Population(types=types, residents=residents)
    problems = validate_population(population, tol=1e-7)
    if problems:
        raise ParseError("population validation failed: " + "; ".join(problems[:5]))
    return population


def save_population(population: Population, path):
    _write_atomic(Path(path), canonical_json(population_to_dict(population)))


def load_population(path) -> Population:
    p = Path(path)
    if not p.exists():
        raise NotFoundError(f"population file not found: {p}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: not valid JSON at line {exc.lineno}: {exc.msg}") from exc
    return population_from_dict(doc)


def save_config(config: PlanningConfig, path):
    _write_atomic(Path(path), canonical_json(config.to_dict()))


def load_config(path) -> PlanningConfig:
    p = Path(path)
    if not p.exists():
        raise NotFoundError(f"config file not found: {p}")
    try:
        return PlanningConfig.from_dict(json.loads(p.read_text(encoding="utf-8")))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: not valid JSON: {exc.msg}") from exc


# ---------------------------------------------------------------------------
# design timeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DesignIteration:
    revision: int
    timestamp: str
    label: str
    parent_revision: Optional[int]
    indicators: Mapping
    seed: int
    design: Optional[CityDesign] = None  # populated by timeline_get

    def to_index_entry(self) -> dict:
        return {
            "revision": self.revision,
            "timestamp": self.timestamp,
            "label": self.label,
            "parent_revision": self.parent_revision,
            "indicators": dict(self.indicators),
            "seed": self.seed,
        }


class TimelineStore:
    """Append-only design history: one snapshot file per revision plus a
    JSON index. Single writer, atomic renames."""

    def __init__(self, root):
        self.root = Path(root)
        self.snapshots = self.root / "snapshots"
        self.index_path = self.root / "index.json"
        self.snapshots.mkdir(parents=True, exist_ok=True)
        if not self.index_path.exists():
            _write_atomic(self.index_path, canonical_json({"schema_version": SCHEMA_VERSION, "iterations": []}))

    def _read_index(self) -> dict:
        try:
            doc = json.loads(self.index_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise StoreError(f"timeline index corrupted: {exc.msg} (line {exc.lineno})") from exc
        if "iterations" not in doc:
            raise StoreError("timeline index corrupted: missing 'iterations'")
        return doc

    def append(self, design: CityDesign, indicators: Mapping, label: str = "",
               parent_revision: Optional[int] = None, seed: int = 0,
               timestamp: Optional[str] = None) -> DesignIteration:
        doc = self._read_index()
        existing = {e["revision"] for e in doc["iterations"]}
        if design.revision in existing:
            raise StoreError(f"revision {design.revision} already saved")
        iteration = DesignIteration(
            revision=design.revision,
            timestamp=timestamp or time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            label=label,
            parent_revision=parent_revision,
            indicators=round_floats(dict(indicators)),
            seed=seed,
        )
        snap = self.snapshots / f"rev_{design.revision}.json"
        _write_atomic(snap, canonical_json(design_to_dict(design)))
        doc["iterations"].append(iteration.to_index_entry())
        _write_atomic(self.index_path, canonical_json(doc))
        return iteration

    def list(self) -> list:
        doc = self._read_index()
        return [
            DesignIteration(
                revision=e["revision"],
                timestamp=e["timestamp"],
                label=e.get("label", ""),
                parent_revision=e.get("parent_revision"),
                indicators=e.get("indicators", {}),
                seed=e.get("seed", 0),
            )
            for e in doc["iterations"]
        ]

    def get(self, revision: int) -> DesignIteration:
        for entry in self.list():
            if entry.revision == revision:
                snap = self.snapshots / f"rev_{revision}.json"
                if not snap.exists():
                    raise StoreError(f"snapshot for revision {revision} missing from store")
                design = design_from_dict(json.loads(snap.read_text(encoding="utf-8")))
                return DesignIteration(
                    revision=entry.revision,
                    timestamp=entry.timestamp,
                    label=entry.label,
                    parent_revision=entry.parent_revision,
                    indicators=entry.indicators,
                    seed=entry.seed,
                    design=design,
                )
        raise NotFoundError(f"revision {revision} not in timeline")
