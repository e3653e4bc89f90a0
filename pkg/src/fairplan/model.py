"""Domain model: buildings, blocks, city designs, and planning configuration.

Designs are immutable snapshots. Edits never mutate; they return a new
design with the revision bumped and block aggregates recomputed. Block
aggregates (total footprint, mean height) are always derived from member
buildings, never stored independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import EditError, GeometryError

RESIDENTIAL = "Residential"

DEFAULT_FUNCTION_TYPES = (
    "Residential",
    "Office",
    "Commercial",
    "Cultural",
    "Educational",
    "Park",
)

# Volume check allows 1% slack for area rounding.
VOLUME_SLACK = 1.01


def polygon_area(vertices) -> float:
    """Shoelace area of a planar polygon (open or closed vertex ring)."""
    pts = list(vertices)
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]
    if len(pts) < 3:
        return 0.0
    s = 0.0
    for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
        s += x1 * y2 - x2 * y1
    return abs(s) / 2.0


def polygon_centroid(vertices):
    """Area-weighted centroid of a planar polygon."""
    pts = list(vertices)
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]
    a2 = 0.0
    cx = 0.0
    cy = 0.0
    for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
        cross = x1 * y2 - x2 * y1
        a2 += cross
        cx += (x1 + x2) * cross
        cy += (y1 + y2) * cross
    if a2 == 0.0:
        raise GeometryError("degenerate polygon (zero area)")
    return cx / (3.0 * a2), cy / (3.0 * a2)


@dataclass(frozen=True)
class Building:
    """One building: footprint polygon, floor count, and per-type floor areas."""

    id: str
    block_id: str
    footprint: tuple  # ((x, y), ...) in projected meters
    floors: int
    floor_areas: Mapping[str, float]

    @cached_property
    def footprint_area(self) -> float:
        return polygon_area(self.footprint)

    @cached_property
    def centroid(self):
        try:
            return polygon_centroid(self.footprint)
        except GeometryError:
            raise GeometryError(
                f"building '{self.id}' has a degenerate footprint (zero area)",
                details={"building_id": self.id},
            )

    @property
    def total_floor_area(self) -> float:
        return float(sum(self.floor_areas.values()))

    @property
    def residential_area(self) -> float:
        return float(self.floor_areas.get(RESIDENTIAL, 0.0))

    @property
    def is_residential(self) -> bool:
        return self.residential_area > 0.0

    def occupancy_capacity(self, area_per_resident: float) -> int:
        """Persons housed: floor(residential floor area / per-capita area)."""
        return int(math.floor(self.residential_area / area_per_resident))

    def area_of(self, function_type: str) -> float:
        return float(self.floor_areas.get(function_type, 0.0))


@dataclass(frozen=True)
class Block:
    """Census block aggregate, derived from its member buildings."""

    id: str
    building_ids: tuple
    footprint_total: float
    mean_height: float


@dataclass(frozen=True)
class Violation:
    rule: str
    subject_id: str
    message: str

    def to_dict(self):
        return {"rule": self.rule, "subject_id": self.subject_id, "message": self.message}


def _block_aggregates(buildings: Sequence[Building]):
    footprint_total = sum(b.footprint_area for b in buildings)
    total_area = sum(b.total_floor_area for b in buildings)
    if total_area > 0:
        mean_height = sum(b.total_floor_area * b.floors for b in buildings) / total_area
    elif buildings:
        mean_height = sum(b.floors for b in buildings) / len(buildings)
    else:
        mean_height = 0.0
    return footprint_total, mean_height


@dataclass(frozen=True)
class CityDesign:
    """Immutable design snapshot: all buildings plus the declared block set."""

    buildings: tuple = ()
    block_ids: tuple = ()
    crs_note: str = "local projected planar CRS (meters)"
    revision: int = 0

    @classmethod
    def from_buildings(cls, buildings, crs_note="local projected planar CRS (meters)", revision=0):
        bl = tuple(sorted(buildings, key=lambda b: b.id))
        block_ids = tuple(sorted({b.block_id for b in bl}))
        return cls(buildings=bl, block_ids=block_ids, crs_note=crs_note, revision=revision)

    @cached_property
    def buildings_by_id(self) -> Mapping[str, Building]:
        return {b.id: b for b in self.buildings}

    @cached_property
    def blocks(self) -> Mapping[str, Block]:
        """Blocks with freshly computed aggregates, keyed by block id."""
        members: dict[str, list[Building]] = {bid: [] for bid in self.block_ids}
        for b in self.buildings:
            members.setdefault(b.block_id, []).append(b)
        out = {}
        for bid in sorted(members):
            blds = sorted(members[bid], key=lambda b: b.id)
            footprint_total, mean_height = _block_aggregates(blds)
            out[bid] = Block(
                id=bid,
                building_ids=tuple(b.id for b in blds),
                footprint_total=footprint_total,
                mean_height=mean_height,
            )
        return out

    def residential_buildings(self):
        return [b for b in self.buildings if b.is_residential]

    def total_floor_area_by_type(self) -> dict:
        totals: dict[str, float] = {}
        for b in self.buildings:
            for f, v in b.floor_areas.items():
                totals[f] = totals.get(f, 0.0) + float(v)
        return totals

    def total_capacity(self, area_per_resident: float) -> int:
        return sum(b.occupancy_capacity(area_per_resident) for b in self.buildings)


def validate_design(design: CityDesign):
    """Structural invariant check. Violations are data, not exceptions."""
    violations = []
    seen = set()
    declared = set(design.block_ids)
    for b in design.buildings:
        if b.id in seen:
            violations.append(Violation("duplicate-id", b.id, f"building id '{b.id}' occurs more than once"))
        seen.add(b.id)
        if b.block_id not in declared:
            violations.append(
                Violation("dangling-block", b.id, f"building '{b.id}' references absent block '{b.block_id}'")
            )
        if b.floors < 1:
            violations.append(Violation("bad-floors", b.id, f"building '{b.id}' has non-positive floors"))
        for f, v in b.floor_areas.items():
            if not math.isfinite(v) or v < 0:
                violations.append(
                    Violation("negative-floor-area", b.id, f"building '{b.id}' has invalid {f} floor area {v}")
                )
        fp = b.footprint_area
        if b.total_floor_area > fp * max(b.floors, 0) * VOLUME_SLACK:
            violations.append(
                Violation(
                    "volume-exceeded",
                    b.id,
                    f"building '{b.id}' floor areas sum to {b.total_floor_area:.1f} m² "
                    f"> footprint {fp:.1f} m² × {b.floors} floors",
                )
            )
    return violations


@dataclass(frozen=True)
class Edit:
    """Add/modify/delete descriptor applied through apply_edit."""

    action: str  # "add" | "modify" | "delete"
    building: Optional[Building] = None  # for add
    building_id: Optional[str] = None  # for modify/delete
    changes: Optional[Mapping] = None  # for modify: fields to replace

    @classmethod
    def add(cls, building: Building) -> "Edit":
        return cls(action="add", building=building)

    @classmethod
    def modify(cls, building_id: str, **changes) -> "Edit":
        return cls(action="modify", building_id=building_id, changes=changes)

    @classmethod
    def delete(cls, building_id: str) -> "Edit":
        return cls(action="delete", building_id=building_id)

    @classmethod
    def from_dict(cls, d: Mapping) -> "Edit":
        action = d.get("action")
        if action == "add":
            return cls.add(building_from_dict(d.get("building", {})))
        if action == "modify":
            changes = dict(d.get("changes", {}))
            if "footprint" in changes:
                changes["footprint"] = tuple(tuple(p) for p in changes["footprint"])
            if "floor_areas" in changes:
                changes["floor_areas"] = {k: float(v) for k, v in changes["floor_areas"].items()}
            return cls(action="modify", building_id=d.get("building_id"), changes=changes)
        if action == "delete":
            return cls.delete(d.get("building_id"))
        raise EditError(f"unknown edit action {action!r}")


def building_from_dict(d: Mapping) -> Building:
    try:
        return Building(
            id=str(d["id"]),
            block_id=str(d["block_id"]),
            footprint=tuple((float(x), float(y)) for x, y in d["footprint"]),
            floors=int(d["floors"]),
            floor_areas={str(k): float(v) for k, v in d["floor_areas"].items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise EditError(f"malformed building descriptor: {exc}") from exc


def building_to_dict(b: Building) -> dict:
    return {
        "id": b.id,
        "block_id": b.block_id,
        "footprint": [[x, y] for x, y in b.footprint],
        "floors": b.floors,
        "floor_areas": dict(b.floor_areas),
    }


def apply_edit(design: CityDesign, edit: Edit) -> CityDesign:
    """Apply one edit atomically; returns a new design with revision+1.

    The edit is rejected (EditError) if it references an unknown id or if
    the resulting design fails validation. The input design is unchanged.
    """
    by_id = dict(design.buildings_by_id)
    if edit.action == "add":
        if edit.building is None:
            raise EditError("add edit carries no building")
        if edit.building.id in by_id:
            raise EditError(f"building id '{edit.building.id}' already exists")
        by_id[edit.building.id] = edit.building
    elif edit.action == "modify":
        if edit.building_id not in by_id:
            raise EditError(f"unknown building id '{edit.building_id}'")
        current = by_id[edit.building_id]
        changes = dict(edit.changes or {})
        unknown = set(changes) - {"block_id", "footprint", "floors", "floor_areas"}
        if unknown:
            raise EditError(f"unknown building fields {sorted(unknown)}")
        by_id[edit.building_id] = replace(current, **changes)
    elif edit.action == "delete":
        if edit.building_id not in by_id:
            raise EditError(f"unknown building id '{edit.building_id}'")
        del by_id[edit.building_id]
    else:
        raise EditError(f"unknown edit action {edit.action!r}")

    buildings = tuple(sorted(by_id.values(), key=lambda b: b.id))
    block_ids = tuple(sorted(set(design.block_ids) | {b.block_id for b in buildings}))
    candidate = CityDesign(
        buildings=buildings,
        block_ids=block_ids,
        crs_note=design.crs_note,
        revision=design.revision + 1,
    )
    violations = validate_design(candidate)
    if violations:
        raise EditError(
            "edit rejected by validation",
            details={"violations": [v.to_dict() for v in violations]},
        )
    return candidate


def apply_edits(design: CityDesign, edits: Sequence[Edit]) -> CityDesign:
    """Apply a batch atomically: one revision bump, all-or-nothing."""
    working = design
    for e in edits:
        working = apply_edit(working, e)
    if working is design:
        return design
    return replace(working, revision=design.revision + 1)


@dataclass(frozen=True)
class PlanningConfig:
    """Engine parameters: impedances, priority weights, GE sensitivity.

    Missing per-type impedance/priority entries fall back to the defaults
    (0.001/m and 1.0). alpha must avoid {0, 1}: the closed-form index used
    here is undefined there.
    """

    function_types: tuple = DEFAULT_FUNCTION_TYPES
    impedance: Mapping[str, float] = field(default_factory=dict)
    priority_weight: Mapping[str, float] = field(default_factory=dict)
    alpha: float = 2.0
    area_per_resident: float = 30.0
    accessibility_cutoff_radius: float = 1500.0
    equity_weight: Optional[Mapping[str, float]] = None

    DEFAULT_IMPEDANCE = 0.001  # 1/m
    DEFAULT_PRIORITY = 1.0

    def __post_init__(self):
        if RESIDENTIAL not in self.function_types:
            raise ValueError("function_types must include Residential")
        if len(set(self.function_types)) != len(self.function_types):
            raise ValueError("function type ids must be unique")
        if self.alpha in (0.0, 1.0):
            raise ValueError("alpha in {0, 1} is out of scope (no closed form)")
        for f, k in self.impedance.items():
            if k <= 0:
                raise ValueError(f"impedance for {f} must be > 0")
        for f, w in self.priority_weight.items():
            if w <= 0:
                raise ValueError(f"priority weight for {f} must be > 0")
        if self.area_per_resident <= 0:
            raise ValueError("area_per_resident must be > 0")

    @property
    def non_residential(self) -> tuple:
        return tuple(f for f in self.function_types if f != RESIDENTIAL)

    def impedance_of(self, f: str) -> float:
        return float(self.impedance.get(f, self.DEFAULT_IMPEDANCE))

    def priority_of(self, f: str) -> float:
        return float(self.priority_weight.get(f, self.DEFAULT_PRIORITY))

    def equity_of(self, type_id: str) -> float:
        if self.equity_weight is None:
            return 1.0
        return float(self.equity_weight.get(type_id, 1.0))

    @classmethod
    def from_dict(cls, d: Mapping) -> "PlanningConfig":
        return cls(
            function_types=tuple(d.get("function_types", DEFAULT_FUNCTION_TYPES)),
            impedance={k: float(v) for k, v in d.get("impedance", {}).items()},
            priority_weight={k: float(v) for k, v in d.get("priority_weight", {}).items()},
            alpha=float(d.get("alpha", 2.0)),
            area_per_resident=float(d.get("area_per_resident", 30.0)),
            accessibility_cutoff_radius=float(d.get("accessibility_cutoff_radius", 1500.0)),
            equity_weight=(
                {k: float(v) for k, v in d["equity_weight"].items()}
                if d.get("equity_weight") is not None
                else None
            ),
        )

    def to_dict(self) -> dict:
        return {
            "function_types": list(self.function_types),
            "impedance": dict(self.impedance),
            "priority_weight": dict(self.priority_weight),
            "alpha": self.alpha,
            "area_per_resident": self.area_per_resident,
            "accessibility_cutoff_radius": self.accessibility_cutoff_radius,
            "equity_weight": dict(self.equity_weight) if self.equity_weight else None,
        }


class DesignArrays:
    """Array view of a design for the numeric pipeline.

    Buildings are ordered by id; function types by config order. Built once
    per (design, config) and shared by accessibility, benefits, and the
    recommender.
    """

    def __init__(self, design: CityDesign, config: PlanningConfig):
        self.design = design
        self.config = config
        self.building_ids = [b.id for b in design.buildings]
        self.index_of = {bid: i for i, bid in enumerate(self.building_ids)}
        self.function_types = list(config.function_types)
        self.ft_index = {f: i for i, f in enumerate(self.function_types)}
        self.res_col = self.ft_index[RESIDENTIAL]
        n = len(self.building_ids)
        self.centroids = np.zeros((n, 2))
        self.areas = np.zeros((n, len(self.function_types)))
        self.footprints = np.zeros(n)
        self.block_ids = sorted(design.blocks.keys())
        self.block_index = {bid: i for i, bid in enumerate(self.block_ids)}
        self.building_block = np.zeros(n, dtype=np.int64)
        for i, b in enumerate(design.buildings):
            self.centroids[i] = b.centroid
            self.footprints[i] = b.footprint_area
            self.building_block[i] = self.block_index[b.block_id]
            for f, v in b.floor_areas.items():
                if f in self.ft_index:
                    self.areas[i, self.ft_index[f]] = float(v)

    @cached_property
    def residential_mask(self):
        return self.areas[:, self.res_col] > 0.0

    @cached_property
    def residential_indices(self):
        return np.flatnonzero(self.residential_mask)

    @cached_property
    def residential_ids(self):
        return [self.building_ids[i] for i in self.residential_indices]

    @cached_property
    def footprint_share(self):
        """Each building's footprint share within its block (for spreading
        block-level floor-area deltas)."""
        n = len(self.building_ids)
        share = np.zeros(n)
        block_fp = np.zeros(len(self.block_ids))
        np.add.at(block_fp, self.building_block, self.footprints)
        for i in range(n):
            total = block_fp[self.building_block[i]]
            share[i] = self.footprints[i] / total if total > 0 else 0.0
        return share

    def block_area_matrix(self):
        """Block × function-type floor areas (the recommender's v matrix)."""
        out = np.zeros((len(self.block_ids), len(self.function_types)))
        np.add.at(out, self.building_block, self.areas)
        return out
