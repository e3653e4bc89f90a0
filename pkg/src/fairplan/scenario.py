"""Bundled synthetic scenario: a six-block mini neighborhood.

A compact residential district sits in the west; parks, a commercial
core, offices, schools and a deliberately scarce pair of cultural venues
spread to the east. Six resident types with distinct preference profiles
make the benefit distribution visibly unequal: culture-oriented residents
have little to reach, outdoor-oriented residents sit next to a large
park. Everything is deterministic given the scenario seed.

Prior utilities are anchored to the design itself: each type's prior is
drawn around its baseline template utility minus a per-type target
benefit, so the scenario stays calibrated if the geometry is adjusted.
"""

from __future__ import annotations

import numpy as np

from .benefit import Population
from .geo import accessibility, compute_distances
from .model import Building, CityDesign, PlanningConfig
from .store import round_floats
from .synth import PopulationSpec, generate_population

SCENARIO_NAME = "bundled-bronx-mini"
SCENARIO_SEED = 7


def _rect(x, y, w, h):
    return ((x, y), (x + w, y), (x + w, y + h), (x, y + h))


# Preference templates for the six resident types (non-residential types).
TYPE_TEMPLATES = {
    "outdoor": {
        "name": "Outdoor Recreationalists",
        "preferences": {"Park": 0.70, "Commercial": 0.10, "Cultural": 0.03, "Office": 0.02, "Educational": 0.15},
        "target_benefit": 120.0,
    },
    "general": {
        "name": "General Consumers",
        "preferences": {"Commercial": 0.35, "Park": 0.15, "Cultural": 0.20, "Office": 0.15, "Educational": 0.15},
        "target_benefit": 60.0,
    },
    "culture": {
        "name": "Culture Consumers",
        "preferences": {"Cultural": 0.70, "Commercial": 0.10, "Park": 0.10, "Office": 0.0, "Educational": 0.10},
        "target_benefit": 25.0,
    },
    "commercial": {
        "name": "Commercial Consumers",
        "preferences": {"Commercial": 0.65, "Park": 0.10, "Cultural": 0.05, "Office": 0.10, "Educational": 0.10},
        "target_benefit": 90.0,
    },
    "office": {
        "name": "Office Workers",
        "preferences": {"Office": 0.70, "Commercial": 0.15, "Park": 0.05, "Cultural": 0.05, "Educational": 0.05},
        "target_benefit": 45.0,
    },
    "educators": {
        "name": "Educators & Students",
        "preferences": {"Educational": 0.60, "Cultural": 0.15, "Park": 0.15, "Commercial": 0.10, "Office": 0.0},
        "target_benefit": 70.0,
    },
}

RESIDENTS_PER_TYPE = 100
PRIOR_SD = 8.0
DIRICHLET_CONCENTRATION = 60.0


def build_city() -> CityDesign:
    """The fixed mini-city layout: 6 blocks, ~40 buildings."""
    buildings = []

    def add(bid, block, x, y, w, h, floors, areas):
        buildings.append(
            Building(
                id=bid,
                block_id=block,
                footprint=_rect(float(x), float(y), float(w), float(h)),
                floors=floors,
                floor_areas={k: float(v) for k, v in areas.items()},
            )
        )

    # West residential district: two blocks of eight homes each (capacity
    # 30 persons per building at 30 m²/person). A few are mixed-use.
    for i in range(8):
        col, row = i % 2, i // 2
        x = 30 + col * 140
        y = 430 + row * 70
        areas = {"Residential": 900.0}
        if i == 1:
            areas["Commercial"] = 400.0
        if i == 6:
            areas["Office"] = 300.0
        add(f"res-a{i + 1}", "blk-res-north", x, y, 30, 30, 5, areas)
    for i in range(8):
        col, row = i % 2, i // 2
        x = 30 + col * 140
        y = 30 + row * 70
        areas = {"Residential": 900.0}
        if i == 3:
            areas["Commercial"] = 400.0
        if i == 4:
            areas["Cultural"] = 200.0
        add(f"res-b{i + 1}", "blk-res-south", x, y, 30, 30, 5, areas)

    # North-central park block.
    add("park-1", "blk-park", 440, 480, 150, 150, 1, {"Park": 20000.0})
    add("park-2", "blk-park", 640, 430, 80, 80, 1, {"Park": 6000.0})
    add("park-3", "blk-park", 440, 660, 60, 40, 1, {"Park": 2000.0})

    # South-central commercial core with a school.
    add("com-1", "blk-core", 430, 40, 60, 50, 3, {"Commercial": 9000.0})
    add("com-2", "blk-core", 520, 40, 50, 40, 3, {"Commercial": 6000.0})
    add("com-3", "blk-core", 600, 60, 40, 40, 2, {"Commercial": 3000.0})
    add("edu-1", "blk-core", 450, 150, 60, 40, 3, {"Educational": 7000.0})
    add("mix-1", "blk-core", 560, 150, 50, 40, 2, {"Commercial": 2000.0, "Office": 1800.0})
    add("com-4", "blk-core", 640, 200, 40, 30, 2, {"Commercial": 2200.0})

    # North-east office block with one small cultural venue.
    add("off-1", "blk-office", 830, 470, 50, 50, 4, {"Office": 10000.0})
    add("off-2", "blk-office", 910, 470, 50, 40, 3, {"Office": 6000.0})
    add("off-3", "blk-office", 830, 580, 40, 40, 3, {"Office": 4500.0})
    add("cult-1", "blk-office", 930, 590, 40, 30, 2, {"Cultural": 1500.0})
    add("mix-2", "blk-office", 1000, 500, 40, 40, 2, {"Office": 1600.0, "Commercial": 1400.0})

    # South-east block: school, offices, shops, the other cultural venue.
    add("edu-2", "blk-mixed", 840, 40, 50, 40, 2, {"Educational": 4000.0})
    add("edu-3", "blk-mixed", 920, 40, 40, 30, 2, {"Educational": 2200.0})
    add("cult-2", "blk-mixed", 990, 60, 30, 30, 2, {"Cultural": 1200.0})
    add("off-4", "blk-mixed", 840, 150, 40, 40, 3, {"Office": 4000.0})
    add("com-5", "blk-mixed", 920, 150, 50, 40, 3, {"Commercial": 5000.0})
    add("mix-3", "blk-mixed", 1000, 200, 40, 30, 2, {"Commercial": 1200.0, "Office": 1000.0})

    return CityDesign.from_buildings(buildings, crs_note="synthetic local grid (meters)")


def build_config() -> PlanningConfig:
    # Priority weights reflect how much floor area each amenity needs per
    # unit of usefulness: parks are space-hungry, cultural venues are not.
    return PlanningConfig(
        priority_weight={
            "Park": 120.0,
            "Commercial": 60.0,
            "Office": 80.0,
            "Educational": 50.0,
            "Cultural": 25.0,
        },
    )


def build_population(design: CityDesign | None = None, config: PlanningConfig | None = None,
                     seed: int = SCENARIO_SEED) -> Population:
    design = design or build_city()
    config = config or build_config()
    distances = compute_distances(design, config)
    access = accessibility(design, distances, config)
    mean_access = access.values.mean(axis=0)  # per non-residential type

    type_specs = []
    for tid in sorted(TYPE_TEMPLATES):
        t = TYPE_TEMPLATES[tid]
        prefs = np.array([t["preferences"].get(f, 0.0) for f in access.function_types])
        baseline_utility = float(prefs @ mean_access)
        type_specs.append(
            {
                "id": tid,
                "name": t["name"],
                "preferences": dict(t["preferences"]),
                "count": RESIDENTS_PER_TYPE,
                "prior_utility": {
                    "distribution": "normal",
                    "mean": baseline_utility - t["target_benefit"],
                    "sd": PRIOR_SD,
                },
            }
        )
    spec = PopulationSpec(
        types=tuple(type_specs),
        dirichlet_concentration=DIRICHLET_CONCENTRATION,
        prior_utility={"distribution": "constant", "value": 0.0},
    )
    return generate_population(spec, seed)


def default_constraints_dict() -> dict:
    """One recommendation round at a 10% construction budget."""
    return {
        "budget_fraction": 0.10,
        "residential_change_fraction": 0.10,
        "max_height_increase": 2.0,
        "tau": 1.0,
        "lambda": 1e3,
        "group_directions": {},
    }


def casestudy_constraints_dict() -> dict:
    """Direction-constrained variant: cap the advantaged group, protect
    the disadvantaged ones."""
    return {
        "budget_fraction": 0.10,
        "residential_change_fraction": 0.10,
        "max_height_increase": 2.0,
        "tau": 1.0,
        "lambda": 1e3,
        "group_directions": {
            "outdoor": "decrease",
            "general": "increase",
            "culture": "increase",
            "office": "increase",
        },
    }


def load_scenario(name: str = SCENARIO_NAME, seed: int = SCENARIO_SEED):
    """(design, population, config) for a named bundled scenario."""
    if name != SCENARIO_NAME:
        raise KeyError(f"unknown scenario '{name}' (available: {SCENARIO_NAME})")
    design = _canonical_design(build_city())
    config = build_config()
    population = build_population(design, config, seed)
    return design, population, config


def _canonical_design(design: CityDesign) -> CityDesign:
    """Stamp floats to the store's 9-significant-digit precision so
    save/load round-trips are exact."""
    buildings = tuple(
        Building(
            id=b.id,
            block_id=b.block_id,
            footprint=tuple((round_floats(x), round_floats(y)) for x, y in b.footprint),
            floors=b.floors,
            floor_areas={k: round_floats(v) for k, v in b.floor_areas.items()},
        )
        for b in design.buildings
    )
    return CityDesign(
        buildings=buildings,
        block_ids=design.block_ids,
        crs_note=design.crs_note,
        revision=design.revision,
    )
