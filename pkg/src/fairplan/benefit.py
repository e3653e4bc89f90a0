"""Resident utility, benefit, and group benefit statistics.

Utility at a residence is the preference-weighted sum of accessibility;
benefit is utility minus the resident's prior utility and may be negative
(the allocator zeroes the move-in probability in that case). Optional
equity weights scale each resident's benefits by their type's weight
before anything downstream sees them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .geo import AccessibilityMatrix
from .model import CityDesign, PlanningConfig


@dataclass(frozen=True)
class ResidentType:
    id: str
    name: str
    mean_preferences: Mapping[str, float]


@dataclass(frozen=True)
class ResidentProfile:
    id: str
    type_id: str
    preferences: Mapping[str, float]  # over non-residential types, sums to 1
    prior_utility: float


@dataclass(frozen=True)
class Population:
    types: tuple = ()
    residents: tuple = ()

    @property
    def type_ids(self):
        return [t.id for t in self.types]

    def type_by_id(self, type_id: str) -> ResidentType:
        for t in self.types:
            if t.id == type_id:
                return t
        raise KeyError(type_id)

    def counts_by_type(self) -> dict:
        counts: dict[str, int] = {}
        for r in self.residents:
            counts[r.type_id] = counts.get(r.type_id, 0) + 1
        return counts


def validate_population(population: Population, tol: float = 1e-9):
    """Returns violation strings; empty when profiles are well-formed."""
    problems = []
    known = set(population.type_ids)
    for r in population.residents:
        total = sum(r.preferences.values())
        if abs(total - 1.0) > tol:
            problems.append(f"resident '{r.id}': preference vector sums to {total:.6g}, expected 1")
        if any(v < 0 for v in r.preferences.values()):
            problems.append(f"resident '{r.id}': negative preference weight")
        if not math.isfinite(r.prior_utility):
            problems.append(f"resident '{r.id}': non-finite prior utility")
        if known and r.type_id not in known:
            problems.append(f"resident '{r.id}': unknown type '{r.type_id}'")
    return problems


def utility(profile: ResidentProfile, access_row: Mapping[str, float]) -> float:
    """Preference-weighted accessibility for one resident at one residence."""
    return float(sum(w * access_row.get(f, 0.0) for f, w in profile.preferences.items()))


def benefit(profile: ResidentProfile, utility_score: float) -> float:
    """Change in utility relative to the resident's prior residence."""
    return float(utility_score - profile.prior_utility)


@dataclass(frozen=True)
class BenefitMatrix:
    resident_ids: tuple
    building_ids: tuple  # residential buildings
    values: np.ndarray  # (n_residents, n_res_buildings)

    def get(self, resident_id: str, building_id: str) -> float:
        return float(self.values[self.resident_ids.index(resident_id), self.building_ids.index(building_id)])


def preference_matrix(population: Population, function_types: Sequence[str]) -> np.ndarray:
    out = np.zeros((len(population.residents), len(function_types)))
    idx = {f: k for k, f in enumerate(function_types)}
    for i, r in enumerate(population.residents):
        for f, w in r.preferences.items():
            if f in idx:
                out[i, idx[f]] = float(w)
    return out


def equity_vector(population: Population, config: PlanningConfig) -> np.ndarray:
    return np.array([config.equity_of(r.type_id) for r in population.residents])


def benefit_matrix(
    design: CityDesign,
    population: Population,
    access: AccessibilityMatrix,
    config: PlanningConfig | None = None,
) -> BenefitMatrix:
    """Full resident × residential-building benefit table, equity-weighted."""
    config = config or PlanningConfig()
    prefs = preference_matrix(population, access.function_types)
    utilities = prefs @ access.values.T  # (n_residents, n_res_buildings)
    priors = np.array([r.prior_utility for r in population.residents])
    values = utilities - priors[:, None]
    values *= equity_vector(population, config)[:, None]
    return BenefitMatrix(
        resident_ids=tuple(r.id for r in population.residents),
        building_ids=access.residential_ids,
        values=values,
    )


@dataclass(frozen=True)
class GroupStat:
    count: int
    mean: float
    sd: float


@dataclass(frozen=True)
class GroupStats:
    """Per-type benefit mean/spread plus the global mean.

    Empty groups are simply absent from per_group; aggregation identity
    n * global_mean == sum(n_g * mean_g) holds over the present ones.
    """

    per_group: Mapping[str, GroupStat]
    total_count: int
    global_mean: float

    def to_dict(self):
        return {
            "per_group": {
                g: {"count": s.count, "mean": s.mean, "sd": s.sd} for g, s in sorted(self.per_group.items())
            },
            "total_count": self.total_count,
            "global_mean": self.global_mean,
        }


def group_stats(benefits, population: Population) -> GroupStats:
    """Group statistics for realized benefits.

    `benefits` maps resident id -> benefit (only allocated residents).
    Standard deviation is the population sd (divide by n_g).
    """
    by_type: dict[str, list[float]] = {}
    resident_type = {r.id: r.type_id for r in population.residents}
    for rid, b in benefits.items():
        by_type.setdefault(resident_type[rid], []).append(float(b))
    per_group = {}
    total = 0
    acc = 0.0
    for g in sorted(by_type):
        vals = np.asarray(by_type[g])
        per_group[g] = GroupStat(count=len(vals), mean=float(vals.mean()), sd=float(vals.std()))
        total += len(vals)
        acc += float(vals.sum())
    return GroupStats(
        per_group=per_group,
        total_count=total,
        global_mean=acc / total if total else 0.0,
    )
