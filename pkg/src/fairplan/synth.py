"""Synthetic population generation and resident-type clustering.

Resident types come from k-means over L1-normalized visit-frequency
vectors (k-means++ seeding, Lloyd iterations, deterministic given seed).
Synthetic residents are drawn around per-type preference templates with a
Dirichlet perturbation, plus a configurable prior-utility distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .benefit import Population, ResidentProfile, ResidentType
from .model import RESIDENTIAL


@dataclass(frozen=True)
class VisitProfile:
    resident_id: str
    visit_frequency: Mapping[str, float]  # function type -> count


@dataclass
class KMeansTrace:
    inertia: list = field(default_factory=list)  # within-cluster sum of squares per iteration


def _normalize_rows(mat: np.ndarray) -> np.ndarray:
    sums = mat.sum(axis=1, keepdims=True)
    if np.any(sums <= 0):
        raise ValueError("every visit profile needs at least one positive count")
    return mat / sums


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: spread initial centroids by squared-distance weighting."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    first = rng.integers(n)
    centers[0] = points[first]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[j] = points[rng.integers(n)]
            continue
        probs = d2 / total
        choice = rng.choice(n, p=probs)
        centers[j] = points[choice]
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))
    return centers


def kmeans(points: np.ndarray, k: int, seed: int, max_iter: int = 300):
    """Lloyd's algorithm with k-means++ seeding.

    Returns (centroids, assignment, trace). The trace records the
    within-cluster sum of squares after every assignment step; it is
    non-increasing.
    """
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(points, k, rng)
    trace = KMeansTrace()
    assignment = np.zeros(points.shape[0], dtype=np.int64)
    for _ in range(max_iter):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assignment = d2.argmin(axis=1)
        trace.inertia.append(float(d2[np.arange(points.shape[0]), new_assignment].sum()))
        for j in range(k):
            member = new_assignment == j
            if member.any():
                centers[j] = points[member].mean(axis=0)
            else:
                # re-seed an empty cluster at the point farthest from its centroid
                far = d2.min(axis=1).argmax()
                centers[j] = points[far]
        if np.array_equal(new_assignment, assignment) and len(trace.inertia) > 1:
            assignment = new_assignment
            break
        assignment = new_assignment
    return centers, assignment, trace


def cluster_types(profiles: Sequence[VisitProfile], k: int, seed: int,
                  function_types: Optional[Sequence[str]] = None):
    """Cluster visit profiles into k resident types.

    Frequencies are L1-normalized over non-residential function types
    before clustering; centroids are renormalized into mean preference
    vectors. Per-resident preferences are each resident's own normalized
    frequencies. Returns (types, assignment map, trace).
    """
    if not profiles:
        raise ValueError("no visit profiles given")
    if function_types is None:
        keys = set()
        for p in profiles:
            keys.update(p.visit_frequency)
        function_types = sorted(keys - {RESIDENTIAL})
    else:
        function_types = [f for f in function_types if f != RESIDENTIAL]
    mat = np.zeros((len(profiles), len(function_types)))
    for i, p in enumerate(profiles):
        for j, f in enumerate(function_types):
            mat[i, j] = float(p.visit_frequency.get(f, 0.0))
    normalized = _normalize_rows(mat)
    distinct = len({tuple(row) for row in np.round(normalized, 12)})
    if k < 1 or k > distinct:
        raise ValueError(f"k={k} infeasible: {distinct} distinct normalized profiles")

    centers, assignment, trace = kmeans(normalized, k, seed)
    centers = np.maximum(centers, 0.0)
    centers = centers / centers.sum(axis=1, keepdims=True)
    types = [
        ResidentType(
            id=f"type-{j}",
            name=f"Type {j}",
            mean_preferences={f: float(centers[j, fi]) for fi, f in enumerate(function_types)},
        )
        for j in range(k)
    ]
    mapping = {p.resident_id: f"type-{assignment[i]}" for i, p in enumerate(profiles)}
    return types, mapping, trace


def synth_visit_profiles(templates: Mapping[str, Mapping[str, float]], counts: Mapping[str, int],
                         visits_per_resident: int, seed: int) -> list:
    """Synthetic check-in style visit counts: one multinomial draw per
    resident around the type's template frequencies."""
    rng = np.random.default_rng(seed)
    out = []
    for tname in sorted(templates):
        probs_map = templates[tname]
        fts = sorted(probs_map)
        probs = np.array([probs_map[f] for f in fts], dtype=float)
        probs = probs / probs.sum()
        for i in range(counts.get(tname, 0)):
            draw = rng.multinomial(visits_per_resident, probs)
            out.append(
                VisitProfile(
                    resident_id=f"{tname}-{i:04d}",
                    visit_frequency={f: int(c) for f, c in zip(fts, draw)},
                )
            )
    return out


@dataclass(frozen=True)
class PopulationSpec:
    """Generation recipe: per-type counts and preference templates, a
    Dirichlet concentration for within-type spread, and the prior-utility
    distribution."""

    types: tuple  # of dicts: {id, name, preferences, count, prior_utility?}
    dirichlet_concentration: Optional[float] = 50.0  # None -> exact templates
    prior_utility: Mapping = None  # {"distribution": "normal"|"uniform"|"constant", ...}

    @classmethod
    def from_dict(cls, d: Mapping) -> "PopulationSpec":
        return cls(
            types=tuple(d["types"]),
            dirichlet_concentration=d.get("dirichlet_concentration", 50.0),
            prior_utility=d.get("prior_utility", {"distribution": "constant", "value": 0.0}),
        )


def _draw_prior(spec_prior: Mapping, rng: np.random.Generator) -> float:
    dist = spec_prior.get("distribution", "constant")
    if dist == "constant":
        return float(spec_prior.get("value", 0.0))
    if dist == "normal":
        return float(rng.normal(spec_prior["mean"], spec_prior["sd"]))
    if dist == "uniform":
        return float(rng.uniform(spec_prior["low"], spec_prior["high"]))
    raise ValueError(f"unknown prior utility distribution {dist!r}")


def generate_population(spec: PopulationSpec, seed: int) -> Population:
    """Deterministic synthetic population from a generation spec.

    Preferences are Dirichlet(concentration * template) draws restricted to
    the template's positive support; zero template entries stay exactly
    zero. With concentration None every resident gets the template itself.
    """
    rng = np.random.default_rng(seed)
    types = []
    residents = []
    for t in spec.types:
        prefs = {k: float(v) for k, v in t["preferences"].items() if k != RESIDENTIAL}
        total = sum(prefs.values())
        if total <= 0:
            raise ValueError(f"type '{t['id']}' has no positive preference mass")
        prefs = {k: v / total for k, v in prefs.items()}
        types.append(ResidentType(id=t["id"], name=t.get("name", t["id"]), mean_preferences=prefs))
        support = sorted(k for k, v in prefs.items() if v > 0)
        template = np.array([prefs[k] for k in support])
        prior_spec = t.get("prior_utility", spec.prior_utility)
        for i in range(int(t["count"])):
            if spec.dirichlet_concentration is None:
                drawn = template
            else:
                drawn = rng.dirichlet(spec.dirichlet_concentration * template)
            pref_map = {k: 0.0 for k in prefs}
            for k, v in zip(support, drawn):
                pref_map[k] = float(v)
            residents.append(
                ResidentProfile(
                    id=f"{t['id']}-{i:04d}",
                    type_id=t["id"],
                    preferences=pref_map,
                    prior_utility=_draw_prior(prior_spec, rng),
                )
            )
    return Population(types=tuple(types), residents=tuple(residents))
