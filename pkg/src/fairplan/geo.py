"""Distances and gravity-model accessibility.

Accessibility of function type f at residence l sums, over every building
within the cutoff radius, its type-f floor area divided by the planning
priority weight and discounted by exp(-impedance * distance). Straight-line
centroid distances only; no routing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .model import CityDesign, DesignArrays, PlanningConfig


@dataclass(frozen=True)
class DistanceMatrix:
    """Residential-building × building centroid distances (meters)."""

    residential_ids: tuple
    building_ids: tuple
    values: np.ndarray  # (n_res, n_all)

    def get(self, res_id: str, bld_id: str) -> float:
        return float(self.values[self.residential_ids.index(res_id), self.building_ids.index(bld_id)])


@dataclass(frozen=True)
class AccessibilityMatrix:
    """Residential-building × non-residential-type accessibility scores."""

    residential_ids: tuple
    function_types: tuple  # non-residential only
    values: np.ndarray  # (n_res, n_types)

    def row(self, res_id: str) -> Mapping[str, float]:
        i = self.residential_ids.index(res_id)
        return {f: float(self.values[i, k]) for k, f in enumerate(self.function_types)}


def compute_distances(design: CityDesign, config: PlanningConfig | None = None) -> DistanceMatrix:
    """Euclidean centroid distances from every residential building to every
    building. Degenerate footprints raise naming the building."""
    config = config or PlanningConfig()
    arrays = DesignArrays(design, config)
    return distances_from_arrays(arrays)


def distances_from_arrays(arrays: DesignArrays) -> DistanceMatrix:
    res_idx = arrays.residential_indices
    values = _kernels.pairwise_distances(arrays.centroids[res_idx], arrays.centroids)
    return DistanceMatrix(
        residential_ids=tuple(arrays.residential_ids),
        building_ids=tuple(arrays.building_ids),
        values=values,
    )


def decay_weight_stack(arrays: DesignArrays, distances: DistanceMatrix) -> np.ndarray:
    """Per-type decay kernels W[f, l, ℓ] = exp(-κ_f d) / ρ_f within the cutoff.

    Accessibility is then the linear map a[:, f] = W[f] @ areas[:, f], which
    the recommender re-evaluates many times with edited areas.
    """
    config = arrays.config
    nonres = config.non_residential
    kappas = np.array([config.impedance_of(f) for f in nonres])
    stack = _kernels.decay_weights(distances.values, kappas, config.accessibility_cutoff_radius)
    for k, f in enumerate(nonres):
        stack[k] /= config.priority_of(f)
    return stack


def accessibility(
    design: CityDesign,
    distances: DistanceMatrix,
    config: PlanningConfig | None = None,
) -> AccessibilityMatrix:
    """Gravity-model accessibility for each residential building and each
    non-residential function type. Residential floor area contributes no
    accessibility term of its own."""
    config = config or PlanningConfig()
    arrays = DesignArrays(design, config)
    values = accessibility_from_arrays(arrays, distances.values)
    return AccessibilityMatrix(
        residential_ids=tuple(arrays.residential_ids),
        function_types=tuple(config.non_residential),
        values=values,
    )


def accessibility_from_arrays(
    arrays: DesignArrays,
    dist_values: np.ndarray,
    areas: np.ndarray | None = None,
    weight_stack: np.ndarray | None = None,
) -> np.ndarray:
    """Array-level accessibility; `areas` overrides the design's floor areas
    (same building order) so edited designs can be scored without rebuilding."""
    config = arrays.config
    if areas is None:
        areas = arrays.areas
    if weight_stack is None:
        distances = DistanceMatrix(
            residential_ids=tuple(arrays.residential_ids),
            building_ids=tuple(arrays.building_ids),
            values=dist_values,
        )
        weight_stack = decay_weight_stack(arrays, distances)
    nonres = config.non_residential
    out = np.zeros((dist_values.shape[0], len(nonres)))
    for k, f in enumerate(nonres):
        out[:, k] = weight_stack[k] @ areas[:, arrays.ft_index[f]]
    return out
