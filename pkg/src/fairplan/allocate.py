"""Resident allocation: calibrated move-in marginals, IPF, and assignment.

The move-in probability of resident i is max(tanh(gamma * mean_benefit_i), 0)
with gamma > 0 calibrated so the probabilities sum to the city's total
residential capacity. Joint resident × building probabilities come from
iterative proportional fitting against those marginals, and the final
assignment samples residents in a seeded random order until capacities
are exhausted. The whole pipeline is a pure function of (inputs, seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from . import _kernels
from .benefit import BenefitMatrix, GroupStats, Population, benefit_matrix, group_stats
from .errors import CalibrationError, ConvergenceError
from .geo import accessibility, compute_distances
from .inequality import InequalityReport, decompose
from .model import CityDesign, DesignArrays, PlanningConfig

IPF_TOL = 1e-8
IPF_MAX_ITER = 10_000
CALIBRATION_TOL = 1e-9
MARGINAL_TOL = 1e-6


@dataclass(frozen=True)
class AllocationResult:
    assignments: Mapping[str, Optional[str]]  # resident id -> building id or None
    resident_ids: tuple
    building_ids: tuple  # residential buildings, matrix column order
    probability_matrix: np.ndarray
    gamma: float
    iterations: int
    seed: int

    def occupancy(self) -> dict:
        counts = {bid: 0 for bid in self.building_ids}
        for bid in self.assignments.values():
            if bid is not None:
                counts[bid] += 1
        return counts

    def to_dict(self):
        return {
            "assignments": {rid: self.assignments[rid] for rid in sorted(self.assignments)},
            "gamma": self.gamma,
            "iterations": self.iterations,
            "seed": self.seed,
            "building_ids": list(self.building_ids),
            "resident_ids": list(self.resident_ids),
            "probability_matrix": [[float(v) for v in row] for row in self.probability_matrix],
        }


def move_in_marginals(mean_benefits, total_capacity: float):
    """Calibrate gamma so sum_i max(tanh(gamma*b̄_i), 0) == total_capacity.

    Residents with non-positive mean benefit get probability 0. Because each
    tanh stays below 1, the calibration is infeasible when the capacity
    reaches the count of positive-benefit residents.
    """
    b = np.asarray(mean_benefits, dtype=float)
    if total_capacity == 0:
        return np.zeros(b.size), 0.0
    if total_capacity < 0:
        raise CalibrationError("total capacity must be non-negative")
    positive = b[b > 0]
    if positive.size == 0:
        raise CalibrationError(
            "no resident has positive mean benefit but capacity is "
            f"{total_capacity:g}: nothing can move in"
        )
    if total_capacity >= positive.size:
        raise CalibrationError(
            f"target capacity {total_capacity:g} is unreachable: each probability "
            f"stays below 1 and only {positive.size} residents have positive benefit",
            details={"capacity": float(total_capacity), "positive_residents": int(positive.size)},
        )

    def total(gamma: float) -> float:
        return float(np.tanh(gamma * positive).sum())

    hi = 1.0 / float(positive.max())
    while total(hi) < total_capacity:
        hi *= 2.0
        if hi > 1e300:  # unreachable given the feasibility check above
            raise CalibrationError("gamma search diverged")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        s = total(mid)
        if abs(s - total_capacity) <= CALIBRATION_TOL:
            lo = hi = mid
            break
        if s < total_capacity:
            lo = mid
        else:
            hi = mid
    gamma = 0.5 * (lo + hi)
    p = np.maximum(np.tanh(gamma * b), 0.0)
    return p, float(gamma)


def ipf(row_marginals, col_marginals, seed_matrix, tol: float = IPF_TOL, max_iter: int = IPF_MAX_ITER):
    """Fit a matrix to row/column marginals by alternating proportional
    scaling (rows first). Structural zeros in the seed stay zero.

    Returns (matrix, iterations). Raises ConvergenceError with the residual
    if the cell-change criterion is not met within max_iter iterations.
    """
    rows = np.asarray(row_marginals, dtype=float)
    cols = np.asarray(col_marginals, dtype=float)
    mat = np.array(seed_matrix, dtype=float, copy=True)
    if mat.shape != (rows.size, cols.size):
        raise ValueError("seed matrix shape does not match marginals")
    if abs(rows.sum() - cols.sum()) > MARGINAL_TOL:
        raise ValueError(
            f"marginal totals differ: rows {rows.sum():.9g} vs cols {cols.sum():.9g}"
        )
    row_support = mat.sum(axis=1)
    if np.any((rows > 0) & (row_support <= 0)):
        raise ValueError("seed matrix has a zero row for a positive row marginal")
    col_support = mat.sum(axis=0)
    if np.any((cols > 0) & (col_support <= 0)):
        raise ValueError("seed matrix has a zero column for a positive column marginal")
    if mat.size == 0:
        return mat, 0
    iterations, change = _kernels.ipf_fit(mat, rows, cols, tol, max_iter)
    if change >= tol:
        raise ConvergenceError(
            f"IPF did not converge in {max_iter} iterations (last change {change:.3g})",
            details={"residual": float(change), "iterations": int(iterations)},
        )
    return mat, int(iterations)


def assign(probability_matrix, capacities, seed: int, resident_ids, building_ids, gamma: float = 0.0,
           iterations: int = 0) -> AllocationResult:
    """Sample an assignment: residents visited in seeded random order, each
    drawn into a remaining-capacity building proportionally to its row.

    Deterministic given the seed. Residents whose row over remaining
    buildings is all zero stay unallocated.
    """
    probs = np.ascontiguousarray(probability_matrix, dtype=float)
    caps = np.array(capacities, dtype=np.int64, copy=True)
    rng = np.random.default_rng(seed)
    order = rng.permutation(probs.shape[0]).astype(np.int64)
    draws = rng.random(probs.shape[0])
    chosen = _kernels.assign_sequential(probs, caps, order, draws)
    assignments = {
        rid: (building_ids[c] if c >= 0 else None) for rid, c in zip(resident_ids, chosen)
    }
    return AllocationResult(
        assignments=assignments,
        resident_ids=tuple(resident_ids),
        building_ids=tuple(building_ids),
        probability_matrix=probs,
        gamma=gamma,
        iterations=iterations,
        seed=seed,
    )


@dataclass(frozen=True)
class SimulationResult:
    allocation: Optional[AllocationResult]
    realized_benefits: Mapping[str, float]  # allocated residents only
    inequality: Optional[InequalityReport]
    stats: Optional[GroupStats]
    benefit_table: Optional[BenefitMatrix]
    seed: int

    def to_dict(self, include_matrix: bool = False):
        out = {
            "seed": self.seed,
            "allocated": len(self.realized_benefits),
            "assignments": (
                {rid: self.allocation.assignments[rid] for rid in sorted(self.allocation.assignments)}
                if self.allocation
                else {}
            ),
            "realized_benefits": {k: float(v) for k, v in sorted(self.realized_benefits.items())},
            "inequality": self.inequality.to_dict() if self.inequality else None,
            "group_stats": self.stats.to_dict() if self.stats else None,
            "gamma": self.allocation.gamma if self.allocation else 0.0,
            "ipf_iterations": self.allocation.iterations if self.allocation else 0,
        }
        if include_matrix and self.allocation is not None:
            out["probability_matrix"] = [[float(v) for v in row] for row in self.allocation.probability_matrix]
        return out


def uniform_seed_matrix(row_marginals, col_marginals) -> np.ndarray:
    """All-ones over (positive row, positive column) pairs, zero elsewhere:
    the canonical minimum-information IPF seed."""
    rows = np.asarray(row_marginals, dtype=float) > 0
    cols = np.asarray(col_marginals, dtype=float) > 0
    return np.outer(rows.astype(float), cols.astype(float))


def simulate(design: CityDesign, population: Population, config: PlanningConfig | None = None,
             seed: int = 0) -> SimulationResult:
    """Full What-If pipeline: distances → accessibility → benefits →
    calibrated marginals → IPF → assignment → realized-benefit statistics.

    Empty designs (or zero capacity) yield an empty allocation with the
    inequality report absent rather than NaN.
    """
    config = config or PlanningConfig()
    arrays = DesignArrays(design, config)
    res_idx = arrays.residential_indices
    caps = np.array(
        [design.buildings[i].occupancy_capacity(config.area_per_resident) for i in res_idx],
        dtype=np.int64,
    )
    if len(population.residents) == 0 or res_idx.size == 0 or caps.sum() == 0:
        return SimulationResult(
            allocation=None,
            realized_benefits={},
            inequality=None,
            stats=None,
            benefit_table=None,
            seed=seed,
        )

    distances = compute_distances(design, config)
    access = accessibility(design, distances, config)
    benefits = benefit_matrix(design, population, access, config)

    mean_b = benefits.values.mean(axis=1)
    p, gamma = move_in_marginals(mean_b, float(caps.sum()))
    seed_matrix = uniform_seed_matrix(p, caps)
    matrix, iters = ipf(p, caps.astype(float), seed_matrix)
    allocation = assign(
        matrix,
        caps,
        seed,
        resident_ids=benefits.resident_ids,
        building_ids=benefits.building_ids,
        gamma=gamma,
        iterations=iters,
    )

    col_of = {bid: j for j, bid in enumerate(benefits.building_ids)}
    realized = {}
    labels = []
    type_of = {r.id: r.type_id for r in population.residents}
    for i, rid in enumerate(benefits.resident_ids):
        bid = allocation.assignments[rid]
        if bid is not None:
            realized[rid] = float(benefits.values[i, col_of[bid]])
            labels.append(type_of[rid])

    if realized:
        stats = group_stats(realized, population)
        report = decompose(list(realized.values()), labels, config.alpha)
    else:
        stats = None
        report = None
    return SimulationResult(
        allocation=allocation,
        realized_benefits=realized,
        inequality=report,
        stats=stats,
        benefit_table=benefits,
        seed=seed,
    )
