"""Floor-area edit recommendation: Frank-Wolfe over the constraint polytope.

The search variable is a block × function-type matrix of floor-area deltas.
Feasibility means: no negative final areas, block mean-height increase
capped, total |delta| within the construction budget, and net residential
change within its own cap.

The optimized objective is a deterministic soft surrogate of the
stochastic allocation pipeline: block deltas are spread over member
buildings by footprint share, benefits recomputed, and each resident's
expected benefit taken under the IPF joint probabilities (whose uniform
seed makes the conditional location distribution proportional to
capacity). The index of those expected benefits plus a hinge penalty on
constrained group-mean movements is minimized; a full stochastic
simulation afterwards verifies the plan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.optimize import linprog

from . import _kernels
from .allocate import simulate
from .benefit import Population, equity_vector, preference_matrix
from .errors import DomainError, EditError, SolverError
from .inequality import ge_index
from .model import (
    RESIDENTIAL,
    Building,
    CityDesign,
    DesignArrays,
    PlanningConfig,
    validate_design,
)

INCREASE = "increase"
DECREASE = "decrease"
FIXED = "fixed"
FREE = "free"
_DIRECTIONS = (INCREASE, DECREASE, FIXED, FREE)

FEASIBILITY_TOL = 1e-6
PRUNE_AREA = 1.0  # m²; smaller deltas are dropped from plans
FD_STEP = 1.0  # m²; forward-difference step for the gradient
MAX_ITER = 200


@dataclass(frozen=True)
class RecommendConstraints:
    """Search-space bounds plus per-group benefit direction preferences."""

    budget: float  # total |delta| m²
    max_height_increase: float = 2.0  # floors
    residential_change_cap: float = 0.0  # m², net residential change
    group_directions: Mapping[str, str] = field(default_factory=dict)
    tau: float = 1.0  # benefit slack before a direction penalty kicks in
    penalty_weight: float = 1e3  # lambda, >> 1

    def __post_init__(self):
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.penalty_weight < 1:
            raise ValueError("penalty weight must be >= 1")
        for g, d in self.group_directions.items():
            if d not in _DIRECTIONS:
                raise ValueError(f"group '{g}': unknown direction {d!r}")

    def direction_of(self, type_id: str) -> str:
        return self.group_directions.get(type_id, FREE)


def resolve_constraints(d: Mapping, design: CityDesign) -> RecommendConstraints:
    """Build constraints from a JSON-ish mapping; fractional budgets are
    resolved against the design's current floor-area totals."""
    totals = design.total_floor_area_by_type()
    total_area = sum(totals.values())
    res_area = totals.get(RESIDENTIAL, 0.0)
    if "budget" in d:
        budget = float(d["budget"])
    elif "budget_fraction" in d:
        budget = float(d["budget_fraction"]) * total_area
    else:
        budget = 0.1 * total_area
    if "residential_change_cap" in d:
        res_cap = float(d["residential_change_cap"])
    elif "residential_change_fraction" in d:
        res_cap = float(d["residential_change_fraction"]) * res_area
    else:
        res_cap = 0.1 * res_area
    directions = {k: str(v).lower() for k, v in d.get("group_directions", {}).items()}
    return RecommendConstraints(
        budget=budget,
        max_height_increase=float(d.get("max_height_increase", 2.0)),
        residential_change_cap=res_cap,
        group_directions=directions,
        tau=float(d.get("tau", 1.0)),
        penalty_weight=float(d.get("lambda", d.get("penalty_weight", 1e3))),
    )


def constraints_to_dict(c: RecommendConstraints) -> dict:
    return {
        "budget": c.budget,
        "max_height_increase": c.max_height_increase,
        "residential_change_cap": c.residential_change_cap,
        "group_directions": dict(c.group_directions),
        "tau": c.tau,
        "lambda": c.penalty_weight,
    }


# ---------------------------------------------------------------------------
# constraint polytope
# ---------------------------------------------------------------------------

class Polytope:
    """The feasible delta set: non-negative final areas, per-block height
    slack, L1 construction budget, and net residential change cap."""

    def __init__(self, design: CityDesign, constraints: RecommendConstraints,
                 config: PlanningConfig | None = None, arrays: DesignArrays | None = None):
        self.config = config or PlanningConfig()
        self.arrays = arrays or DesignArrays(design, self.config)
        self.constraints = constraints
        self.v = self.arrays.block_area_matrix()  # (K, F)
        blocks = design.blocks
        self.s = np.array([blocks[bid].footprint_total for bid in self.arrays.block_ids])
        self.hbar = np.array([blocks[bid].mean_height for bid in self.arrays.block_ids])
        self.empty_block = self.s <= 0.0
        # Height slack per block: s_k*(h_max + h̄_k) - sum_f v_{k,f}; the
        # current design always leaves this non-negative.
        self.height_slack = np.where(
            self.empty_block, 0.0, self.s * (constraints.max_height_increase + self.hbar) - self.v.sum(axis=1)
        )
        self.res_col = self.arrays.res_col
        self.shape = self.v.shape

    def violations(self, delta: np.ndarray, tol: float = FEASIBILITY_TOL) -> list:
        out = []
        final = self.v + delta
        if np.any(final < -tol):
            k, f = np.unravel_index(np.argmin(final), final.shape)
            out.append(f"negative final area at block {self.arrays.block_ids[k]} "
                       f"type {self.arrays.function_types[f]}: {final[k, f]:.6g}")
        with np.errstate(divide="ignore", invalid="ignore"):
            height = np.where(self.s > 0, final.sum(axis=1) / np.where(self.s > 0, self.s, 1.0) - self.hbar, 0.0)
        if np.any(height > self.constraints.max_height_increase + tol):
            k = int(np.argmax(height))
            out.append(f"height increase {height[k]:.6g} exceeds cap at block {self.arrays.block_ids[k]}")
        if np.abs(delta).sum() > self.constraints.budget + max(1.0, self.constraints.budget) * tol:
            out.append(f"total |delta| {np.abs(delta).sum():.6g} exceeds budget {self.constraints.budget:.6g}")
        res_total = delta[:, self.res_col].sum()
        if abs(res_total) > self.constraints.residential_change_cap + max(
            1.0, self.constraints.residential_change_cap
        ) * tol:
            out.append(f"net residential change {res_total:.6g} exceeds cap "
                       f"{self.constraints.residential_change_cap:.6g}")
        if np.any(np.abs(delta[self.empty_block]) > tol):
            out.append("delta assigned to a block with no buildings")
        return out

    def feasible(self, delta: np.ndarray, tol: float = FEASIBILITY_TOL) -> bool:
        return not self.violations(delta, tol)

    def lmo(self, gradient: np.ndarray) -> np.ndarray:
        """Linear minimization oracle: argmin <g, delta> over the polytope.

        Absolute values are linearized by the delta = plus - minus split.
        A zero gradient short-circuits to the zero vertex.
        """
        g = np.asarray(gradient, dtype=float)
        if not np.any(g):
            return np.zeros(self.shape)
        K, F = self.shape
        ncell = K * F
        c = np.concatenate([g.ravel(), -g.ravel()])

        rows = []
        rhs = []
        # final area >= 0: -(plus - minus) <= v
        eye = np.eye(ncell)
        rows.append(np.hstack([-eye, eye]))
        rhs.extend(self.v.ravel())
        # per-block height slack: sum_f (plus - minus) <= slack_k
        block_rows = np.zeros((K, 2 * ncell))
        for k in range(K):
            block_rows[k, k * F:(k + 1) * F] = 1.0
            block_rows[k, ncell + k * F:ncell + (k + 1) * F] = -1.0
        rows.append(block_rows)
        rhs.extend(self.height_slack)
        # budget: sum (plus + minus) <= budget
        rows.append(np.ones((1, 2 * ncell)))
        rhs.append(self.constraints.budget)
        # residential net change: |sum_k delta_res| <= cap
        res_row = np.zeros(2 * ncell)
        for k in range(K):
            res_row[k * F + self.res_col] = 1.0
            res_row[ncell + k * F + self.res_col] = -1.0
        rows.append(res_row[None, :])
        rhs.append(self.constraints.residential_change_cap)
        rows.append(-res_row[None, :])
        rhs.append(self.constraints.residential_change_cap)

        bounds = []
        for k in range(K):
            for f in range(F):
                bounds.append((0.0, 0.0) if self.empty_block[k] else (0.0, None))
        bounds = bounds * 2

        result = linprog(
            c,
            A_ub=np.vstack(rows),
            b_ub=np.array(rhs),
            bounds=bounds,
            method="highs",
        )
        if not result.success:
            raise SolverError(f"LP oracle failed: {result.message}", details={"status": int(result.status)})
        x = result.x
        delta = (x[:ncell] - x[ncell:]).reshape(self.shape)
        return delta

    def sample_feasible(self, rng: np.random.Generator, max_tries: int = 50) -> np.ndarray:
        """A random feasible point, used as a baseline for dominance tests."""
        K, F = self.shape
        for _ in range(max_tries):
            delta = rng.uniform(-1.0, 1.0, size=(K, F))
            delta[self.empty_block] = 0.0
            total = np.abs(delta).sum()
            if total > 0:
                delta *= self.constraints.budget * rng.random() / total
            for _ in range(8):
                delta = np.maximum(delta, -self.v)
                for k in range(K):
                    excess = delta[k].sum() - self.height_slack[k]
                    if excess > 0:
                        pos = delta[k][delta[k] > 0].sum()
                        if pos > 0:
                            delta[k][delta[k] > 0] *= max(0.0, (pos - excess) / pos)
                res_total = delta[:, self.res_col].sum()
                cap = self.constraints.residential_change_cap
                if abs(res_total) > cap:
                    scale = 0.999 * cap / abs(res_total) if abs(res_total) > 0 else 0.0
                    delta[:, self.res_col] *= scale
                if self.feasible(delta):
                    return delta
        return np.zeros(self.shape)


# ---------------------------------------------------------------------------
# soft objective
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SoftOutcome:
    epsilon: float
    penalty: float
    objective: float
    group_means: Mapping[str, float]
    included: int


class SoftEvaluator:
    """Deterministic expected-benefit objective over block-level deltas.

    Geometry is fixed under floor-area edits, so the per-type decay kernels
    are precomputed once; each evaluation is a handful of matrix products.
    Capacity weights use fractional (un-floored) occupancy and extend
    linearly through zero, so the surrogate is smooth; the hard pipeline
    floors capacities before assignment.

    Benefits are linear in the deltas and the capacity weights are a
    smooth ratio, so the objective gradient has a closed form; `gradient`
    returns it and `gradient_fd` keeps the finite-difference route for
    cross-checks.
    """

    def __init__(self, design: CityDesign, population: Population,
                 config: PlanningConfig | None = None):
        self.config = config or PlanningConfig()
        self.design = design
        self.population = population
        self.arrays = DesignArrays(design, self.config)
        if len(population.residents) == 0:
            raise DomainError("population is empty")
        centroids = self.arrays.centroids
        dist_all = _kernels.pairwise_distances(centroids, centroids)
        nonres = self.config.non_residential
        kappas = np.array([self.config.impedance_of(f) for f in nonres])
        self.weight_stack = _kernels.decay_weights(
            dist_all, kappas, self.config.accessibility_cutoff_radius
        )
        for k, f in enumerate(nonres):
            self.weight_stack[k] /= self.config.priority_of(f)
        self.nonres = nonres
        self.nonres_cols = np.array([self.arrays.ft_index[f] for f in nonres])
        self.prefs = preference_matrix(population, nonres)
        self.priors = np.array([r.prior_utility for r in population.residents])
        self.equity = equity_vector(population, self.config)
        self.type_labels = np.array([r.type_id for r in population.residents])
        self.type_ids = sorted({r.type_id for r in population.residents})
        self.spread = self.arrays.footprint_share[:, None]
        self.block_of = self.arrays.building_block
        # Per-block spread columns: S[l, k] = footprint share of building l
        # if it sits in block k, else 0. G_f = W_f @ S gives the
        # accessibility response of every building to one block's delta.
        n_bld = len(self.arrays.building_ids)
        n_blk = len(self.arrays.block_ids)
        S = np.zeros((n_bld, n_blk))
        S[np.arange(n_bld), self.block_of] = self.arrays.footprint_share
        self.spread_cols = S
        self.block_response = np.array([self.weight_stack[k] @ S for k in range(len(nonres))])
        self._baseline: Optional[SoftOutcome] = None

    def zero_delta(self) -> np.ndarray:
        return np.zeros((len(self.arrays.block_ids), len(self.arrays.function_types)))

    def _evaluate_raw(self, delta: np.ndarray):
        """Expected benefits for one delta matrix plus gradient ingredients."""
        v_bld = self.arrays.areas + delta[self.block_of] * self.spread
        access = np.empty((v_bld.shape[0], len(self.nonres)))
        for k in range(len(self.nonres)):
            access[:, k] = self.weight_stack[k] @ v_bld[:, self.nonres_cols[k]]
        utilities = self.prefs @ access.T  # (n_residents, n_buildings)
        benefits = (utilities - self.priors[:, None]) * self.equity[:, None]

        # No clipping at zero: block-level constraints keep block totals
        # non-negative, and the straight-through extension keeps the
        # surrogate smooth.
        res_areas = v_bld[:, self.arrays.res_col]
        total = res_areas.sum()
        if total <= 0:
            raise DomainError("no residential capacity: soft objective undefined")
        weights = res_areas / total
        expected = benefits @ weights
        included = expected > 0
        if not included.any():
            raise DomainError("no resident has positive expected benefit")
        eps = ge_index(expected[included], self.config.alpha)
        group_means = {}
        for t in self.type_ids:
            member = included & (self.type_labels == t)
            group_means[t] = float(expected[member].mean()) if member.any() else 0.0
        return _SoftState(
            epsilon=eps,
            group_means=group_means,
            expected=expected,
            included=included,
            benefits=benefits,
            weights=weights,
            total_capacity_area=total,
        )

    def baseline(self) -> SoftOutcome:
        if self._baseline is None:
            state = self._evaluate_raw(self.zero_delta())
            self._baseline = SoftOutcome(
                epsilon=state.epsilon,
                penalty=0.0,
                objective=state.epsilon,
                group_means=state.group_means,
                included=int(state.included.sum()),
            )
        return self._baseline

    def epsilon(self, delta: np.ndarray) -> float:
        return self._evaluate_raw(delta).epsilon

    def _penalty(self, group_means: Mapping[str, float], constraints: RecommendConstraints):
        """Hinge penalty and its slope per group (slope wrt the group mean)."""
        base = self.baseline()
        phi = 0.0
        slopes = {}
        tau = constraints.tau
        for t in self.type_ids:
            change = group_means[t] - base.group_means[t]
            direction = constraints.direction_of(t)
            slope = 0.0
            if direction == INCREASE:
                phi += -min(change + tau, 0.0)
                slope = -1.0 if change + tau < 0 else 0.0
            elif direction == DECREASE:
                phi += max(change - tau, 0.0)
                slope = 1.0 if change - tau > 0 else 0.0
            elif direction == FIXED:
                over = abs(change) - tau
                phi += max(over, 0.0)
                slope = float(np.sign(change)) if over > 0 else 0.0
            slopes[t] = slope
        return phi, slopes

    def outcome(self, delta: np.ndarray, constraints: RecommendConstraints) -> SoftOutcome:
        state = self._evaluate_raw(delta)
        phi, _ = self._penalty(state.group_means, constraints)
        return SoftOutcome(
            epsilon=state.epsilon,
            penalty=phi,
            objective=state.epsilon + constraints.penalty_weight * phi,
            group_means=state.group_means,
            included=int(state.included.sum()),
        )

    def objective(self, delta: np.ndarray, constraints: RecommendConstraints) -> float:
        return self.outcome(delta, constraints).objective

    def gradient(self, delta: np.ndarray, constraints: RecommendConstraints) -> np.ndarray:
        """Closed-form gradient of the soft objective at `delta`.

        Valid wherever the objective is differentiable (away from
        inclusion-set flips and penalty hinge kinks).
        """
        state = self._evaluate_raw(delta)
        alpha = self.config.alpha
        incl = state.included
        E = state.expected
        n = int(incl.sum())
        mu = float(E[incl].mean())
        s_alpha = float(np.power(E[incl] / mu, alpha).sum())
        # d(epsilon)/dE_i over included residents
        dm_dE = np.zeros_like(E)
        dm_dE[incl] = (
            np.power(E[incl], alpha - 1.0) / mu**alpha - s_alpha / (n * mu)
        ) / (n * (alpha - 1.0))
        # penalty contribution: slope/n_g per included member of group g
        _, slopes = self._penalty(state.group_means, constraints)
        for t, slope in slopes.items():
            if slope != 0.0:
                member = incl & (self.type_labels == t)
                count = int(member.sum())
                if count:
                    dm_dE[member] += constraints.penalty_weight * slope / count

        grad = np.zeros((len(self.arrays.block_ids), len(self.arrays.function_types)))
        # Non-residential columns: E responds through accessibility, which
        # is linear in the delta with the precomputed block response.
        for k, f in enumerate(self.nonres):
            resident_factor = dm_dE * self.equity * self.prefs[:, k]  # (n_res,)
            spatial = self.block_response[k].T @ state.weights  # (n_blocks,)
            grad[:, self.arrays.ft_index[f]] = resident_factor.sum() * spatial
        # Residential column: E responds through the capacity weights.
        block_share_benefit = state.benefits @ self.spread_cols  # (n_res, n_blocks)
        ce = float(dm_dE @ E)
        grad[:, self.arrays.res_col] = (dm_dE @ block_share_benefit - ce) / state.total_capacity_area
        return grad

    def gradient_fd(self, delta: np.ndarray, constraints: RecommendConstraints,
                    step: float = FD_STEP, central: bool = False) -> np.ndarray:
        """Finite-difference gradient (forward by default), kept as the
        independent check against the closed form."""
        grad = np.zeros_like(delta)
        base = self.objective(delta, constraints) if not central else 0.0
        for k in range(delta.shape[0]):
            for f in range(delta.shape[1]):
                up = delta.copy()
                up[k, f] += step
                if central:
                    down = delta.copy()
                    down[k, f] -= step
                    grad[k, f] = (self.objective(up, constraints) - self.objective(down, constraints)) / (2 * step)
                else:
                    grad[k, f] = (self.objective(up, constraints) - base) / step
        return grad


@dataclass(frozen=True)
class _SoftState:
    epsilon: float
    group_means: Mapping[str, float]
    expected: np.ndarray
    included: np.ndarray
    benefits: np.ndarray
    weights: np.ndarray
    total_capacity_area: float


# ---------------------------------------------------------------------------
# Frank-Wolfe search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EditPlan:
    """Recommended block-level floor-area deltas plus predicted indicators."""

    block_ids: tuple
    function_types: tuple
    delta_matrix: np.ndarray
    predicted_inequality: float
    predicted_group_benefits: Mapping[str, float]
    objective_trace: tuple
    no_improvement: bool

    @property
    def deltas(self) -> dict:
        out: dict[str, dict[str, float]] = {}
        for k, bid in enumerate(self.block_ids):
            row = {}
            for f, ft in enumerate(self.function_types):
                v = float(self.delta_matrix[k, f])
                if v != 0.0:
                    row[ft] = v
            if row:
                out[bid] = row
        return out

    @property
    def edited_blocks(self) -> tuple:
        return tuple(sorted(self.deltas.keys()))

    def to_dict(self) -> dict:
        return {
            "deltas": {b: dict(sorted(row.items())) for b, row in sorted(self.deltas.items())},
            "predicted_inequality": self.predicted_inequality,
            "predicted_group_benefits": dict(sorted(self.predicted_group_benefits.items())),
            "objective_trace": [float(v) for v in self.objective_trace],
            "no_improvement": self.no_improvement,
        }


def frank_wolfe(design: CityDesign, population: Population,
                constraints: RecommendConstraints, config: PlanningConfig | None = None,
                max_iter: int = MAX_ITER, evaluator: SoftEvaluator | None = None,
                polytope: Polytope | None = None) -> EditPlan:
    """Conditional-gradient descent from the current design (delta = 0).

    Step c takes delta_{c+1} = delta_c + zeta (lmo(grad) - delta_c) with
    zeta = 2/(c+2); iterates stay feasible as convex combinations of
    polytope points. Stops when |m_{c+1} - m_c| < 1e-6 * m_0 or at the
    iteration cap; the best-seen iterate is returned (fixed-step FW is not
    monotone).
    """
    config = config or PlanningConfig()
    ev = evaluator or SoftEvaluator(design, population, config)
    poly = polytope or Polytope(design, constraints, config, arrays=ev.arrays)

    delta = ev.zero_delta()
    out0 = ev.outcome(delta, constraints)
    m0 = out0.objective
    eps_stop = 1e-6 * abs(m0) if m0 != 0 else 1e-12
    trace = [m0]
    best_delta = delta
    best_out = out0

    m_prev = m0
    for c in range(max_iter):
        grad = ev.gradient(delta, constraints)
        vertex = poly.lmo(grad)
        zeta = 2.0 / (c + 2.0)
        delta = delta + zeta * (vertex - delta)
        out = ev.outcome(delta, constraints)
        trace.append(out.objective)
        if out.objective < best_out.objective:
            best_out = out
            best_delta = delta.copy()
        if abs(out.objective - m_prev) < eps_stop:
            break
        m_prev = out.objective

    no_improvement = best_out.objective >= m0 - abs(m0) * 1e-12
    if no_improvement:
        best_delta = ev.zero_delta()
        best_out = out0
    return EditPlan(
        block_ids=tuple(ev.arrays.block_ids),
        function_types=tuple(ev.arrays.function_types),
        delta_matrix=best_delta,
        predicted_inequality=best_out.epsilon,
        predicted_group_benefits=best_out.group_means,
        objective_trace=tuple(trace),
        no_improvement=no_improvement,
    )


def prune_plan(plan: EditPlan, polytope: Polytope, threshold: float = PRUNE_AREA) -> EditPlan:
    """Zero out sub-threshold cells; keep the original matrix when pruning
    would push the plan outside the polytope tolerance."""
    pruned = plan.delta_matrix.copy()
    pruned[np.abs(pruned) < threshold] = 0.0
    if not polytope.feasible(pruned):
        return plan
    return EditPlan(
        block_ids=plan.block_ids,
        function_types=plan.function_types,
        delta_matrix=pruned,
        predicted_inequality=plan.predicted_inequality,
        predicted_group_benefits=plan.predicted_group_benefits,
        objective_trace=plan.objective_trace,
        no_improvement=plan.no_improvement,
    )


def plan_from_dict(doc: Mapping, design: CityDesign,
                   config: PlanningConfig | None = None) -> EditPlan:
    """Rebuild an EditPlan from its serialized form (either a bare plan or
    a full recommendation document carrying one under 'plan')."""
    config = config or PlanningConfig()
    body = doc.get("plan", doc)
    arrays = DesignArrays(design, config)
    delta = np.zeros((len(arrays.block_ids), len(arrays.function_types)))
    for bid, row in body.get("deltas", {}).items():
        if bid not in arrays.block_index:
            raise EditError(f"plan references unknown block '{bid}'")
        for ftype, v in row.items():
            if ftype not in arrays.ft_index:
                raise EditError(f"plan references unknown function type '{ftype}'")
            delta[arrays.block_index[bid], arrays.ft_index[ftype]] = float(v)
    return EditPlan(
        block_ids=tuple(arrays.block_ids),
        function_types=tuple(arrays.function_types),
        delta_matrix=delta,
        predicted_inequality=float(body.get("predicted_inequality", 0.0)),
        predicted_group_benefits=dict(body.get("predicted_group_benefits", {})),
        objective_trace=tuple(body.get("objective_trace", [])),
        no_improvement=bool(body.get("no_improvement", False)),
    )


# ---------------------------------------------------------------------------
# plan materialization
# ---------------------------------------------------------------------------

def apply_plan(design: CityDesign, plan: EditPlan, strategy: str = "uniform") -> CityDesign:
    """Materialize block deltas into concrete building edits.

    The uniform strategy spreads increases by footprint share and decreases
    pro-rata over the existing per-building areas of that type (so no
    building goes negative). Floor counts rise (never fall) when the added
    area would exceed the built volume.
    """
    if strategy != "uniform":
        raise ValueError(f"unknown apply strategy {strategy!r}")
    by_block: dict[str, list[Building]] = {}
    for b in design.buildings:
        by_block.setdefault(b.block_id, []).append(b)

    new_areas = {b.id: dict(b.floor_areas) for b in design.buildings}
    for block_id, row in plan.deltas.items():
        members = sorted(by_block.get(block_id, []), key=lambda b: b.id)
        if not members:
            raise EditError(f"plan edits block '{block_id}' which has no buildings")
        fp_total = sum(b.footprint_area for b in members)
        for ftype, d in sorted(row.items()):
            if d > 0:
                for b in members:
                    share = b.footprint_area / fp_total
                    new_areas[b.id][ftype] = new_areas[b.id].get(ftype, 0.0) + d * share
            elif d < 0:
                existing = sum(new_areas[b.id].get(ftype, 0.0) for b in members)
                take = -d
                if take > existing + FEASIBILITY_TOL:
                    raise EditError(
                        f"plan removes {take:.1f} m² of {ftype} from block '{block_id}' "
                        f"but only {existing:.1f} m² exists"
                    )
                scale = max(0.0, 1.0 - take / existing) if existing > 0 else 0.0
                for b in members:
                    cur = new_areas[b.id].get(ftype, 0.0)
                    if cur > 0:
                        new_areas[b.id][ftype] = cur * scale

    new_buildings = []
    for b in design.buildings:
        areas = {f: (0.0 if abs(v) < 1e-9 else float(v)) for f, v in new_areas[b.id].items()}
        total = sum(areas.values())
        floors = b.floors
        fp = b.footprint_area
        if fp > 0 and total > fp * floors:
            floors = max(floors, int(math.ceil(total / fp - 1e-9)))
        new_buildings.append(
            Building(id=b.id, block_id=b.block_id, footprint=b.footprint, floors=floors, floor_areas=areas)
        )
    candidate = CityDesign(
        buildings=tuple(sorted(new_buildings, key=lambda b: b.id)),
        block_ids=design.block_ids,
        crs_note=design.crs_note,
        revision=design.revision + 1,
    )
    violations = validate_design(candidate)
    if violations:
        raise EditError(
            "materialized plan fails validation",
            details={"violations": [v.to_dict() for v in violations]},
        )
    return candidate


# ---------------------------------------------------------------------------
# top-level recommendation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RecommendationPlan:
    plan: EditPlan
    attribution: "AttributionReport"  # noqa: F821  (attribution module)
    constraints: RecommendConstraints
    soft_inequality_before: float
    simulated_inequality_before: Optional[float]
    simulated_inequality_after: Optional[float]
    simulated_group_benefits_after: Optional[Mapping[str, float]]
    seed: int

    @property
    def blocks_ranked(self) -> list:
        per = self.attribution.per_block
        return sorted(per, key=lambda b: (-per[b], b))

    def to_dict(self) -> dict:
        return {
            "plan": self.plan.to_dict(),
            "attribution": self.attribution.to_dict(),
            "blocks_ranked": self.blocks_ranked,
            "constraints": constraints_to_dict(self.constraints),
            "soft_inequality_before": self.soft_inequality_before,
            "simulated_inequality_before": self.simulated_inequality_before,
            "simulated_inequality_after": self.simulated_inequality_after,
            "simulated_group_benefits_after": (
                dict(sorted(self.simulated_group_benefits_after.items()))
                if self.simulated_group_benefits_after
                else None
            ),
            "seed": self.seed,
        }


def recommend(design: CityDesign, population: Population,
              constraints: RecommendConstraints, config: PlanningConfig | None = None,
              seed: int = 0, n_permutations: int = 30,
              max_iter: int = MAX_ITER) -> RecommendationPlan:
    """Full How-To pass: Frank-Wolfe search, sub-square-meter pruning,
    Shapley attribution of the edited blocks, and one stochastic
    simulation of the materialized plan for verification."""
    from .attribution import SHAPLEY_EXACT_LIMIT, shapley_exact, shapley_sampled

    config = config or PlanningConfig()
    ev = SoftEvaluator(design, population, config)
    poly = Polytope(design, constraints, config, arrays=ev.arrays)
    plan = frank_wolfe(design, population, constraints, config, max_iter=max_iter,
                       evaluator=ev, polytope=poly)
    plan = prune_plan(plan, poly)

    edited = plan.edited_blocks
    if len(edited) == 0 or plan.no_improvement:
        attribution = _empty_attribution()
    elif len(edited) <= SHAPLEY_EXACT_LIMIT:
        attribution = shapley_exact(design, population, plan, config, evaluator=ev)
    else:
        attribution = shapley_sampled(
            design, population, plan, config, n_permutations=n_permutations, seed=seed, evaluator=ev
        )

    before = simulate(design, population, config, seed)
    sim_before = before.inequality.total if before.inequality else None
    sim_after = None
    sim_group_after = None
    if not plan.no_improvement:
        edited_design = apply_plan(design, plan)
        after = simulate(edited_design, population, config, seed)
        if after.inequality:
            sim_after = after.inequality.total
        if after.stats:
            sim_group_after = {g: s.mean for g, s in after.stats.per_group.items()}
    return RecommendationPlan(
        plan=plan,
        attribution=attribution,
        constraints=constraints,
        soft_inequality_before=ev.baseline().epsilon,
        simulated_inequality_before=sim_before,
        simulated_inequality_after=sim_after,
        simulated_group_benefits_after=sim_group_after,
        seed=seed,
    )


def _empty_attribution():
    from .attribution import AttributionReport

    return AttributionReport(per_block={}, method="exact", permutations_used=0, seed=None, residual=0.0)
