import numpy as np
import pytest

from fairplan.model import CityDesign, PlanningConfig
from fairplan.recommend import (
    Polytope,
    RecommendConstraints,
    SoftEvaluator,
    apply_plan,
    frank_wolfe,
    plan_from_dict,
    prune_plan,
    recommend,
    resolve_constraints,
)

from conftest import make_building, random_small_city, tiny_population


def test_constraints_validation():
    with pytest.raises(ValueError):
        RecommendConstraints(budget=-1.0)
    with pytest.raises(ValueError):
        RecommendConstraints(budget=10.0, tau=-0.5)
    with pytest.raises(ValueError):
        RecommendConstraints(budget=10.0, penalty_weight=0.5)
    with pytest.raises(ValueError):
        RecommendConstraints(budget=10.0, group_directions={"a": "sideways"})


def test_resolve_constraints_fractions(bundled):
    design, _, _ = bundled
    cons = resolve_constraints({"budget_fraction": 0.1}, design)
    total = sum(design.total_floor_area_by_type().values())
    assert cons.budget == pytest.approx(0.1 * total)


def test_lmo_zero_gradient_returns_zero(bundled):
    design, _, config = bundled
    poly = Polytope(design, RecommendConstraints(budget=1000.0), config)
    delta = poly.lmo(np.zeros(poly.shape))
    assert np.all(delta == 0.0)


def test_lmo_one_dimensional_cases():
    # single block, single amenity type with positive gradient: the LP
    # empties that cell down to max(-v, -budget)
    design = CityDesign.from_buildings(
        [make_building("b", "k", 0, 0, floors=6, side=40.0, Office=500.0, Residential=600.0)]
    )
    config = PlanningConfig()
    poly = Polytope(design, RecommendConstraints(budget=300.0, residential_change_cap=0.0,
                                                 max_height_increase=50.0), config)
    g = np.zeros(poly.shape)
    office = poly.arrays.ft_index["Office"]
    g[0, office] = 1.0
    delta = poly.lmo(g)
    assert delta[0, office] == pytest.approx(-300.0, abs=1e-6)  # budget binds
    poly_big = Polytope(design, RecommendConstraints(budget=5000.0, residential_change_cap=0.0,
                                                     max_height_increase=50.0), config)
    delta = poly_big.lmo(g)
    assert delta[0, office] == pytest.approx(-500.0, abs=1e-6)  # v >= 0 binds


def test_lmo_budget_zero_polytope_is_origin(bundled):
    design, _, config = bundled
    poly = Polytope(design, RecommendConstraints(budget=0.0, residential_change_cap=0.0), config)
    g = np.ones(poly.shape)
    assert np.allclose(poly.lmo(g), 0.0, atol=1e-9)


def test_lmo_returns_feasible_vertices(bundled):
    design, _, config = bundled
    rng = np.random.default_rng(4)
    for budget in (500.0, 5000.0, 20000.0):
        poly = Polytope(design, RecommendConstraints(budget=budget, residential_change_cap=400.0,
                                                     max_height_increase=1.0), config)
        for _ in range(5):
            delta = poly.lmo(rng.normal(size=poly.shape))
            assert poly.feasible(delta), poly.violations(delta)


def test_sample_feasible_is_feasible(bundled):
    design, _, config = bundled
    poly = Polytope(design, RecommendConstraints(budget=8000.0, residential_change_cap=500.0), config)
    rng = np.random.default_rng(9)
    for _ in range(20):
        assert poly.feasible(poly.sample_feasible(rng))


def test_zero_delta_objective_is_current_soft_inequality(bundled):
    design, population, config = bundled
    ev = SoftEvaluator(design, population, config)
    cons = RecommendConstraints(budget=1000.0)  # all groups free
    out = ev.outcome(ev.zero_delta(), cons)
    assert out.penalty == 0.0
    assert out.objective == pytest.approx(out.epsilon)
    assert out.epsilon == pytest.approx(ev.baseline().epsilon)


def test_penalty_hinge_forms(bundled):
    """Hinges evaluated at controlled group-mean changes: an 'increase'
    group that moved by -2*tau is penalized exactly tau; movements inside
    the slack band cost nothing."""
    design, population, config = bundled
    ev = SoftEvaluator(design, population, config)
    base = ev.baseline().group_means
    tau = 1.5
    some = sorted(base)[:3]
    cons = RecommendConstraints(
        budget=1000.0, tau=tau,
        group_directions={some[0]: "increase", some[1]: "decrease", some[2]: "fixed"},
    )
    shifted = dict(base)
    shifted[some[0]] = base[some[0]] - 2 * tau  # increase group moved down
    phi, slopes = ev._penalty(shifted, cons)
    assert phi == pytest.approx(tau)
    assert slopes[some[0]] == -1.0

    inside = dict(base)
    inside[some[0]] = base[some[0]] - 0.5 * tau  # within slack
    inside[some[1]] = base[some[1]] + 0.5 * tau
    inside[some[2]] = base[some[2]] + 0.9 * tau
    phi, _ = ev._penalty(inside, cons)
    assert phi == pytest.approx(0.0)

    decrease_violate = dict(base)
    decrease_violate[some[1]] = base[some[1]] + 2 * tau  # decrease group moved up
    phi, _ = ev._penalty(decrease_violate, cons)
    assert phi == pytest.approx(tau)

    fixed_violate = dict(base)
    fixed_violate[some[2]] = base[some[2]] - 3 * tau
    phi, _ = ev._penalty(fixed_violate, cons)
    assert phi == pytest.approx(2 * tau)


def test_plan_from_dict_rejects_unknown_ids(bundled):
    from fairplan.errors import EditError

    design, _, config = bundled
    with pytest.raises(EditError, match="unknown block"):
        plan_from_dict({"deltas": {"blk-nowhere": {"Office": 10.0}}}, design, config)
    with pytest.raises(EditError, match="unknown function type"):
        plan_from_dict({"deltas": {"blk-core": {"Casino": 10.0}}}, design, config)


def test_gradient_matches_central_differences_random_instances():
    rng = np.random.default_rng(12)
    for trial in range(3):
        design = random_small_city(rng)
        population = tiny_population(n_per_type=8, types=("a", "b", "c"), prior=-50.0, seed=trial)
        config = PlanningConfig()
        ev = SoftEvaluator(design, population, config)
        cons = RecommendConstraints(budget=2000.0, group_directions={"a": "fixed"}, tau=5.0)
        poly = Polytope(design, cons, config, arrays=ev.arrays)
        for point in (ev.zero_delta(), poly.sample_feasible(rng)):
            analytic = ev.gradient(point, cons)
            central = ev.gradient_fd(point, cons, step=1.0, central=True)
            denom = max(np.linalg.norm(central), 1e-30)
            assert np.linalg.norm(analytic - central) / denom < 1e-4


def test_frank_wolfe_budget_zero_returns_current(bundled):
    design, population, config = bundled
    plan = frank_wolfe(design, population,
                       RecommendConstraints(budget=0.0, residential_change_cap=0.0), config,
                       max_iter=5)
    assert plan.no_improvement
    assert np.all(plan.delta_matrix == 0.0)
    ev = SoftEvaluator(design, population, config)
    assert plan.predicted_inequality == pytest.approx(ev.baseline().epsilon)


def test_frank_wolfe_beats_random_search(bundled):
    design, population, config = bundled
    cons = resolve_constraints({"budget_fraction": 0.1}, design)
    ev = SoftEvaluator(design, population, config)
    poly = Polytope(design, cons, config, arrays=ev.arrays)
    plan = frank_wolfe(design, population, cons, config, evaluator=ev, polytope=poly)
    rng = np.random.default_rng(100)
    best_random = min(ev.objective(poly.sample_feasible(rng), cons) for _ in range(100))
    assert min(plan.objective_trace) <= best_random + 1e-6


def test_frank_wolfe_plan_feasible(bundled):
    design, population, config = bundled
    cons = resolve_constraints({"budget_fraction": 0.08, "max_height_increase": 1.0}, design)
    poly = Polytope(design, cons, config)
    plan = frank_wolfe(design, population, cons, config, max_iter=60)
    assert poly.feasible(plan.delta_matrix), poly.violations(plan.delta_matrix)


def test_frank_wolfe_feasible_over_random_constraint_draws(bundled):
    design, population, config = bundled
    rng = np.random.default_rng(77)
    ev = SoftEvaluator(design, population, config)
    directions = ("free", "increase", "decrease", "fixed")
    for _ in range(6):
        cons = RecommendConstraints(
            budget=float(rng.uniform(500, 25000)),
            max_height_increase=float(rng.uniform(0.2, 4.0)),
            residential_change_cap=float(rng.uniform(0, 2000)),
            group_directions={t.id: directions[rng.integers(4)] for t in population.types},
            tau=float(rng.uniform(0.0, 3.0)),
            penalty_weight=float(rng.uniform(1.0, 5e3)),
        )
        poly = Polytope(design, cons, config, arrays=ev.arrays)
        plan = frank_wolfe(design, population, cons, config, max_iter=25,
                           evaluator=ev, polytope=poly)
        assert poly.feasible(plan.delta_matrix, tol=1e-6), poly.violations(plan.delta_matrix)


def test_best_seen_is_running_minimum(bundled):
    design, population, config = bundled
    cons = resolve_constraints({"budget_fraction": 0.1}, design)
    plan = frank_wolfe(design, population, cons, config, max_iter=40)
    trace = plan.objective_trace
    running = np.minimum.accumulate(trace)
    assert all(a >= b for a, b in zip(running, running[1:]))
    assert min(trace) == pytest.approx(running[-1])


def test_fixed_groups_with_huge_penalty_stay_fixed(bundled):
    design, population, config = bundled
    directions = {t.id: "fixed" for t in population.types}
    cons = resolve_constraints(
        {"budget_fraction": 0.1, "group_directions": directions, "tau": 0.0, "lambda": 1e4},
        design,
    )
    plan = frank_wolfe(design, population, cons, config, max_iter=60)
    ev = SoftEvaluator(design, population, config)
    base_means = ev.baseline().group_means
    outcome = ev.outcome(plan.delta_matrix, cons)
    for t, mean in outcome.group_means.items():
        assert abs(mean - base_means[t]) <= 1e-3


def test_prune_drops_small_cells(bundled):
    design, population, config = bundled
    cons = resolve_constraints({"budget_fraction": 0.1}, design)
    ev = SoftEvaluator(design, population, config)
    poly = Polytope(design, cons, config, arrays=ev.arrays)
    plan = frank_wolfe(design, population, cons, config, evaluator=ev, polytope=poly, max_iter=60)
    pruned = prune_plan(plan, poly)
    nonzero = np.abs(pruned.delta_matrix[pruned.delta_matrix != 0.0])
    assert nonzero.size == 0 or nonzero.min() >= 1.0
    assert poly.feasible(pruned.delta_matrix)


def test_apply_plan_matches_block_deltas(bundled):
    design, population, config = bundled
    cons = resolve_constraints({"budget_fraction": 0.1}, design)
    plan = frank_wolfe(design, population, cons, config, max_iter=60)
    edited = apply_plan(design, plan)
    assert edited.revision == design.revision + 1
    before = {}
    after = {}
    for b in design.buildings:
        for f, v in b.floor_areas.items():
            before[(b.block_id, f)] = before.get((b.block_id, f), 0.0) + v
    for b in edited.buildings:
        for f, v in b.floor_areas.items():
            after[(b.block_id, f)] = after.get((b.block_id, f), 0.0) + v
    for bid, row in plan.deltas.items():
        for f, d in row.items():
            got = after.get((bid, f), 0.0) - before.get((bid, f), 0.0)
            assert got == pytest.approx(d, abs=1e-6)


def test_apply_plan_spreads_increase_by_footprint_share():
    design = CityDesign.from_buildings(
        [
            make_building("small", "k", 0, 0, side=20.0, Residential=900),  # 400 m²
            make_building("large", "k", 60, 0, side=40.0, Residential=900),  # 1600 m²
        ]
    )
    config = PlanningConfig()
    doc = {"deltas": {"k": {"Office": 1000.0}}}
    plan = plan_from_dict(doc, design, config)
    edited = apply_plan(design, plan)
    assert edited.buildings_by_id["small"].floor_areas["Office"] == pytest.approx(200.0)
    assert edited.buildings_by_id["large"].floor_areas["Office"] == pytest.approx(800.0)


def test_apply_plan_decrease_pro_rata_never_negative():
    design = CityDesign.from_buildings(
        [
            make_building("has", "k", 0, 0, side=40.0, Office=3000, Residential=600),
            make_building("hasnt", "k", 60, 0, side=40.0, Residential=900),
        ]
    )
    config = PlanningConfig()
    plan = plan_from_dict({"deltas": {"k": {"Office": -2000.0}}}, design, config)
    edited = apply_plan(design, plan)
    assert edited.buildings_by_id["has"].floor_areas["Office"] == pytest.approx(1000.0)
    assert edited.buildings_by_id["hasnt"].floor_areas.get("Office", 0.0) == 0.0


def test_apply_plan_raises_floors_when_volume_needs_it():
    design = CityDesign.from_buildings(
        [make_building("b", "k", 0, 0, floors=1, side=20.0, Office=300.0)]  # 400 m² footprint
    )
    plan = plan_from_dict({"deltas": {"k": {"Office": 700.0}}}, design, PlanningConfig())
    edited = apply_plan(design, plan)
    b = edited.buildings_by_id["b"]
    assert b.floor_areas["Office"] == pytest.approx(1000.0)
    assert b.floors == 3  # ceil(1000 / 400)


def test_recommend_zero_budget_empty_plan(bundled):
    design, population, config = bundled
    cons = RecommendConstraints(budget=0.0, residential_change_cap=0.0)
    out = recommend(design, population, cons, config, seed=0, max_iter=3)
    assert out.plan.edited_blocks == ()
    assert out.attribution.per_block == {}
    assert out.attribution.total == pytest.approx(0.0)


def test_recommend_casestudy_constraints_reduce_inequality(bundled):
    from fairplan import scenario

    design, population, config = bundled
    cons = resolve_constraints(scenario.casestudy_constraints_dict(), design)
    out = recommend(design, population, cons, config, seed=3)
    assert out.simulated_inequality_after is not None
    assert out.simulated_inequality_after < out.simulated_inequality_before


def test_soft_prediction_regression_bound(bundled):
    """Frozen build-time measurement: the simulated inequality after
    applying a 10% budget plan stays within 15% of the soft prediction,
    measured relative to the pre-edit inequality."""
    design, population, config = bundled
    cons = resolve_constraints({"budget_fraction": 0.1}, design)
    out = recommend(design, population, cons, config, seed=0)
    gap = abs(out.simulated_inequality_after - out.plan.predicted_inequality)
    assert gap <= 0.15 * out.simulated_inequality_before
