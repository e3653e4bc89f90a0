"""Batch command line: headless evaluation, allocation, recommendation,
plan materialization, population synthesis, scenario reproduction, and
the API server.

All outputs are canonical JSON (deterministic given seeds); failures exit
nonzero with a structured {code, message, details} object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import scenario
from .allocate import simulate
from .errors import FairplanError
from .inequality import DISPLAY_SCALE
from .model import PlanningConfig
from .recommend import apply_plan, plan_from_dict, recommend, resolve_constraints
from .store import (
    canonical_json,
    load_city,
    load_config,
    load_population,
    save_city,
    save_population,
)
from .synth import PopulationSpec, generate_population


def _load_config_arg(path):
    if path:
        return load_config(path)
    env = os.environ.get("FAIRPLAN_CONFIG")
    if env:
        return load_config(env)
    return PlanningConfig()


# Required keys per output kind; every JSON document is checked against
# this before it is emitted.
OUTPUT_SCHEMAS = {
    "indicator-report": {"schema_version", "revision", "seed", "allocated", "mean_benefit",
                         "inequality", "group_stats"},
    "allocation-result": {"schema_version", "revision", "seed", "assignments", "gamma",
                          "iterations", "building_ids", "resident_ids", "probability_matrix"},
    "recommendation-plan": {"schema_version", "revision", "plan", "attribution", "blocks_ranked",
                            "soft_inequality_before", "simulated_inequality_before",
                            "simulated_inequality_after", "seed"},
    "apply-result": {"kind", "revision", "out"},
    "synth-pop-result": {"kind", "residents", "types", "out"},
    "scenario-report": {"schema_version", "scenario", "seed", "inequality_before",
                        "inequality_after", "relative_reduction", "runtime_seconds"},
}


def validate_output(doc: dict) -> dict:
    kind = doc.get("kind")
    required = OUTPUT_SCHEMAS.get(kind)
    if required is None:
        raise ValueError(f"unknown output kind {kind!r}")
    missing = required - doc.keys()
    if missing:
        raise ValueError(f"{kind} output missing keys: {sorted(missing)}")
    return doc


def _emit(doc, out=None):
    text = canonical_json(validate_output(doc))
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _evaluate_doc(design, population, config, seed):
    result = simulate(design, population, config, seed)
    return {
        "schema_version": 1,
        "kind": "indicator-report",
        "revision": design.revision,
        "seed": seed,
        "allocated": len(result.realized_benefits),
        "mean_benefit": result.stats.global_mean if result.stats else None,
        "inequality": result.inequality.to_dict() if result.inequality else None,
        "inequality_scaled": result.inequality.total_scaled if result.inequality else None,
        "group_stats": result.stats.to_dict() if result.stats else None,
    }


def _format_table(doc) -> str:
    lines = []
    lines.append(f"revision {doc['revision']}  seed {doc['seed']}  allocated {doc['allocated']}")
    if doc["inequality"]:
        iq = doc["inequality"]
        lines.append(
            f"inequality total {iq['total']:.6f} (x{DISPLAY_SCALE:.0f}: {doc['inequality_scaled']:.2f})  "
            f"between {iq['between']:.6f}  within {iq['within']:.6f}"
        )
    if doc["group_stats"]:
        lines.append(f"mean benefit {doc['mean_benefit']:.2f}")
        lines.append(f"{'group':<14}{'count':>6}{'mean':>10}{'sd':>10}")
        for g, s in doc["group_stats"]["per_group"].items():
            lines.append(f"{g:<14}{s['count']:>6}{s['mean']:>10.2f}{s['sd']:>10.2f}")
    return "\n".join(lines)


def cmd_evaluate(args):
    config = _load_config_arg(args.config)
    design = load_city(args.city, known_types=config.function_types)
    population = load_population(args.population)
    doc = _evaluate_doc(design, population, config, args.seed)
    if args.format == "table":
        text = _format_table(doc)
        if args.out:
            Path(args.out).write_text(text + "\n", encoding="utf-8")
        else:
            print(text)
    else:
        _emit(doc, args.out)
    return 0


def cmd_allocate(args):
    config = _load_config_arg(args.config)
    design = load_city(args.city, known_types=config.function_types)
    population = load_population(args.population)
    result = simulate(design, population, config, args.seed)
    doc = {
        "schema_version": 1,
        "kind": "allocation-result",
        "revision": design.revision,
        "seed": args.seed,
    }
    if result.allocation is not None:
        doc.update(result.allocation.to_dict())
    else:
        doc.update({"assignments": {}, "gamma": 0.0, "iterations": 0,
                    "building_ids": [], "resident_ids": [], "probability_matrix": []})
    _emit(doc, args.out)
    return 0


def cmd_recommend(args):
    config = _load_config_arg(args.config)
    design = load_city(args.city, known_types=config.function_types)
    population = load_population(args.population)
    constraints_doc = json.loads(Path(args.constraints).read_text(encoding="utf-8"))
    constraints = resolve_constraints(constraints_doc, design)
    plan = recommend(design, population, constraints, config, seed=args.seed)
    doc = {"schema_version": 1, "kind": "recommendation-plan", "revision": design.revision}
    doc.update(plan.to_dict())
    _emit(doc, args.out)
    return 0


def cmd_apply(args):
    config = _load_config_arg(args.config)
    design = load_city(args.city, known_types=config.function_types)
    plan_doc = json.loads(Path(args.plan).read_text(encoding="utf-8"))
    plan = plan_from_dict(plan_doc, design, config)
    edited = apply_plan(design, plan, strategy=args.strategy)
    save_city(edited, args.out)
    print(canonical_json(validate_output(
        {"kind": "apply-result", "revision": edited.revision, "out": str(args.out)})))
    return 0


def cmd_synth_pop(args):
    spec_doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    spec = PopulationSpec.from_dict(spec_doc)
    population = generate_population(spec, args.seed)
    save_population(population, args.out)
    print(canonical_json(validate_output(
        {"kind": "synth-pop-result", "residents": len(population.residents),
         "types": len(population.types), "out": str(args.out)})))
    return 0


def cmd_scenario_run(args):
    """The full evaluate -> recommend -> apply -> evaluate loop on a
    bundled scenario, writing a before/after report."""
    t0 = time.time()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    design, population, config = scenario.load_scenario(args.name)
    save_city(design, out_dir / "city.json")
    save_population(population, out_dir / "population.json")

    before = _evaluate_doc(design, population, config, args.seed)
    constraints_doc = scenario.default_constraints_dict()
    if args.budget_fraction is not None:
        constraints_doc["budget_fraction"] = args.budget_fraction
    constraints = resolve_constraints(constraints_doc, design)
    plan = recommend(design, population, constraints, config, seed=args.seed)
    edited = apply_plan(design, plan.plan)
    save_city(edited, out_dir / "city_after.json")
    after = _evaluate_doc(edited, population, config, args.seed)

    plan_doc = {"schema_version": 1, "kind": "recommendation-plan", "revision": design.revision}
    plan_doc.update(plan.to_dict())
    (out_dir / "plan.json").write_text(canonical_json(validate_output(plan_doc)) + "\n", encoding="utf-8")
    (out_dir / "before.json").write_text(canonical_json(validate_output(before)) + "\n", encoding="utf-8")
    (out_dir / "after.json").write_text(canonical_json(validate_output(after)) + "\n", encoding="utf-8")

    reduction = None
    if before["inequality"] and after["inequality"]:
        reduction = 1.0 - after["inequality"]["total"] / before["inequality"]["total"]
    report = {
        "schema_version": 1,
        "kind": "scenario-report",
        "scenario": args.name,
        "seed": args.seed,
        "inequality_before": before["inequality"]["total"] if before["inequality"] else None,
        "inequality_after": after["inequality"]["total"] if after["inequality"] else None,
        "relative_reduction": reduction,
        "mean_benefit_before": before["mean_benefit"],
        "mean_benefit_after": after["mean_benefit"],
        "edited_blocks": sorted(plan.plan.deltas.keys()),
        "runtime_seconds": round(time.time() - t0, 3),
    }
    (out_dir / "report.json").write_text(canonical_json(validate_output(report)) + "\n", encoding="utf-8")
    print(canonical_json(report))
    return 0


def cmd_serve(args):
    from .service import serve

    serve(port=args.port, data_dir=args.data, ui_dir=args.ui)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairplan",
                                     description="fairness-aware neighborhood planning engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="simulate and print the indicator report")
    p.add_argument("--city", required=True)
    p.add_argument("--population", required=True)
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("allocate", help="run the allocation and write the result")
    p.add_argument("--city", required=True)
    p.add_argument("--population", required=True)
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("recommend", help="search for inequality-reducing edits")
    p.add_argument("--city", required=True)
    p.add_argument("--population", required=True)
    p.add_argument("--constraints", required=True, help="constraints JSON file")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("apply", help="materialize a plan's block deltas into building edits")
    p.add_argument("--city", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--config")
    p.add_argument("--strategy", default="uniform", choices=("uniform",))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("synth-pop", help="generate a synthetic population")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth_pop)

    p = sub.add_parser("scenario", help="bundled scenario workflows")
    scen_sub = p.add_subparsers(dest="scenario_command", required=True)
    run = scen_sub.add_parser("run", help="evaluate -> recommend -> apply -> evaluate")
    run.add_argument("--name", default=scenario.SCENARIO_NAME)
    run.add_argument("--out", required=True)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--budget-fraction", type=float, default=None)
    run.set_defaults(func=cmd_scenario_run)

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--data", default=None)
    p.add_argument("--ui", default=None, help="directory with the built dashboard to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FairplanError as exc:
        print(canonical_json(exc.to_dict()), file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(canonical_json({"code": "error", "message": str(exc), "details": {}}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
