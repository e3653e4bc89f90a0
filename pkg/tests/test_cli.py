import json

import pytest

from fairplan.cli import main
from fairplan.store import load_city, save_city, save_population

from fairplan import scenario


@pytest.fixture(scope="module")
def scenario_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    design, population, config = scenario.load_scenario()
    city = root / "city.json"
    pop = root / "pop.json"
    save_city(design, city)
    save_population(population, pop)
    cfg = root / "config.json"
    from fairplan.store import save_config

    save_config(config, cfg)
    return {"city": str(city), "population": str(pop), "config": str(cfg), "root": root}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_evaluate_deterministic_stdout(scenario_files, capsys):
    args = ("evaluate", "--city", scenario_files["city"], "--population", scenario_files["population"],
            "--config", scenario_files["config"], "--seed", "3")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["kind"] == "indicator-report"
    assert doc["inequality"]["total"] > 0
    assert doc["allocated"] == 480


def test_evaluate_table_format(scenario_files, capsys):
    code, out, _ = run(capsys, "evaluate", "--city", scenario_files["city"],
                       "--population", scenario_files["population"],
                       "--config", scenario_files["config"], "--format", "table")
    assert code == 0
    assert "inequality total" in out
    assert "outdoor" in out


def test_allocate_writes_result(scenario_files, capsys, tmp_path):
    out_file = tmp_path / "alloc.json"
    code, _, _ = run(capsys, "allocate", "--city", scenario_files["city"],
                     "--population", scenario_files["population"],
                     "--config", scenario_files["config"], "--seed", "1",
                     "--out", str(out_file))
    assert code == 0
    doc = json.loads(out_file.read_text())
    assert doc["kind"] == "allocation-result"
    assert doc["seed"] == 1
    assert len(doc["probability_matrix"]) == 600
    assigned = [v for v in doc["assignments"].values() if v is not None]
    assert len(assigned) == 480


def test_recommend_budget_zero_zero_plan(scenario_files, capsys, tmp_path):
    constraints = tmp_path / "cons.json"
    constraints.write_text(json.dumps({"budget": 0.0, "residential_change_cap": 0.0}))
    out_file = tmp_path / "plan.json"
    code, _, _ = run(capsys, "recommend", "--city", scenario_files["city"],
                     "--population", scenario_files["population"],
                     "--config", scenario_files["config"],
                     "--constraints", str(constraints), "--out", str(out_file))
    assert code == 0
    doc = json.loads(out_file.read_text())
    assert doc["kind"] == "recommendation-plan"
    assert doc["plan"]["deltas"] == {}
    assert doc["plan"]["no_improvement"] is True


def test_recommend_apply_loop(scenario_files, capsys, tmp_path):
    constraints = tmp_path / "cons.json"
    constraints.write_text(json.dumps(scenario.default_constraints_dict()))
    plan_file = tmp_path / "plan.json"
    code, _, _ = run(capsys, "recommend", "--city", scenario_files["city"],
                     "--population", scenario_files["population"],
                     "--config", scenario_files["config"],
                     "--constraints", str(constraints), "--seed", "0", "--out", str(plan_file))
    assert code == 0
    city2 = tmp_path / "city2.json"
    code, out, _ = run(capsys, "apply", "--city", scenario_files["city"], "--plan", str(plan_file),
                       "--config", scenario_files["config"], "--out", str(city2))
    assert code == 0
    edited = load_city(city2)
    assert edited.revision == 1
    plan_doc = json.loads(plan_file.read_text())
    assert plan_doc["simulated_inequality_after"] < plan_doc["simulated_inequality_before"]


def test_synth_pop(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "types": [
            {"id": "a", "name": "A", "preferences": {"Park": 0.6, "Office": 0.4}, "count": 10},
            {"id": "b", "name": "B", "preferences": {"Commercial": 1.0}, "count": 5},
        ],
        "dirichlet_concentration": 40.0,
        "prior_utility": {"distribution": "uniform", "low": 10.0, "high": 20.0},
    }))
    out_file = tmp_path / "pop.json"
    code, out, _ = run(capsys, "synth-pop", "--spec", str(spec), "--seed", "2", "--out", str(out_file))
    assert code == 0
    doc = json.loads(out_file.read_text())
    assert len(doc["residents"]) == 15
    # determinism: regenerate and compare bytes
    first = out_file.read_bytes()
    code, _, _ = run(capsys, "synth-pop", "--spec", str(spec), "--seed", "2", "--out", str(out_file))
    assert out_file.read_bytes() == first


def test_scenario_run_reduces_inequality(capsys, tmp_path):
    out_dir = tmp_path / "run"
    code, out, _ = run(capsys, "scenario", "run", "--name", scenario.SCENARIO_NAME,
                       "--out", str(out_dir), "--seed", "0")
    assert code == 0
    report = json.loads((out_dir / "report.json").read_text())
    assert report["relative_reduction"] >= 0.30
    for name in ("city.json", "population.json", "city_after.json", "plan.json",
                 "before.json", "after.json"):
        assert (out_dir / name).exists()


def test_output_schema_validation():
    from fairplan.cli import validate_output

    import pytest as _pytest

    with _pytest.raises(ValueError, match="unknown output kind"):
        validate_output({"kind": "mystery"})
    with _pytest.raises(ValueError, match="missing keys"):
        validate_output({"kind": "apply-result", "revision": 1})
    doc = {"kind": "apply-result", "revision": 1, "out": "x.json"}
    assert validate_output(doc) is doc


def test_config_env_var_is_honored(scenario_files, capsys, monkeypatch):
    monkeypatch.setenv("FAIRPLAN_CONFIG", scenario_files["config"])
    code1, out1, _ = run(capsys, "evaluate", "--city", scenario_files["city"],
                         "--population", scenario_files["population"], "--seed", "3")
    assert code1 == 0
    # same as passing --config explicitly
    code2, out2, _ = run(capsys, "evaluate", "--city", scenario_files["city"],
                         "--population", scenario_files["population"],
                         "--config", scenario_files["config"], "--seed", "3")
    assert out1 == out2
    # and different from the built-in defaults (scenario config sets priorities)
    monkeypatch.delenv("FAIRPLAN_CONFIG")
    code3, out3, _ = run(capsys, "evaluate", "--city", scenario_files["city"],
                         "--population", scenario_files["population"], "--seed", "3")
    assert code3 == 0
    assert out3 != out1


def test_missing_file_structured_error(capsys):
    code, out, err = run(capsys, "evaluate", "--city", "/nope/city.json",
                         "--population", "/nope/pop.json")
    assert code == 1
    doc = json.loads(err)
    assert doc["code"] == "not-found"


def test_unknown_scenario_errors(capsys, tmp_path):
    code, _, err = run(capsys, "scenario", "run", "--name", "atlantis", "--out", str(tmp_path))
    assert code == 1
