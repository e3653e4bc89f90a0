import numpy as np
import pytest

from fairplan import scenario
from fairplan.benefit import Population, ResidentProfile, ResidentType
from fairplan.model import Building, CityDesign

_ACCEPTANCE_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: spec acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "acceptance" in getattr(report, "keywords", {}):
        _ACCEPTANCE_RESULTS.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _ACCEPTANCE_RESULTS:
        flag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{flag}] {name}")


@pytest.fixture(scope="session")
def bundled():
    """(design, population, config) of the bundled mini-city."""
    return scenario.load_scenario()


@pytest.fixture(scope="session")
def mini_design(bundled):
    return bundled[0]


@pytest.fixture(scope="session")
def mini_population(bundled):
    return bundled[1]


@pytest.fixture(scope="session")
def mini_config(bundled):
    return bundled[2]


def square(x, y, side=20.0):
    return ((x, y), (x + side, y), (x + side, y + side), (x, y + side))


def make_building(bid, block_id, x, y, floors=5, side=20.0, **areas):
    return Building(
        id=bid,
        block_id=block_id,
        footprint=square(x, y, side),
        floors=floors,
        floor_areas={k: float(v) for k, v in areas.items()},
    )


@pytest.fixture
def two_building_design():
    b1 = make_building("home", "blk-1", 0, 0, Residential=1200.0)
    b2 = make_building("shop", "blk-2", 300, 0, Commercial=1000.0)
    return CityDesign.from_buildings([b1, b2])


def tiny_population(n_per_type=5, types=("a", "b"), prior=0.0, seed=0):
    """Small synthetic population with uniform-ish preferences."""
    rng = np.random.default_rng(seed)
    fts = ("Office", "Commercial", "Cultural", "Educational", "Park")
    type_objs = []
    residents = []
    for ti, t in enumerate(types):
        raw = rng.random(len(fts)) + 0.2
        mean_prefs = raw / raw.sum()
        type_objs.append(ResidentType(id=t, name=t, mean_preferences=dict(zip(fts, mean_prefs))))
        for i in range(n_per_type):
            raw = mean_prefs + 0.05 * rng.random(len(fts))
            prefs = raw / raw.sum()
            residents.append(
                ResidentProfile(
                    id=f"{t}-{i}",
                    type_id=t,
                    preferences=dict(zip(fts, prefs)),
                    prior_utility=float(prior + rng.normal(0, 1)),
                )
            )
    return Population(types=tuple(type_objs), residents=tuple(residents))


def random_small_city(rng, n_blocks=3, buildings_per_block=3):
    """Random compact design for property tests: every block gets one
    residential building plus amenity mass."""
    fts = ("Office", "Commercial", "Cultural", "Educational", "Park")
    buildings = []
    for k in range(n_blocks):
        bx, by = 250.0 * k, 0.0
        buildings.append(
            make_building(f"res-{k}", f"blk-{k}", bx, by, floors=6, Residential=900.0 + 300.0 * rng.random())
        )
        for j in range(buildings_per_block - 1):
            f = fts[int(rng.integers(len(fts)))]
            buildings.append(
                make_building(
                    f"b-{k}-{j}", f"blk-{k}", bx + 40.0 * (j + 1), by + 60.0, floors=6,
                    **{f: float(2000.0 + 3000.0 * rng.random())},
                )
            )
    return CityDesign.from_buildings(buildings)
