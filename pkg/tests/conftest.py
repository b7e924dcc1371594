import json
import shutil
from pathlib import Path

import pytest

from corridor_planner.scenario_io import load_scenario, load_world_and_grid

REPO_ROOT = Path(__file__).resolve().parents[1]
DEMO_DIR = REPO_ROOT / "worlds" / "demo"


@pytest.fixture(scope="session")
def demo_dir() -> Path:
    return DEMO_DIR


@pytest.fixture(scope="session")
def demo_world_and_grid():
    return load_world_and_grid(DEMO_DIR / "world.json")


@pytest.fixture(scope="session")
def demo_world(demo_world_and_grid):
    return demo_world_and_grid[0]


@pytest.fixture(scope="session")
def demo_grid(demo_world_and_grid):
    return demo_world_and_grid[1]


@pytest.fixture(scope="session")
def demo_scenario(demo_world):
    return load_scenario(DEMO_DIR / "scenario.json", demo_world)


@pytest.fixture(scope="session")
def bench_scenario(demo_world):
    return load_scenario(DEMO_DIR / "scenario_bench.json", demo_world)


@pytest.fixture()
def demo_copy(tmp_path) -> Path:
    """A mutable copy of the demo world directory; returns the world.json path."""
    target = tmp_path / "demo"
    target.mkdir()
    for name in ("world.json", "plant.pgm", "scenario.json", "scenario_bench.json"):
        shutil.copy(DEMO_DIR / name, target / name)
    return target / "world.json"


def mutate_world(world_path: Path, mutate) -> Path:
    """Apply an in-place JSON mutation to a copied world file."""
    doc = json.loads(world_path.read_text())
    mutate(doc)
    world_path.write_text(json.dumps(doc, indent=2) + "\n")
    return world_path
