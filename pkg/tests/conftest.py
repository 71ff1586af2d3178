from pathlib import Path
from typing import Callable

import pytest

from dirreg.models.cones import DirectionSet
from dirreg.models.neighborhood import NeighborhoodSpec, ProbeSpec

LINEAR_INSTANCE = """\
schema: 1
dimensions: {n: 1, m: 1}
map:
  kind: linear
  matrix: [[2.0]]
base_point: {x: [0.0], y: [0.0]}
L: {kind: sphere}
M: {kind: sphere}
rate: {c: 1.9, r: 1}
neighborhood:
  rho_x: 0.2
  rho_y: 0.3
  epsilon: 0.2
  t_count: 3
  grid_density: 5
"""


@pytest.fixture
def line() -> DirectionSet:
    return DirectionSet.sphere(1)


@pytest.fixture
def up() -> DirectionSet:
    return DirectionSet.finite([[1.0]])


@pytest.fixture
def down() -> DirectionSet:
    return DirectionSet.finite([[-1.0]])


@pytest.fixture
def small_spec() -> NeighborhoodSpec:
    return NeighborhoodSpec.geometric(0.2, 0.3, 0.2, count=3, grid_density=5)


@pytest.fixture
def small_probe() -> ProbeSpec:
    return ProbeSpec(scales=(0.1, 0.05), search_steps=8, bisection_steps=20)


@pytest.fixture
def write_instance(tmp_path: Path) -> Callable[[str], Path]:
    def write(text: str, name: str = "instance.yaml") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
