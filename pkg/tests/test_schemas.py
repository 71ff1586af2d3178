from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from dirreg.exceptions import InstanceError
from dirreg.models.cones import DirectionKind
from dirreg.models.maps import LinearMap, SampledGraph, SquareMap
from dirreg.models.rates import PowerRate
from dirreg.schemas import (
    build_directions,
    build_map,
    build_neighborhood,
    build_rate,
    ekeland_points,
    parse_instance,
    parse_text,
    serialize_instance,
)
from tests.conftest import LINEAR_INSTANCE

SQUARE_INSTANCE = """\
schema: 1
dimensions: {n: 1, m: 1}
map: {kind: catalog, name: square}
base_point: {x: [0.0], y: [0.0]}
L: {kind: sphere}
M: {kind: finite, directions: [[1.0]]}
rate: {c: 0.9, r: 2}
"""


def test_parse_linear_instance() -> None:
    inst = parse_text(LINEAR_INSTANCE)
    assert inst.schema_version == 1
    assert isinstance(build_map(inst), LinearMap)
    L, M = build_directions(inst)
    assert L.kind is DirectionKind.sphere and M.dimension == 1
    assert build_rate(inst) == PowerRate(c=1.9, r=1.0)

    hood = build_neighborhood(inst, seed=3)
    assert hood.t_values == pytest.approx((0.1, 0.05, 0.025))
    assert hood.grid_density == 5
    assert hood.seed == 3


def test_square_instance_round_trips() -> None:
    inst = parse_text(SQUARE_INSTANCE)
    assert isinstance(build_map(inst), SquareMap)
    _, M = build_directions(inst)
    assert M.kind is DirectionKind.finite
    assert parse_text(serialize_instance(inst)) == inst


def test_non_unit_direction_names_line_and_direction() -> None:
    text = SQUARE_INSTANCE.replace("directions: [[1.0]]", "directions: [[0.5]]")
    with pytest.raises(InstanceError) as raised:
        parse_text(text)
    assert raised.value.detail.startswith("line 6:")
    assert "direction 0" in raised.value.detail


def test_unknown_key_is_reported() -> None:
    with pytest.raises(InstanceError) as raised:
        parse_text(LINEAR_INSTANCE + "  bogus: 1\n")
    assert "line 16" in raised.value.detail
    assert "neighborhood.bogus" in raised.value.detail


def test_dimension_mismatch_is_reported() -> None:
    text = LINEAR_INSTANCE.replace("base_point: {x: [0.0], y: [0.0]}", "base_point: {x: [0.0, 1.0], y: [0.0]}")
    with pytest.raises(InstanceError, match=r"line 6: base_point\.x: expected 1 entries, got 2"):
        parse_text(text)


def test_only_schema_one_is_accepted() -> None:
    with pytest.raises(InstanceError, match="line 1: schema"):
        parse_text(LINEAR_INSTANCE.replace("schema: 1", "schema: 2"))


@pytest.mark.parametrize(
    "text, message",
    [
        ("schema: [1\n", "not valid YAML"),
        ("- 1\n- 2\n", "must be a mapping"),
        (LINEAR_INSTANCE.replace("rate: {c: 1.9, r: 1}", "rate: {r: 1}"), "either 'c'"),
        (LINEAR_INSTANCE.replace("  t_count: 3\n", "  t_values: [0.1, 0.3]\n"), "t values must decrease"),
    ],
)
def test_invalid_instances(text: str, message: str) -> None:
    with pytest.raises(InstanceError, match=message):
        parse_text(text)


def test_points_files_are_read_relative_to_the_instance(write_instance: Callable[..., Path]) -> None:
    path = write_instance(
        """\
schema: 1
dimensions: {n: 1, m: 1}
map: {kind: sampled_graph, points_file: graph.csv, resolution: 0.01}
base_point: {x: [0.0], y: [0.0]}
L: {kind: sphere}
M: {kind: sphere}
ekeland: {points_file: omega.csv, start: 0, epsilon: 0.5}
"""
    )
    (path.parent / "graph.csv").write_text("x,y\n0,0\n1,1\n\n2,4\n", encoding="utf-8")
    (path.parent / "omega.csv").write_text("x,y,f\n0,0,2\n1,0,0.5\n", encoding="utf-8")

    inst = parse_instance(path)
    F = build_map(inst, path.parent)
    assert isinstance(F, SampledGraph)
    np.testing.assert_allclose(F.points, [[0.0, 0.0], [1.0, 1.0], [2.0, 4.0]])

    points, values = ekeland_points(inst, path.parent)
    np.testing.assert_allclose(points, [[0.0, 0.0], [1.0, 0.0]])
    np.testing.assert_allclose(values, [2.0, 0.5])


def test_commands_need_their_sections() -> None:
    inst = parse_text(SQUARE_INSTANCE)
    with pytest.raises(InstanceError, match="neighborhood"):
        build_neighborhood(inst, seed=0)
    with pytest.raises(InstanceError, match="ekeland"):
        ekeland_points(inst)


def test_unknown_catalog_parameter_is_reported() -> None:
    text = SQUARE_INSTANCE.replace("name: square}", "name: square, params: {slope: 2.0}}")
    with pytest.raises(InstanceError, match=r"line 3: map\.params\.slope: catalog map 'square' takes no parameter 'slope'"):
        parse_text(text)


def test_missing_catalog_parameter_is_reported() -> None:
    text = SQUARE_INSTANCE.replace("name: square}", "name: epigraph}")
    with pytest.raises(InstanceError, match=r"line 3: map\.params: catalog map 'epigraph' needs a"):
        parse_text(text)
