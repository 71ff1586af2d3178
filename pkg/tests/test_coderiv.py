import numpy as np
import pytest

from dirreg.exceptions import ScopeError
from dirreg.models.cones import DirectionSet
from dirreg.models.geometry import Polyhedron, PolytopeUnion
from dirreg.models.maps import BasePoint, SquareMap
from dirreg.models.neighborhood import NeighborhoodSpec
from dirreg.models.normals import NormalKind
from dirreg.services.coderiv import (
    check_criterion,
    coderivative,
    criterion_bracket,
    directional_tangent_cone,
    limiting_normal_cone,
    regular_normal_cone,
)
from dirreg.services.maps import abs_graph, catalog, piecewise_linearize

ORIGIN = BasePoint.of([0.0], [0.0])


def test_regular_normal_cone_of_abs_graph(line: DirectionSet) -> None:
    normal = regular_normal_cone(abs_graph().region, [0.0, 0.0], line, line)
    assert normal.kind is NormalKind.regular
    assert normal.contains(np.array([0.0, -1.0]))
    assert normal.contains(np.array([1.0, -2.0]))
    assert not normal.contains(np.array([0.0, 1.0]))
    assert not normal.contains(np.array([1.0, 1.0]))


def test_limiting_normal_cone_adds_branch_normals(line: DirectionSet) -> None:
    normal = limiting_normal_cone(abs_graph().region, [0.0, 0.0], line, line)
    assert len(normal.cones) >= 2
    # normals of the right branch and of the left branch
    assert normal.contains(np.array([-1.0, 1.0]))
    assert normal.contains(np.array([1.0, 1.0]))
    assert not normal.contains(np.array([0.0, 1.0]))


def test_limiting_normal_cone_only_enters_admissible_faces(up: DirectionSet, line: DirectionSet) -> None:
    normal = limiting_normal_cone(abs_graph().region, [0.0, 0.0], up, line)
    assert normal.contains(np.array([-1.0, 1.0]))
    assert normal.contains(np.array([-1.0, -1.0]))
    assert not normal.contains(np.array([1.0, 1.0]))


def test_normal_cone_at_interior_point_is_trivial(line: DirectionSet) -> None:
    box = PolytopeUnion.single(Polyhedron.box([-1.0, -1.0], [1.0, 1.0]))
    normal = regular_normal_cone(box, [0.0, 0.0], line, line)
    assert normal.cone.is_trivial()


def test_normal_cone_of_halfplane(line: DirectionSet) -> None:
    halfplane = PolytopeUnion.single(Polyhedron.from_inequalities([[0.0, -1.0]], [0.0]))
    normal = regular_normal_cone(halfplane, [0.0, 0.0], line, line)
    assert normal.contains(np.array([0.0, -3.0]))
    assert not normal.contains(np.array([1.0, -1.0]))
    assert not normal.contains(np.array([0.0, 1.0]))


def test_tangent_cone_of_halfplane(line: DirectionSet, up: DirectionSet) -> None:
    halfplane = PolytopeUnion.single(Polyhedron.from_inequalities([[0.0, -1.0]], [0.0]))

    def tangent(d: list[float], L: DirectionSet) -> bool:
        return any(cone.contains(np.array(d)) for cone in directional_tangent_cone(halfplane, [0.0, 0.0], L, line))

    assert tangent([1.0, 0.0], line)
    assert tangent([-1.0, 2.0], line)
    assert not tangent([0.0, -1.0], line)
    assert not tangent([-1.0, 2.0], up)
    assert tangent([1.0, 2.0], up)


def test_point_off_the_set_is_rejected(line: DirectionSet) -> None:
    with pytest.raises(ValueError):
        regular_normal_cone(abs_graph().region, [0.0, 1.0], line, line)


def test_coderivative_of_linear_map(line: DirectionSet) -> None:
    F = catalog("linear", matrix=[[2.0]])
    slice_ = coderivative(F, ORIGIN, line, line, [1.0], kind="regular")
    assert not slice_.is_empty()
    assert slice_.contains(np.array([2.0]))
    assert not slice_.contains(np.array([1.0]))


def test_coderivative_needs_a_polyhedral_graph(line: DirectionSet) -> None:
    with pytest.raises(ScopeError):
        coderivative(SquareMap(), ORIGIN, line, line, [1.0])


def test_criterion_on_identity(line: DirectionSet) -> None:
    F = catalog("linear", matrix=[[1.0]])
    passing = check_criterion(F, ORIGIN, line, line, 0.9, rho=0.1, density=5, y_count=8)
    assert passing.passed
    assert passing.min_slack == pytest.approx(0.1, abs=1e-6)

    failing = check_criterion(F, ORIGIN, line, line, 1.1, rho=0.1, density=5, y_count=8)
    assert not failing.passed
    assert failing.min_slack == pytest.approx(-0.1, abs=1e-6)
    assert failing.worst is not None
    assert failing.worst.slack == failing.min_slack


def test_criterion_rejects_nonconvex_cones(line: DirectionSet) -> None:
    F = catalog("linear", matrix=[[1.0]])
    both = DirectionSet.finite([[1.0], [-1.0]])
    with pytest.raises(ScopeError):
        check_criterion(F, ORIGIN, both, line, 0.5, rho=0.1)
    with pytest.raises(ValueError):
        check_criterion(F, ORIGIN, line, line, -1.0, rho=0.1)


def test_criterion_bracket_is_consistent_on_identity(line: DirectionSet, small_spec: NeighborhoodSpec) -> None:
    F = catalog("linear", matrix=[[1.0]])
    bracket = criterion_bracket(F, ORIGIN, line, line, small_spec)
    assert bracket.estimate.c_lo <= 1.0 <= bracket.estimate.c_hi
    assert bracket.below.passed
    assert bracket.above is not None and not bracket.above.passed
    assert bracket.consistent


def test_criterion_bracket_on_an_anisotropic_linear_map() -> None:
    plane = DirectionSet.sphere(2)
    spec = NeighborhoodSpec.geometric(0.2, 0.5, 0.2, count=2, grid_density=3, direction_count=8)
    F = catalog("linear", matrix=[[2.0, 0.0], [0.0, 1.0]])
    bracket = criterion_bracket(F, BasePoint.of([0.0, 0.0], [0.0, 0.0]), plane, plane, spec)
    # the smallest singular value
    assert bracket.estimate.c_lo <= 1.0 <= bracket.estimate.c_hi
    assert bracket.below.min_slack > 0
    assert bracket.consistent


def test_criterion_bracket_on_abs(line: DirectionSet, up: DirectionSet, small_spec: NeighborhoodSpec) -> None:
    bracket = criterion_bracket(catalog("abs"), ORIGIN, line, up, small_spec)
    assert bracket.estimate.c_lo <= 1.0 <= bracket.estimate.c_hi
    assert bracket.below.min_slack == pytest.approx(1.0 - bracket.below.c, abs=1e-6)
    assert bracket.above is not None and not bracket.above.passed
    assert bracket.consistent


@pytest.mark.parametrize("c", [0.05, 0.5])
def test_square_surrogate_fails_the_criterion(line: DirectionSet, up: DirectionSet, c: float) -> None:
    surrogate = piecewise_linearize(SquareMap())
    report = check_criterion(surrogate, ORIGIN, line, up, c, rho=0.1, density=5, y_count=8)
    assert not report.passed
    # flat middle piece: x* = 0 against y* = -1
    assert report.min_slack == pytest.approx(-c, abs=1e-6)


def normal_cone_cases() -> list[tuple[PolytopeUnion, list[float], DirectionSet, DirectionSet]]:
    line, up = DirectionSet.sphere(1), DirectionSet.finite([[1.0]])
    box = PolytopeUnion.single(Polyhedron.box([-1.0, -1.0], [1.0, 1.0]))
    graph = abs_graph().region
    return [
        (graph, [0.0, 0.0], line, line),
        (graph, [0.0, 0.0], up, line),
        (graph, [0.0, 0.0], line, up),
        (graph, [0.5, 0.5], line, up),
        (box, [1.0, 1.0], line, line),
        (box, [1.0, 0.0], up, line),
    ]


@pytest.mark.parametrize("region, p, L, M", normal_cone_cases())
def test_regular_normal_cone_is_polar_to_the_tangent_cone(
    region: PolytopeUnion, p: list[float], L: DirectionSet, M: DirectionSet
) -> None:
    rng = np.random.default_rng(5)
    tangents = directional_tangent_cone(region, p, L, M)
    normal = regular_normal_cone(region, p, L, M)
    for w in rng.normal(size=(50, 2)):
        w = w / np.linalg.norm(w)
        polar = all(bool(np.all(cone.generator_matrix @ w <= 1e-9)) for cone in tangents)
        assert normal.cone.contains(w) == polar


@pytest.mark.parametrize("region, p, L, M", normal_cone_cases())
def test_regular_normals_are_limiting_normals(
    region: PolytopeUnion, p: list[float], L: DirectionSet, M: DirectionSet
) -> None:
    regular = regular_normal_cone(region, p, L, M)
    limiting = limiting_normal_cone(region, p, L, M)
    for ray in regular.cone.generator_matrix:
        assert limiting.contains(ray)


@pytest.mark.parametrize("name, params", [("linear", {"matrix": [[1.0]]}), ("linear", {"matrix": [[2.0]]}), ("abs", {})])
def test_shrinking_M_keeps_the_criterion(name: str, params: dict[str, object], line: DirectionSet, up: DirectionSet) -> None:
    F = catalog(name, **params)
    for c in (0.5, 0.9, 1.1, 1.9, 2.1):
        wide = check_criterion(F, ORIGIN, line, line, c, rho=0.1, density=5, y_count=8)
        narrow = check_criterion(F, ORIGIN, line, up, c, rho=0.1, density=5, y_count=8)
        assert narrow.passed or not wide.passed
