import math

import numpy as np
import pytest

from dirreg.exceptions import RepresentationError
from dirreg.models.cones import DirectionKind, DirectionSet, PolyhedralCone
from dirreg.models.geometry import PointCloud, Polyhedron, PolytopeUnion
from dirreg.services.cones import (
    cone_membership,
    minimal_time,
    negate,
    point_minimal_time,
    project_onto_cone,
    support_over_cap,
)


def test_orthant_membership() -> None:
    orthant = PolyhedralCone.orthant(2)
    assert cone_membership(orthant, [1.0, 2.0])
    assert not cone_membership(orthant, [-1.0, 0.0])


def test_membership_through_generators_only() -> None:
    cone = PolyhedralCone.from_generators([[1.0, 1.0], [1.0, -1.0]])
    assert cone_membership(cone, [2.0, 0.0])
    assert not cone_membership(cone, [0.0, 1.0])


def test_inconsistent_representations_are_rejected() -> None:
    cone = PolyhedralCone(dimension=2, generators=np.eye(2), halfspaces=np.array([[1.0, -1.0]]))
    with pytest.raises(RepresentationError):
        cone_membership(cone, [1.0, 0.0])


def test_projection_examples() -> None:
    orthant = PolyhedralCone.orthant(2)
    np.testing.assert_allclose(project_onto_cone(orthant, [3.0, -2.0]), [3.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(project_onto_cone(orthant, [1.0, 4.0]), [1.0, 4.0], atol=1e-12)

    ray = PolyhedralCone.ray([1.0, 1.0])
    np.testing.assert_allclose(project_onto_cone(ray, [1.0, 0.0]), [0.5, 0.5], atol=1e-12)


def test_projection_is_orthogonal() -> None:
    cone = PolyhedralCone.from_halfspaces([[1.0, 2.0], [-1.0, 1.0]])
    rng = np.random.default_rng(7)
    for w in rng.normal(size=(20, 2)):
        p = project_onto_cone(cone, w)
        assert cone.contains(p, 1e-9)
        assert abs(float((w - p) @ p)) <= 1e-9
        np.testing.assert_allclose(project_onto_cone(cone, p), p, atol=1e-9)


def test_support_over_cap() -> None:
    orthant = PolyhedralCone.orthant(2)
    assert support_over_cap(PolyhedralCone.full(2), [3.0, 4.0]) == pytest.approx(5.0)
    assert support_over_cap(orthant, [-1.0, -1.0]) == pytest.approx(0.0, abs=1e-12)
    assert support_over_cap(orthant, [3.0, 4.0]) == pytest.approx(5.0)


def test_halfspace_cone_rays_cover_lineality() -> None:
    # {u : u_1 >= 0} is the right half-plane: rays e1 and +-e2
    cone = PolyhedralCone.from_halfspaces([[1.0, 0.0]])
    rays = cone.generator_matrix
    assert rays.shape[0] == 3
    for ray in ([1.0, 0.0], [0.0, 1.0], [0.0, -1.0]):
        assert np.min(np.linalg.norm(rays - ray, axis=1)) <= 1e-9


def test_polar_of_orthant_is_negative_orthant() -> None:
    polar = PolyhedralCone.orthant(2).polar()
    assert polar.contains([-1.0, -2.0])
    assert not polar.contains([1.0, -1.0])


def test_negate() -> None:
    sphere = DirectionSet.sphere(2)
    assert negate(sphere) is sphere

    flipped = negate(DirectionSet.finite([[1.0, 0.0]]))
    np.testing.assert_allclose(flipped.directions, [[-1.0, 0.0]])

    cap = DirectionSet.cap(PolyhedralCone.from_generators([[1.0, 0.0], [0.6, 0.8]]))
    twice = negate(negate(cap))
    assert twice.cone is not None and cap.cone is not None
    np.testing.assert_allclose(twice.cone.generator_matrix, cap.cone.generator_matrix)


def test_direction_set_validation() -> None:
    with pytest.raises(RepresentationError, match="unit norm"):
        DirectionSet.finite([[0.5, 0.0]])
    zero = PolyhedralCone.from_halfspaces(np.vstack([np.eye(2), -np.eye(2)]))
    with pytest.raises(RepresentationError):
        DirectionSet.cap(zero)


def test_convexity_of_direction_sets() -> None:
    assert DirectionSet.sphere(1).is_convex()
    assert DirectionSet.finite([[1.0]]).is_convex()
    assert not DirectionSet.finite([[1.0], [-1.0]]).is_convex()
    assert DirectionSet.from_cone(PolyhedralCone.full(2)).kind is DirectionKind.sphere


def test_minimal_time_conventions() -> None:
    sphere = DirectionSet.sphere(2)
    assert math.isinf(minimal_time(sphere, [0.0, 0.0], PointCloud.empty(2)).value)

    box = PolytopeUnion.single(Polyhedron.box([1.0, -1.0], [2.0, 1.0]))
    assert minimal_time(sphere, [1.5, 0.0], box).value == 0.0

    result = minimal_time(sphere, [0.0, 0.0], box)
    assert result.value == pytest.approx(1.0)
    np.testing.assert_allclose(result.attaining_direction, [1.0, 0.0], atol=1e-9)


def test_minimal_time_single_direction() -> None:
    right = DirectionSet.finite([[1.0, 0.0]])
    assert minimal_time(right, [0.0, 0.0], PointCloud.of([[3.0, 0.0]], 2)).value == pytest.approx(3.0)
    assert math.isinf(minimal_time(right, [0.0, 0.0], PointCloud.of([[3.0, 1.0]], 2)).value)

    box = PolytopeUnion.single(Polyhedron.box([1.0, -1.0], [2.0, 1.0]))
    assert minimal_time(right, [0.0, 0.5], box).value == pytest.approx(1.0, abs=1e-9)
    left = DirectionSet.finite([[-1.0, 0.0]])
    assert math.isinf(minimal_time(left, [0.0, 0.5], box).value)


def test_minimal_time_matches_box_distance() -> None:
    rng = np.random.default_rng(3)
    sphere = DirectionSet.sphere(2)
    for _ in range(25):
        lo = rng.uniform(-2.0, 1.0, size=2)
        hi = lo + rng.uniform(0.1, 2.0, size=2)
        x = rng.uniform(-3.0, 3.0, size=2)
        expected = float(np.linalg.norm(x - np.clip(x, lo, hi)))
        region = PolytopeUnion.single(Polyhedron.box(lo, hi))
        assert minimal_time(sphere, x, region).value == pytest.approx(expected, abs=1e-6)


def test_minimal_time_inside_a_cap() -> None:
    cap = DirectionSet.cap(PolyhedralCone.orthant(2))
    assert math.isinf(minimal_time(cap, [0.0, 0.0], PointCloud.of([[-1.0, 1.0]], 2)).value)
    assert minimal_time(cap, [0.0, 0.0], PointCloud.of([[1.0, 1.0]], 2)).value == pytest.approx(math.sqrt(2.0))

    halfplane = PolytopeUnion.single(Polyhedron.from_inequalities([[-1.0, 0.0]], [-1.0]))
    assert minimal_time(cap, [0.0, -1.0], halfplane).value == pytest.approx(1.0, abs=1e-7)

    diagonal = DirectionSet.cap(PolyhedralCone.ray([1.0, 1.0]))
    # first point of x_1 >= 1 on the diagonal ray from (0, -1) is (1, 0)
    assert minimal_time(diagonal, [0.0, -1.0], halfplane).value == pytest.approx(math.sqrt(2.0), abs=1e-7)


def test_point_minimal_time() -> None:
    up = DirectionSet.finite([[1.0]])
    assert point_minimal_time(up, np.array([0.0]), np.array([2.0])) == pytest.approx(2.0)
    assert math.isinf(point_minimal_time(up, np.array([0.0]), np.array([-2.0])))
    assert point_minimal_time(up, np.array([1.0]), np.array([1.0])) == 0.0


def random_polygon(rng: np.random.Generator) -> Polyhedron:
    angles = 2.0 * np.pi * np.arange(5) / 5 + rng.uniform(-0.3, 0.3, size=5)
    A = np.column_stack([np.cos(angles), np.sin(angles)])
    center = rng.uniform(-1.0, 1.0, size=2)
    return Polyhedron.from_inequalities(A, rng.uniform(0.5, 1.5, size=5) + A @ center)


def test_minimal_time_dominates_distance() -> None:
    rng = np.random.default_rng(11)
    sphere = DirectionSet.sphere(2)
    for trial in range(30):
        piece = random_polygon(rng)
        region = PolytopeUnion.single(piece)
        if trial % 2:
            L = DirectionSet.cap(PolyhedralCone.from_halfspaces(rng.normal(size=(2, 2))))
        else:
            raw = rng.normal(size=(3, 2))
            L = DirectionSet.finite(raw / np.linalg.norm(raw, axis=1, keepdims=True))
        for x in rng.uniform(-3.0, 3.0, size=(5, 2)):
            nearest = piece.nearest_point(x)
            assert nearest is not None
            distance = float(np.linalg.norm(x - nearest))
            assert minimal_time(sphere, x, region).value == pytest.approx(distance, abs=1e-6)
            assert minimal_time(L, x, region).value >= distance - 1e-6


@pytest.mark.parametrize("dim", [2, 3])
def test_support_vanishes_exactly_on_the_polar(dim: int) -> None:
    rng = np.random.default_rng(dim)
    for _ in range(40):
        cone = PolyhedralCone.from_generators(rng.normal(size=(int(rng.integers(1, dim + 2)), dim)))
        polar = cone.polar()
        for w in rng.normal(size=(10, dim)):
            assert (support_over_cap(cone, w) <= 1e-9) == cone_membership(polar, w)
        for ray in polar.generator_matrix:
            assert support_over_cap(cone, ray) == pytest.approx(0.0, abs=1e-9)
