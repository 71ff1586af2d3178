import numpy as np
import pytest

from dirreg.exceptions import ScopeError
from dirreg.models.cones import DirectionSet
from dirreg.models.geometry import PointCloud
from dirreg.models.maps import LinearMap, SampledGraph, SquareMap
from dirreg.services.maps import (
    abs_graph,
    catalog,
    directional_ball_image,
    graph_contains,
    inverse,
    piecewise_linearize,
    require_polyhedral,
    values_at,
)


def test_linear_graph_membership() -> None:
    F = catalog("linear", matrix=[[1.0, 0.0], [0.0, 1.0]])
    assert graph_contains(F, [1.0, 2.0, 1.0, 2.0])
    assert not graph_contains(F, [1.0, 2.0, 1.0, 3.0])
    with pytest.raises(ValueError):
        graph_contains(F, [1.0, 2.0])


def test_sampled_graph_membership_within_resolution() -> None:
    F = SampledGraph(n=1, m=1, points=np.array([[0.0, 0.0], [1.0, 1.0]]), resolution=0.1)
    assert graph_contains(F, [0.05, 0.0])
    assert not graph_contains(F, [0.5, 0.5])


def test_inverse_of_invertible_linear_map() -> None:
    F = LinearMap(matrix=np.array([[2.0, 0.0], [0.0, 4.0]]))
    G = inverse(F)
    assert isinstance(G, LinearMap)
    np.testing.assert_allclose(G.matrix, np.diag([0.5, 0.25]))
    assert graph_contains(G, [2.0, 4.0, 1.0, 1.0])


def test_inverse_swaps_coordinates() -> None:
    F = SampledGraph(n=1, m=1, points=np.array([[0.0, 1.0], [2.0, 3.0]]), resolution=0.1)
    G = inverse(F)
    assert isinstance(G, SampledGraph)
    np.testing.assert_allclose(G.points, [[1.0, 0.0], [3.0, 2.0]])

    H = abs_graph()
    for p in ([1.0, 1.0], [-1.0, 1.0], [0.5, 0.2]):
        assert H.graph_contains(np.array(p)) == H.inverse().graph_contains(np.array(p[::-1]))
    square = SquareMap()
    assert inverse(inverse(square)) is square


def test_square_preimages() -> None:
    G = inverse(SquareMap())
    np.testing.assert_allclose(np.sort(G.values_at(np.array([4.0])).points[:, 0]), [-2.0, 2.0])
    assert G.values_at(np.array([-1.0])).is_empty()
    np.testing.assert_allclose(G.values_at(np.array([0.0])).points, [[0.0]])


def test_values_at() -> None:
    F = catalog("linear", matrix=[[2.0, 1.0]])
    np.testing.assert_allclose(values_at(F, [1.0, 1.0]).points, [[3.0]])

    epigraph = catalog("epigraph", a=[1.0])
    region = values_at(epigraph, [2.0])
    assert region.contains([2.0]) and region.contains([10.0])
    assert not region.contains([1.9])

    sampled = SampledGraph(n=1, m=1, points=np.array([[0.0, 0.0], [1.0, 1.0]]), resolution=0.1)
    assert values_at(sampled, [0.5]).is_empty()
    with pytest.raises(ValueError):
        values_at(F, [1.0])


def test_directional_ball_image_of_identity() -> None:
    F = catalog("linear", matrix=[[1.0]])
    image = directional_ball_image(F, [0.0], 1.0, DirectionSet.finite([[1.0]]))
    assert isinstance(image, PointCloud)
    values = image.points[:, 0]
    assert values.min() == pytest.approx(0.0)
    assert values.max() < 1.0


def test_directional_ball_image_of_square() -> None:
    F = SquareMap()
    t = 0.5
    open_image = directional_ball_image(F, [0.0], t, DirectionSet.sphere(1)).points[:, 0]
    closed_image = directional_ball_image(F, [0.0], t, DirectionSet.sphere(1), closed=True).points[:, 0]
    assert open_image.min() == pytest.approx(0.0)
    assert open_image.max() < t * t
    assert closed_image.max() == pytest.approx(t * t)


def test_directional_ball_image_of_linear_map() -> None:
    F = catalog("linear", matrix=[[2.0]])
    values = directional_ball_image(F, [0.0], 1.0, DirectionSet.sphere(1)).points[:, 0]
    assert -2.0 < values.min() < -1.8
    assert 1.8 < values.max() < 2.0


def test_sampled_image_is_exact_over_samples() -> None:
    points = np.array([[-0.5, 1.0], [0.2, 2.0], [0.9, 3.0], [1.5, 4.0]])
    F = SampledGraph(n=1, m=1, points=points, resolution=0.05)
    image = directional_ball_image(F, [0.0], 1.0, DirectionSet.finite([[1.0]]))
    np.testing.assert_allclose(np.sort(image.points[:, 0]), [2.0, 3.0])


def test_catalog_and_polyhedral_scope() -> None:
    with pytest.raises(ScopeError, match="unknown catalog map"):
        catalog("cube")
    with pytest.raises(ScopeError, match="not polyhedral"):
        require_polyhedral(SquareMap())
    assert require_polyhedral(abs_graph()).n == 1


def test_piecewise_linear_square() -> None:
    surrogate = piecewise_linearize(SquareMap(), knots=4, spacing=0.1)
    assert surrogate.graph_contains(np.array([0.0, 0.0]))
    assert surrogate.graph_contains(np.array([0.1, 0.01]))
    assert surrogate.graph_contains(np.array([-0.2, 0.04]))
    # between knots the surrogate lies below the parabola
    assert surrogate.graph_contains(np.array([0.05, 0.0]))
    assert not surrogate.graph_contains(np.array([0.05, 0.0025]))


def test_product_map() -> None:
    F = catalog("product", first={"name": "linear", "matrix": [[2.0]]}, second={"name": "square"})
    assert (F.n, F.m) == (2, 2)
    assert graph_contains(F, [1.0, 3.0, 2.0, 9.0])
    graph = piecewise_linearize(F)
    assert graph.graph_contains(np.array([1.0, 0.1, 2.0, 0.01]))
