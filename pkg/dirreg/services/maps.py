import logging
from typing import Any, Callable, Sequence

import numpy as np

from dirreg.config import BOUNDARY_SLACK, GRID_DENSITY, MEMBERSHIP_TOL
from dirreg.exceptions import ScopeError
from dirreg.models.cones import DirectionSet
from dirreg.models.geometry import PointCloud, Polyhedron, PolytopeUnion, Region, as_vector
from dirreg.models.maps import (
    EpigraphMap,
    InverseMap,
    LinearMap,
    MapKind,
    PolyhedralGraph,
    ProductMap,
    SampledGraph,
    SetValuedMap,
    SquareMap,
)
from dirreg.services.utils.sampling import box_grid, unique_rows

logger = logging.getLogger(__name__)


def graph_contains(F: SetValuedMap, p: Sequence[float] | np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
    p = as_vector(p)
    if p.shape[0] != F.n + F.m:
        raise ValueError(f"graph point needs {F.n + F.m} coordinates, got {p.shape[0]}")
    return F.graph_contains(p, tol)


def inverse(F: SetValuedMap) -> SetValuedMap:
    return F.inverse()


def values_at(F: SetValuedMap, x: Sequence[float] | np.ndarray) -> Region:
    x = as_vector(x)
    if x.shape[0] != F.n:
        raise ValueError(f"argument needs {F.n} coordinates, got {x.shape[0]}")
    return F.values_at(x)


def admissible_points(
    x: np.ndarray,
    t: float,
    L: DirectionSet,
    closed: bool,
    density: int = GRID_DENSITY,
) -> np.ndarray:
    """Grid of B(x, t) intersected with x + cone L, together with samples along the directions of L."""
    limit = t * (1.0 + BOUNDARY_SLACK) if closed else t * (1.0 - BOUNDARY_SLACK)
    candidates = [p for p in box_grid(x, t, density) if np.linalg.norm(p - x) <= limit and L.cone_contains(p - x)]

    steps = np.linspace(0.0, 1.0, density)[1:]
    if not closed:
        steps = steps[:-1]
    for u in L.sample():
        candidates.extend(x + s * t * u for s in steps)

    return unique_rows(np.array(candidates).reshape(-1, x.shape[0]))


def directional_ball_image(
    F: SetValuedMap,
    x: Sequence[float] | np.ndarray,
    t: float,
    L: DirectionSet,
    closed: bool = False,
    density: int = GRID_DENSITY,
) -> Region:
    """F(B(x, t) intersected with x + cone L); exact over the samples of a sampled graph."""
    if t <= 0:
        raise ValueError("ball radius must be positive")
    x = as_vector(x)

    if isinstance(F, SampledGraph):
        delta = F.points[:, : F.n] - x
        dist = np.linalg.norm(delta, axis=1)
        inside = dist <= t * (1.0 + BOUNDARY_SLACK) if closed else dist < t
        admissible = np.array([inside[i] and L.cone_contains(delta[i]) for i in range(delta.shape[0])], dtype=bool)
        return PointCloud(points=F.points[admissible.reshape(-1), F.n:])

    clouds: list[np.ndarray] = []
    pieces: list[Polyhedron] = []
    for point in admissible_points(x, t, L, closed, density):
        region = F.values_at(point)
        if isinstance(region, PointCloud):
            clouds.append(region.points)
        else:
            assert isinstance(region, PolytopeUnion)
            pieces.extend(region.nonempty_pieces())

    if pieces:
        pieces.extend(Polyhedron.point(q) for cloud in clouds for q in cloud)
        return PolytopeUnion(pieces=tuple(pieces), dim=F.m)
    if not clouds:
        return PointCloud.empty(F.m)
    return PointCloud(points=unique_rows(np.vstack(clouds)))


def ball_graph_points(
    F: SetValuedMap,
    x: np.ndarray,
    t: float,
    L: DirectionSet,
    target: np.ndarray,
    closed: bool = True,
    density: int = GRID_DENSITY,
) -> np.ndarray:
    """
    Graph points (x', y') with x' admissible in the directional ball and
    y' the point of F(x') nearest to `target`.
    """
    found = []
    if isinstance(F, SampledGraph):
        delta = F.points[:, : F.n] - x
        dist = np.linalg.norm(delta, axis=1)
        limit = t * (1.0 + BOUNDARY_SLACK) if closed else t
        for i in range(F.points.shape[0]):
            if dist[i] <= limit and L.cone_contains(delta[i]):
                found.append(F.points[i])
    else:
        for point in admissible_points(x, t, L, closed, density):
            y = F.values_at(point).nearest(target)
            if y is not None:
                found.append(np.concatenate([point, y]))
    if not found:
        return np.zeros((0, F.n + F.m))
    return np.array(found)


# ---- catalog


def staircase(width: float = 1.0, height: float = 1.0, steps: int = 2) -> PolyhedralGraph:
    """Union of boxes [k w, (k+1) w] x [k h, (k+1) h] for k = -steps .. steps-1."""
    pieces = tuple(
        Polyhedron.box([k * width, k * height], [(k + 1) * width, (k + 1) * height])
        for k in range(-steps, steps)
    )
    return PolyhedralGraph(n=1, m=1, pieces=pieces, kind=MapKind.catalog, name="staircase")


def abs_graph() -> PolyhedralGraph:
    """Graph of x -> |x|."""
    right = Polyhedron.from_inequalities([[-1.0, 0.0]], [0.0], eq_A=[[1.0, -1.0]], eq_b=[0.0])
    left = Polyhedron.from_inequalities([[1.0, 0.0]], [0.0], eq_A=[[1.0, 1.0]], eq_b=[0.0])
    return PolyhedralGraph(n=1, m=1, pieces=(right, left), kind=MapKind.catalog, name="abs")


def _linear(matrix: Sequence[Sequence[float]]) -> SetValuedMap:
    return LinearMap(matrix=np.atleast_2d(np.asarray(matrix, dtype=float)))


def _square() -> SetValuedMap:
    return SquareMap()


def _epigraph(a: Sequence[float]) -> SetValuedMap:
    return EpigraphMap(a=as_vector(a))


def _product(first: dict[str, Any], second: dict[str, Any]) -> SetValuedMap:
    return ProductMap(first=catalog(**first), second=catalog(**second))


CATALOG: dict[str, Callable[..., SetValuedMap]] = {
    "linear": _linear,
    "square": _square,
    "epigraph": _epigraph,
    "staircase": staircase,
    "abs": abs_graph,
    "product": _product,
}


def catalog(name: str, **params: Any) -> SetValuedMap:
    if name not in CATALOG:
        raise ScopeError(f"unknown catalog map {name!r}; known: {', '.join(sorted(CATALOG))}")
    return CATALOG[name](**params)


def piecewise_linearize(F: SetValuedMap, knots: int = 4, spacing: float = 0.1) -> PolyhedralGraph:
    """
    Polyhedral surrogate of a catalog map. The square map becomes the
    maximum of its tangent lines at k * spacing, k = -knots .. knots.
    """
    graph = F.polyhedral_graph()
    if graph is not None:
        return graph

    if isinstance(F, SquareMap):
        centers = spacing * np.arange(-knots, knots + 1)
        pieces = []
        for k, c in enumerate(centers):
            rows, rhs = [], []
            if k > 0:
                rows.append([-1.0, 0.0])
                rhs.append(-(centers[k - 1] + c) / 2.0)
            if k < len(centers) - 1:
                rows.append([1.0, 0.0])
                rhs.append((c + centers[k + 1]) / 2.0)
            # y = 2 c x - c^2
            pieces.append(Polyhedron.from_inequalities(rows, rhs, eq_A=[[2.0 * c, -1.0]], eq_b=[c * c]))
        return PolyhedralGraph(n=1, m=1, pieces=tuple(pieces), kind=MapKind.catalog, name="square~pl")

    if isinstance(F, ProductMap):
        product = ProductMap(
            first=piecewise_linearize(F.first, knots, spacing),
            second=piecewise_linearize(F.second, knots, spacing),
            name=F.name,
        )
        result = product.polyhedral_graph()
        assert result is not None
        return result

    if isinstance(F, InverseMap):
        return piecewise_linearize(F.base, knots, spacing).inverse()

    raise ScopeError(f"map {F.name!r} has no polyhedral surrogate")


def require_polyhedral(F: SetValuedMap) -> PolyhedralGraph:
    graph = F.polyhedral_graph()
    if graph is None:
        raise ScopeError(
            f"map {F.name!r} is not polyhedral; linearize it first (instance key map.linearize)"
        )
    return graph
