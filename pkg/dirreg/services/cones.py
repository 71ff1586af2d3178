import logging
import math
from typing import Sequence

import numpy as np

from dirreg.config import MEMBERSHIP_TOL
from dirreg.models.cones import DirectionKind, DirectionSet, MinimalTimeValue, PolyhedralCone
from dirreg.models.geometry import PointCloud, Polyhedron, PolytopeUnion, Region, as_vector

logger = logging.getLogger(__name__)


def negate(directions: DirectionSet) -> DirectionSet:
    return directions.negate()


def cone_membership(cone: PolyhedralCone, v: Sequence[float] | np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
    return cone.contains(v, tol)


def project_onto_cone(cone: PolyhedralCone, w: Sequence[float] | np.ndarray) -> np.ndarray:
    return cone.project(w)


def support_over_cap(cone: PolyhedralCone, w: Sequence[float] | np.ndarray) -> float:
    return cone.support(w)


def minimal_time(
    L: DirectionSet,
    x: Sequence[float] | np.ndarray,
    region: Region,
    tol: float = MEMBERSHIP_TOL,
) -> MinimalTimeValue:
    """
    inf{t >= 0 : (x + t L) meets the region}, with the attaining direction
    and time when finite.
    """
    x = as_vector(x)
    if region.dimension != x.shape[0] or region.dimension != L.dimension:
        raise ValueError(
            f"dimension mismatch: point {x.shape[0]}, region {region.dimension}, directions {L.dimension}"
        )

    if isinstance(region, PointCloud):
        return _minimal_time_points(L, x, region.points, tol)

    assert isinstance(region, PolytopeUnion)
    best = MinimalTimeValue.unreachable()
    for piece in region.pieces:
        candidate = _minimal_time_polyhedron(L, x, piece, tol)
        if candidate.value < best.value:
            best = candidate
    return best


def point_minimal_time(L: DirectionSet, x: np.ndarray, target: np.ndarray, tol: float = MEMBERSHIP_TOL) -> float:
    """T_L(x, {target}): the distance when target - x lies in cone L, else +inf."""
    delta = target - x
    dist = float(np.linalg.norm(delta))
    if dist <= tol:
        return 0.0
    return dist if L.cone_contains(delta, tol) else math.inf


def _attained(L: DirectionSet, delta: np.ndarray, tol: float) -> MinimalTimeValue:
    dist = float(np.linalg.norm(delta))
    if dist <= tol:
        return MinimalTimeValue(value=0.0, attaining_direction=L.representative(), attaining_time=0.0)
    return MinimalTimeValue(value=dist, attaining_direction=delta / dist, attaining_time=dist)


def _minimal_time_points(L: DirectionSet, x: np.ndarray, points: np.ndarray, tol: float) -> MinimalTimeValue:
    best = MinimalTimeValue.unreachable()
    if points.shape[0] == 0:
        return best
    deltas = points - x
    order = np.argsort(np.linalg.norm(deltas, axis=1), kind="stable")
    for i in order:
        if L.cone_contains(deltas[i], tol):
            return _attained(L, deltas[i], tol)
    return best


def _minimal_time_polyhedron(L: DirectionSet, x: np.ndarray, piece: Polyhedron, tol: float) -> MinimalTimeValue:
    if L.kind is DirectionKind.finite:
        assert L.directions is not None
        best = MinimalTimeValue.unreachable()
        for u in L.directions:
            t = _ray_entry_time(piece, x, u, tol)
            if t is not None and t < best.value:
                best = MinimalTimeValue(value=t, attaining_direction=u.copy(), attaining_time=t)
        if best.is_finite and best.value <= tol:
            return _attained(L, np.zeros_like(x), tol)
        return best

    if L.kind is DirectionKind.cap:
        assert L.cone is not None
        # z - x must satisfy H (z - x) >= 0
        H = L.cone.halfspace_matrix
        if H.shape[0]:
            piece = piece.restrict(-H, -H @ x)

    z = piece.nearest_point(x)
    if z is None:
        return MinimalTimeValue.unreachable()
    return _attained(L, z - x, tol)


def _ray_entry_time(piece: Polyhedron, x: np.ndarray, u: np.ndarray, tol: float) -> float | None:
    """Smallest t >= 0 with x + t u in the polyhedron, or None."""
    slope = piece.A @ u
    slack = piece.b - piece.A @ x
    lo, hi = 0.0, math.inf
    for a, s in zip(slope, slack):
        if abs(a) <= 1e-15:
            if s < -tol:
                return None
        elif a > 0:
            hi = min(hi, s / a)
        else:
            lo = max(lo, s / a)
    if lo > hi + tol:
        return None
    return lo
