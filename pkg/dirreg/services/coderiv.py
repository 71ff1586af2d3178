import itertools
import logging
import math
from typing import Sequence

import cvxpy as cp
import numpy as np
from scipy.optimize import linprog

from dirreg.config import MEMBERSHIP_TOL
from dirreg.exceptions import ConsistencyError, ScopeError
from dirreg.models.cones import DirectionSet, PolyhedralCone
from dirreg.models.geometry import Polyhedron, PolytopeUnion, as_vector
from dirreg.models.maps import BasePoint, PolyhedralGraph, SetValuedMap
from dirreg.models.neighborhood import NeighborhoodSpec
from dirreg.models.normals import CoderivativeSlice, NormalConeRep, NormalKind
from dirreg.models.results import CriterionBracket, CriterionRecord, CriterionReport, Property
from dirreg.services.maps import require_polyhedral
from dirreg.services.utils.sampling import box_grid, sphere_directions, unique_rows
from dirreg.services.wellposed import estimate_modulus

logger = logging.getLogger(__name__)

# radius of the reachability test for limiting normals
REACH_RADIUS = 1e-6
# active subsets beyond this many constraints are not enumerated exhaustively
_MAX_ACTIVE = 12


def admissible_cones(L: DirectionSet, M: DirectionSet) -> list[PolyhedralCone]:
    """cone L x cone M as a union of convex cones."""
    return [cl.product(cm) for cl in L.cone_pieces() for cm in M.cone_pieces()]


def _pieces_at(region: PolytopeUnion, p: np.ndarray, tol: float) -> list[Polyhedron]:
    pieces = [piece for piece in region.pieces if piece.contains(p, tol)]
    if not pieces:
        raise ValueError(f"point {p.tolist()} is not in the set")
    return pieces


def directional_tangent_cone(
    region: PolytopeUnion,
    p: Sequence[float] | np.ndarray,
    L: DirectionSet,
    M: DirectionSet,
    tol: float = MEMBERSHIP_TOL,
) -> list[PolyhedralCone]:
    """Feasible directions at p, piece by piece, intersected with cone L x cone M."""
    p = as_vector(p)
    tangents = []
    for piece in _pieces_at(region, p, tol):
        active = piece.active_set(p, tol)
        # A_I d <= 0
        local = PolyhedralCone.from_halfspaces(-piece.A[active], dimension=region.dimension)
        for admissible in admissible_cones(L, M):
            tangents.append(local.intersect(admissible))
    return tangents


def regular_normal_cone(
    region: PolytopeUnion,
    p: Sequence[float] | np.ndarray,
    L: DirectionSet,
    M: DirectionSet,
    tol: float = MEMBERSHIP_TOL,
) -> NormalConeRep:
    """Polar of the directional tangent cone."""
    p = as_vector(p)
    tangents = directional_tangent_cone(region, p, L, M, tol)
    rays = [cone.generator_matrix for cone in tangents if cone.generator_matrix.shape[0]]
    stacked = np.vstack(rays) if rays else np.zeros((0, region.dimension))
    normal = PolyhedralCone.from_halfspaces(-stacked, dimension=region.dimension)

    generators = normal.generator_matrix
    if generators.shape[0] and stacked.shape[0]:
        worst = float((generators @ stacked.T).max())
        if worst > 1e-7:
            raise ConsistencyError(f"normal cone at {p.tolist()} is not polar to its tangent cone ({worst:.3g})")

    return NormalConeRep(base_point=p, cones=(normal,), kind=NormalKind.regular, L=L, M=M)


def _reach_face(
    piece: Polyhedron,
    p: np.ndarray,
    active: np.ndarray,
    kept: tuple[int, ...],
    admissible: PolyhedralCone,
) -> np.ndarray | None:
    """
    A point p + d of the face where exactly the rows `kept` of the active
    set stay tight, with d admissible and |d|_inf <= REACH_RADIUS.
    """
    d = piece.dimension
    dropped = [i for i in active if i not in kept]
    inactive = [i for i in range(piece.A.shape[0]) if i not in set(active)]

    # variables (d, s); maximize s
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    A_ub, b_ub = [], []
    for i in dropped:
        A_ub.append(np.append(piece.A[i], 1.0))
        b_ub.append(0.0)
    for i in inactive:
        A_ub.append(np.append(piece.A[i], 0.0))
        b_ub.append(piece.b[i] - piece.A[i] @ p)
    for h in admissible.halfspace_matrix:
        A_ub.append(np.append(-h, 0.0))
        b_ub.append(0.0)
    A_eq = [np.append(piece.A[i], 0.0) for i in kept]
    bounds = [(-REACH_RADIUS, REACH_RADIUS)] * d + [(None, REACH_RADIUS)]

    res = linprog(
        cost,
        A_ub=np.array(A_ub) if A_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(A_eq) if A_eq else None,
        b_eq=np.zeros(len(A_eq)) if A_eq else None,
        bounds=bounds,
        method="highs",
    )
    if res.status != 0 or -res.fun <= 1e-4 * REACH_RADIUS:
        return None
    return p + res.x[:d]


def _cone_key(cone: PolyhedralCone) -> tuple[float, ...]:
    rays = cone.generator_matrix
    return (rays.shape[0], *np.round(rays, 7).ravel().tolist())


def limiting_normal_cone(
    region: PolytopeUnion,
    p: Sequence[float] | np.ndarray,
    L: DirectionSet,
    M: DirectionSet,
    tol: float = MEMBERSHIP_TOL,
) -> NormalConeRep:
    """
    Union of regular normal cones at representatives of the faces next to p
    that can be entered from p along cone L x cone M.
    """
    p = as_vector(p)
    representatives = [p]
    for piece in _pieces_at(region, p, tol):
        active = piece.active_set(p, tol)
        if active.size > _MAX_ACTIVE:
            logger.warning("%d active constraints at %s; only single drops are explored", active.size, p.tolist())
            subsets = [tuple(int(j) for j in active if j != i) for i in active]
        else:
            subsets = [
                tuple(int(j) for j in kept)
                for size in range(active.size)
                for kept in itertools.combinations(active, size)
            ]
        for kept in subsets:
            for admissible in admissible_cones(L, M):
                q = _reach_face(piece, p, active, kept, admissible)
                if q is not None:
                    representatives.append(q)
                    break

    cones: dict[tuple[float, ...], PolyhedralCone] = {}
    for q in unique_rows(np.array(representatives), decimals=12):
        cone = regular_normal_cone(region, q, L, M, tol).cone
        cones.setdefault(_cone_key(cone), cone)
    logger.debug("limiting normal cone at %s: %d pieces", p.tolist(), len(cones))
    return NormalConeRep(base_point=p, cones=tuple(cones.values()), kind=NormalKind.limiting, L=L, M=M)


def normal_cone(
    region: PolytopeUnion, p: np.ndarray, L: DirectionSet, M: DirectionSet, kind: NormalKind | str
) -> NormalConeRep:
    if NormalKind(kind) is NormalKind.regular:
        return regular_normal_cone(region, p, L, M)
    return limiting_normal_cone(region, p, L, M)


def coderivative(
    F: SetValuedMap,
    p: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    y_star: Sequence[float] | np.ndarray,
    kind: NormalKind | str = NormalKind.limiting,
) -> CoderivativeSlice:
    """D*F(x, y)(y*) = {x* : (x*, -y*) in N(graph F, (x, y))}."""
    graph = require_polyhedral(F)
    normal = normal_cone(graph.region, p.point, L, M, kind)
    return CoderivativeSlice.build(as_vector(y_star), NormalKind(kind), normal, graph.n)


def _worst_element(piece: Polyhedron, cone: PolyhedralCone) -> np.ndarray:
    """x* in the slice piece minimising the support of cone over -x* (distance of -x* to the polar)."""
    if cone.is_full_space():
        x_star = piece.nearest_point(np.zeros(piece.dimension))
        assert x_star is not None
        return x_star

    n = piece.dimension
    x = cp.Variable(n)
    z = cp.Variable(n)
    constraints = []
    if piece.A.shape[0]:
        constraints.append(piece.A @ x <= piece.b)
    generators = cone.generator_matrix
    if generators.shape[0]:
        constraints.append(generators @ z <= 0)
    problem = cp.Problem(cp.Minimize(cp.sum_squares(x + z)), constraints)
    problem.solve()
    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) or x.value is None:
        logger.warning("worst coderivative element: solver status %s, using the least-norm element", problem.status)
        fallback = piece.nearest_point(np.zeros(n))
        assert fallback is not None
        return fallback
    return np.asarray(x.value, dtype=float)


def _graph_samples(graph: PolyhedralGraph, base: BasePoint, rho: float, density: int) -> np.ndarray:
    """
    Graph points in B(x, rho) x B(y, rho): the point of each slice F(x')
    nearest to y over a grid of x', plus the vertices of the graph pieces.
    """
    rows = [base.point]
    for x in box_grid(base.x, rho, density):
        for piece in graph.values_at(x).as_polytopes().pieces:
            y = piece.nearest_point(base.y)
            if y is not None and np.linalg.norm(y - base.y) <= rho:
                rows.append(np.concatenate([x, y]))
    for piece in graph.pieces:
        for vertex in piece.vertices():
            x, y = graph.split(vertex)
            if np.linalg.norm(x - base.x) <= rho and np.linalg.norm(y - base.y) <= rho:
                rows.append(vertex)
    return unique_rows(np.array(rows))


def _v_samples(M: DirectionSet, y_star: np.ndarray, base: np.ndarray) -> np.ndarray:
    """Sampled directions of M plus the exact minimiser of <y*, v> when it is negative."""
    cone = M.cone_pieces()[0]
    descent = cone.project(-y_star)
    if np.linalg.norm(descent) > 1e-12:
        return np.vstack([base, descent / np.linalg.norm(descent)])
    return base


def check_criterion(
    F: SetValuedMap,
    base: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    c: float,
    rho: float,
    density: int = 11,
    y_count: int = 64,
    v_count: int | None = None,
    tolerance: float = 1e-7,
) -> CriterionReport:
    """
    For sampled graph points near the base, unit y* and the worst x* of each
    limiting coderivative slice: min over u in cone L, |u| <= 1 of <x*, u>
    must not exceed c <y*, v> for v in M.
    """
    if c < 0:
        raise ValueError("modulus must be nonnegative")
    if not (L.is_convex() and M.is_convex()):
        raise ScopeError("the coderivative criterion needs convex cone L and cone M")
    graph = require_polyhedral(F)
    region = graph.region
    cone_L = L.cone_pieces()[0]

    y_stars = sphere_directions(graph.m, y_count)
    v_base = M.sample(v_count)
    worst_cache: dict[tuple[tuple[float, ...], int], np.ndarray | None] = {}
    records: list[CriterionRecord] = []

    for point in _graph_samples(graph, base, rho, density):
        normal = limiting_normal_cone(region, point, L, M)
        for k, y_star in enumerate(y_stars):
            vs = _v_samples(M, y_star, v_base)
            v_index = int(np.argmin(vs @ y_star))
            v = vs[v_index]
            for index, cone in enumerate(normal.cones):
                key = (_cone_key(cone), k)
                if key not in worst_cache:
                    piece = CoderivativeSlice.build(y_star, NormalKind.limiting, NormalConeRep(
                        base_point=point, cones=(cone,), kind=NormalKind.limiting, L=L, M=M,
                    ), graph.n)
                    worst_cache[key] = None if piece.is_empty() else _worst_element(piece.pieces[0].inequalities, cone_L)
                x_star = worst_cache[key]
                if x_star is None:
                    continue
                projected = cone_L.project(-x_star)
                size = float(np.linalg.norm(projected))
                u = projected / size if size > 1e-12 else np.zeros_like(projected)
                records.append(
                    CriterionRecord(
                        point=point.tolist(),
                        y_star=y_star.tolist(),
                        x_star=x_star.tolist(),
                        v=v.tolist(),
                        u=u.tolist(),
                        slack=c * float(y_star @ v) + size,
                        cone=index,
                    )
                )

    min_slack = min((r.slack for r in records), default=math.inf)
    passed = min_slack >= -tolerance
    logger.info("criterion at c=%.6g: min slack %.3g over %d records", c, min_slack, len(records))
    return CriterionReport(c=c, records=records, min_slack=min_slack, passed=passed, tolerance=tolerance)


def criterion_bracket(
    F: SetValuedMap,
    base: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    spec: NeighborhoodSpec,
    below: float = 0.9,
    above: float = 1.1,
) -> CriterionBracket:
    """Rate-1 openness bracket next to the criterion evaluated just below and above it."""
    graph = require_polyhedral(F)
    estimate = estimate_modulus(Property.open, graph, base, L, M, 1.0, spec)
    low = check_criterion(graph, base, L, M, below * estimate.c_lo, spec.rho_x)
    if not math.isfinite(estimate.c_hi):
        return CriterionBracket(estimate=estimate, below=low, above=None, consistent=low.passed)
    high = check_criterion(graph, base, L, M, above * estimate.c_hi, spec.rho_x)
    return CriterionBracket(estimate=estimate, below=low, above=high, consistent=low.passed and not high.passed)
