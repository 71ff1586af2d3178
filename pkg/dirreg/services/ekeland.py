import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from dirreg.config import MAX_ITERATIONS, MEMBERSHIP_TOL
from dirreg.exceptions import ConsistencyError, CoveringStepError, InstanceError, ScopeError
from dirreg.models.cones import DirectionSet, PolyhedralCone
from dirreg.models.geometry import Region, as_vector
from dirreg.models.maps import SetValuedMap
from dirreg.models.results import EkelandResult, RefinementStatus, RefinementStep, RefinementTrace
from dirreg.services.cones import minimal_time, point_minimal_time
from dirreg.services.maps import ball_graph_points

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EkelandInstance:
    """A finite closed set of graph-space points with values, a start index and epsilon."""

    points: np.ndarray
    values: np.ndarray
    n: int
    start: int
    epsilon: float
    L: DirectionSet
    M: DirectionSet

    def __post_init__(self) -> None:
        if self.points.ndim != 2 or self.points.shape[0] == 0:
            raise InstanceError("the Ekeland set must contain at least one point")
        if self.values.shape != (self.points.shape[0],):
            raise InstanceError(f"expected {self.points.shape[0]} values, got {self.values.shape[0]}")
        if not 0 <= self.start < self.points.shape[0]:
            raise InstanceError(f"start index {self.start} is out of range")
        if not math.isfinite(self.values[self.start]):
            raise InstanceError("the function must be finite at the start point")
        if np.any(np.isnan(self.values)) or np.any(self.values == -math.inf):
            raise InstanceError("function values must be real or +inf")
        if self.epsilon <= 0:
            raise InstanceError("epsilon must be positive")
        if self.L.dimension != self.n or self.M.dimension != self.points.shape[1] - self.n:
            raise InstanceError("direction sets do not match the point dimensions")
        if not (self.L.is_convex() and self.M.is_convex()):
            raise ScopeError("the Ekeland principle needs convex cone L and cone M")
        # each block within MEMBERSHIP_TOL reads as distance 0
        close = cKDTree(self.points).query_pairs(2.0 * MEMBERSHIP_TOL)
        if close:
            i, j = min(close)
            raise InstanceError(f"the Ekeland set contains repeated points ({i} and {j})")

    @classmethod
    def of(
        cls,
        points: Sequence[Sequence[float]] | np.ndarray,
        values: Sequence[float] | np.ndarray,
        n: int,
        start: int,
        epsilon: float,
        L: DirectionSet,
        M: DirectionSet,
    ) -> "EkelandInstance":
        return cls(
            points=np.atleast_2d(np.asarray(points, dtype=float)),
            values=np.asarray(values, dtype=float).reshape(-1),
            n=n,
            start=start,
            epsilon=epsilon,
            L=L,
            M=M,
        )

    def distance(self, i: int, j: int) -> float:
        """T_L(x_i, x_j) + T_M(y_i, y_j)."""
        p, q = self.points[i], self.points[j]
        return point_minimal_time(self.L, p[: self.n], q[: self.n]) + point_minimal_time(self.M, p[self.n:], q[self.n:])


def _violators(inst: EkelandInstance, current: int) -> list[int]:
    """Points z with f(z) + eps T(z -> current) <= f(current)."""
    found = []
    f_cur = inst.values[current]
    for z in range(inst.points.shape[0]):
        if z == current or not math.isfinite(inst.values[z]):
            continue
        if inst.values[z] + inst.epsilon * inst.distance(z, current) <= f_cur:
            found.append(z)
    return found


def verify_ekeland(inst: EkelandInstance, index: int) -> bool:
    """Exhaustive check of the descent inequality and the strict minimality against every other point."""
    f_start, f_end = inst.values[inst.start], inst.values[index]
    descent = f_start - inst.epsilon * inst.distance(index, inst.start)
    if not f_end <= descent + 1e-12 * (1.0 + abs(f_start)):
        return False
    return not _violators(inst, index)


def directional_ekeland(inst: EkelandInstance) -> EkelandResult:
    """
    Descend from the start, moving to a violator of the strict minimality
    inequality (smallest value, then lexicographic) until none is left.
    """
    current = inst.start
    path = [current]
    visited = {current}
    while True:
        violators = _violators(inst, current)
        if not violators:
            break
        current = min(violators, key=lambda z: (inst.values[z], *inst.points[z]))
        if current in visited:
            raise ConsistencyError(f"Ekeland descent revisits point {current} along {path}")
        visited.add(current)
        path.append(current)
        logger.debug("ekeland step to %d (f=%.6g)", current, inst.values[current])

    if not verify_ekeland(inst, current):
        raise ConsistencyError(f"Ekeland point {current} fails the exhaustive check")

    point = inst.points[current]
    return EkelandResult(
        index=current,
        x=point[: inst.n].tolist(),
        y=point[inst.n:].tolist(),
        value=float(inst.values[current]),
        epsilon=inst.epsilon,
        path=path,
    )


@dataclass(frozen=True)
class CoveringQuery:
    """One step of the refinement: reach from (x, y) towards `target` within `step_bound`."""

    iterate: int
    x: np.ndarray
    y: np.ndarray
    target: np.ndarray
    step_bound: float
    scale: float


CoveringOracle = Callable[[CoveringQuery], np.ndarray]


def default_oracle(F: SetValuedMap, C: PolyhedralCone) -> CoveringOracle:
    """Exact directional preimage step when it fits, else graph points of the closed directional ball."""
    directions = DirectionSet.from_cone(C)

    def oracle(query: CoveringQuery) -> np.ndarray:
        reach = minimal_time(directions, query.x, F.preimage_at(query.target))
        if reach.is_finite and reach.value <= query.step_bound * (1.0 + 1e-12):
            assert reach.attaining_direction is not None and reach.attaining_time is not None
            x = query.x + reach.attaining_time * reach.attaining_direction
            return np.concatenate([x, query.target])[np.newaxis, :]
        return ball_graph_points(F, query.x, query.step_bound, directions, query.target, closed=True)

    return oracle


def _feasible(
    F: SetValuedMap,
    C: PolyhedralCone,
    K: Region,
    candidate: np.ndarray,
    query: CoveringQuery,
    tol: float,
) -> bool:
    x, y = candidate[: F.n], candidate[F.n:]
    step = x - query.x
    if np.linalg.norm(step) > query.step_bound * (1.0 + 1e-9) + tol:
        return False
    if not C.contains(step, max(tol, MEMBERSHIP_TOL)):
        return False
    if not F.graph_contains(candidate, max(tol, MEMBERSHIP_TOL)):
        return False
    if query.scale == 0:
        return bool(np.linalg.norm(query.target - y) <= tol)
    return K.contains((query.target - y) / query.scale, max(tol / query.scale, MEMBERSHIP_TOL))


def refine_preimage(
    F: SetValuedMap,
    x: Sequence[float] | np.ndarray,
    y: Sequence[float] | np.ndarray,
    y_target: Sequence[float] | np.ndarray,
    C: PolyhedralCone,
    K: Region,
    r: float,
    alpha: float,
    t: float,
    tol: float = 1e-9,
    oracle: CoveringOracle | None = None,
    max_iterations: int = MAX_ITERATIONS,
) -> RefinementTrace:
    """
    Build graph points (x_i, y_i) with x_i - x_{i-1} in C,
    |x_i - x_{i-1}| <= alpha^((i-1)/r) (1 - alpha^(1/r)) t and
    y_target - y_i in alpha^i ((1 - alpha^(1/r)) t)^r K,
    until y_i is within `tol` of the target.
    """
    x, y, y_target = as_vector(x), as_vector(y), as_vector(y_target)
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    if r <= 0 or t < 0:
        raise ValueError("r must be positive and t nonnegative")
    if not F.graph_contains(np.concatenate([x, y])):
        raise ValueError(f"({x.tolist()}, {y.tolist()}) is not on the graph of {F.name}")

    root = alpha ** (1.0 / r)
    reach = ((1.0 - root) * t) ** r
    if reach == 0:
        if np.linalg.norm(y_target - y) > tol:
            raise ValueError("with t = 0 the target must equal y")
    elif not K.contains((y_target - y) / reach, MEMBERSHIP_TOL):
        raise ValueError("target is outside y + ((1 - alpha^(1/r)) t)^r K")

    oracle = oracle or default_oracle(F, C)
    bound_K = K.norm_bound()
    steps: list[RefinementStep] = []
    x_prev, y_prev = x, y
    residual = float(np.linalg.norm(y_target - y))
    status = RefinementStatus.failed

    if residual <= tol:
        status = RefinementStatus.converged

    for i in range(1, max_iterations + 1):
        if status is RefinementStatus.converged:
            break
        query = CoveringQuery(
            iterate=i,
            x=x_prev,
            y=y_prev,
            target=y_target,
            step_bound=alpha ** ((i - 1) / r) * (1.0 - root) * t,
            scale=alpha ** i * reach,
        )
        candidates = [p for p in oracle(query) if _feasible(F, C, K, p, query, tol)]
        if not candidates:
            raise CoveringStepError(f"covering step {i} has no feasible graph point", iterate=i)
        chosen = min(candidates, key=lambda p: (float(np.linalg.norm(y_target - p[F.n:])), *p))
        x_next, y_next = chosen[: F.n], chosen[F.n:]
        residual = float(np.linalg.norm(y_target - y_next))
        steps.append(
            RefinementStep(
                index=i,
                x=x_next.tolist(),
                y=y_next.tolist(),
                step_norm=float(np.linalg.norm(x_next - x_prev)),
                step_bound=query.step_bound,
                residual=residual,
                residual_bound=bound_K * query.scale,
            )
        )
        x_prev, y_prev = x_next, y_next
        if residual <= tol:
            status = RefinementStatus.converged

    if status is not RefinementStatus.converged:
        intact = all(s.residual <= s.residual_bound + tol for s in steps)
        status = RefinementStatus.extrapolated if intact else RefinementStatus.failed
        logger.warning("refinement stopped after %d iterations (%s)", len(steps), status.value)

    total = sum(s.step_norm for s in steps)
    return RefinementTrace(
        steps=steps,
        status=status,
        final_x=x_prev.tolist(),
        final_y=y_prev.tolist(),
        total_length=total,
        t=t,
        alpha=alpha,
        r=r,
    )
