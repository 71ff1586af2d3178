"""
Grid verification of directional openness, regularity and continuity.

Every check walks a finite grid around the base point and evaluates one
inequality per grid record with `cones.minimal_time`. Strict records within
the boundary slack of equality are reported as inconclusive, never as pass
or fail. Witnesses are the lexicographically smallest failing record, so the
verdict does not depend on evaluation order.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from dirreg.config import BISECTION_TOL
from dirreg.models.cones import DirectionSet
from dirreg.models.maps import BasePoint, SetValuedMap
from dirreg.models.neighborhood import NeighborhoodSpec
from dirreg.models.rates import PowerRate, RateFunction
from dirreg.models.results import (
    BisectionStep,
    EquivalenceReport,
    ModulusEstimate,
    Property,
    Status,
    Verdict,
    Witness,
)
from dirreg.services.cones import minimal_time, point_minimal_time
from dirreg.services.utils.parallel import map_items
from dirreg.services.utils.sampling import box_grid, unique_rows

logger = logging.getLogger(__name__)

# grid points per axis used when sampling a value set F(x) inside V
_VALUE_DENSITY = 7


@dataclass
class _Tally:
    checked: int = 0
    failure: Witness | None = None
    boundary: Witness | None = None

    def add(self, status: Status, make_witness: Callable[[], Witness]) -> None:
        self.checked += 1
        if status is Status.fails:
            self.failure = _lexmin(self.failure, make_witness())
        elif status is Status.inconclusive:
            self.boundary = _lexmin(self.boundary, make_witness())

    def merge(self, other: "_Tally") -> "_Tally":
        return _Tally(
            checked=self.checked + other.checked,
            failure=_lexmin(self.failure, other.failure),
            boundary=_lexmin(self.boundary, other.boundary),
        )


def _lexmin(a: Witness | None, b: Witness | None) -> Witness | None:
    if a is None:
        return b
    if b is None:
        return a
    return a if a.sort_key() <= b.sort_key() else b


def classify(lhs: float, rhs: float, slack: float, strict: bool) -> Status:
    """
    Status of lhs < rhs (strict) or lhs <= rhs. Strict comparisons within
    the slack band are inconclusive; non-strict ones pass there.
    """
    if math.isinf(rhs):
        return Status.holds if not math.isinf(lhs) or not strict else Status.fails
    if math.isinf(lhs):
        return Status.fails
    band = slack * (1.0 + abs(rhs))
    violation = lhs - rhs
    if strict:
        if violation < -band:
            return Status.holds
        return Status.fails if violation > band else Status.inconclusive
    return Status.fails if violation > band else Status.holds


def _violation(lhs: float, rhs: float) -> float:
    if math.isinf(lhs) and math.isinf(rhs):
        return 0.0
    return lhs - rhs


def _verdict(prop: Property, rate: RateFunction, tally: _Tally, spec: NeighborhoodSpec, points: int, directions: int) -> Verdict:
    if tally.failure is not None:
        status, witness = Status.fails, tally.failure
    elif tally.boundary is not None:
        status, witness = Status.inconclusive, tally.boundary
        logger.debug("%s: boundary record at %s", prop.value, witness.sort_key())
    else:
        status, witness = Status.holds, None
    return Verdict(
        property=prop.value,
        rate=rate.describe(),
        status=status,
        witness=witness,
        grid=spec.metadata(points=points, checks=tally.checked, directions=directions),
        checked=tally.checked,
    )


def _check_base(F: SetValuedMap, base: BasePoint) -> None:
    if base.x.shape[0] != F.n or base.y.shape[0] != F.m:
        raise ValueError(f"base point dimensions ({base.x.shape[0]}, {base.y.shape[0]}) != ({F.n}, {F.m})")
    if not F.graph_contains(base.point):
        raise ValueError(f"base point {base.point.tolist()} is not on the graph of {F.name}")


def graph_points(F: SetValuedMap, base: BasePoint, spec: NeighborhoodSpec) -> np.ndarray:
    """Graph points (x, y) with x on the U grid and y in F(x) within V."""
    rows = [base.point]
    xs = box_grid(base.x, spec.rho_x, spec.grid_density, spec.max_points, spec.seed)
    for x in xs:
        ys = F.values_at(x).sample_near(base.y, spec.rho_y, _VALUE_DENSITY, spec.seed)
        rows.extend(np.concatenate([x, y]) for y in ys)
    return unique_rows(np.array(rows))


def _with_retries(check: Callable[[NeighborhoodSpec], Verdict], spec: NeighborhoodSpec, retries: int) -> Verdict:
    verdict = check(spec)
    while verdict.status is Status.fails and spec.shrink_count < retries:
        spec = spec.shrunk()
        logger.info("%s failed; retrying with radii %.3g/%.3g", verdict.property, spec.rho_x, spec.rho_y)
        verdict = check(spec)
    return verdict


def check_openness(
    F: SetValuedMap,
    base: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    phi: RateFunction,
    spec: NeighborhoodSpec,
    retries: int = 0,
) -> Verdict:
    """B(y, phi(t)) within y + cone M is covered by F(B(x, t) within x + cone L)."""
    _check_base(F, base)

    def run(spec: NeighborhoodSpec) -> Verdict:
        points = graph_points(F, base, spec)
        directions = M.sample(spec.direction_count)

        def evaluate(p: np.ndarray) -> _Tally:
            x, y = p[: F.n], p[F.n:]
            tally = _Tally()
            for t in spec.t_values:
                radius = phi(t)
                radii = [f * radius for f in spec.radial_fractions[:-1]]
                radii.append(spec.radial_fractions[-1] * radius * (1.0 - spec.boundary_offset))
                for u in directions:
                    for rho in radii:
                        target = y + rho * u
                        reach = minimal_time(L, x, F.preimage_at(target)).value
                        tally.add(
                            classify(reach, t, spec.slack, strict=True),
                            lambda: Witness(
                                x=x.tolist(), y=y.tolist(), t=t, target=target.tolist(),
                                lhs=reach, rhs=t, violation=_violation(reach, t),
                            ),
                        )
            return tally

        tally = _merge(map_items(evaluate, points))
        return _verdict(Property.open, phi, tally, spec, points.shape[0], directions.shape[0])

    return _with_retries(run, spec, retries)


def check_regularity(
    F: SetValuedMap,
    base: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    psi: RateFunction,
    spec: NeighborhoodSpec,
    retries: int = 0,
) -> Verdict:
    """T_L(x, F^-1(y)) <= psi(T_M(y, F(x))) on U x V where T_M(y, F(x)) < epsilon."""
    _check_base(F, base)

    def run(spec: NeighborhoodSpec) -> Verdict:
        center = base.point
        radii = np.concatenate([np.full(F.n, spec.rho_x), np.full(F.m, spec.rho_y)])
        grid = box_grid(center, radii, spec.grid_density, spec.max_points, spec.seed, blocks=[F.n, F.m])

        def evaluate(p: np.ndarray) -> _Tally:
            x, y = p[: F.n], p[F.n:]
            tally = _Tally()
            gap = minimal_time(M, y, F.values_at(x)).value
            if not gap < spec.epsilon:
                return tally
            lhs = minimal_time(L, x, F.preimage_at(y)).value
            rhs = psi(gap)
            tally.add(
                classify(lhs, rhs, spec.slack, strict=False),
                lambda: Witness(x=x.tolist(), y=y.tolist(), t=gap, lhs=lhs, rhs=rhs, violation=_violation(lhs, rhs)),
            )
            return tally

        tally = _merge(map_items(evaluate, grid))
        return _verdict(Property.regular, psi, tally, spec, grid.shape[0], 0)

    return _with_retries(run, spec, retries)


def check_continuity(
    F: SetValuedMap,
    base: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    psi: RateFunction,
    spec: NeighborhoodSpec,
    retries: int = 0,
) -> Verdict:
    """T_M(y, F(x')) <= psi(T_L(x', x)) for x, x' in U and y in F(x) within V."""
    _check_base(F, base)

    def run(spec: NeighborhoodSpec) -> Verdict:
        center = np.concatenate([base.x, base.x])
        pairs = box_grid(center, spec.rho_x, spec.grid_density, spec.max_points, spec.seed, blocks=[F.n, F.n])

        def evaluate(p: np.ndarray) -> _Tally:
            x, x_other = p[: F.n], p[F.n:]
            tally = _Tally()
            move = point_minimal_time(L, x_other, x)
            if math.isinf(move):
                return tally
            rhs = psi(move)
            target = F.values_at(x_other)
            for y in F.values_at(x).sample_near(base.y, spec.rho_y, _VALUE_DENSITY, spec.seed):
                lhs = minimal_time(M, y, target).value
                tally.add(
                    classify(lhs, rhs, spec.slack, strict=False),
                    lambda: Witness(
                        x=x.tolist(), y=y.tolist(), t=move, target=x_other.tolist(),
                        lhs=lhs, rhs=rhs, violation=_violation(lhs, rhs),
                    ),
                )
            return tally

        tally = _merge(map_items(evaluate, pairs))
        return _verdict(Property.continuous, psi, tally, spec, pairs.shape[0], 0)

    return _with_retries(run, spec, retries)


def _merge(tallies: list[_Tally]) -> _Tally:
    total = _Tally()
    for tally in tallies:
        total = total.merge(tally)
    return total


def estimate_modulus(
    prop: Property | str,
    F: SetValuedMap,
    base: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    r: float,
    spec: NeighborhoodSpec,
    tolerance: float = BISECTION_TOL,
    c_start: float = 1.0,
    c_floor: float = 1e-6,
    c_ceiling: float = 1e6,
    retries: int = 0,
) -> ModulusEstimate:
    """
    Bracket the largest c for which the property holds with phi(t) = c t^r.

    Regularity and continuity are checked with psi = phi^-1, so all three
    brackets live on the same c axis; `ModulusEstimate.reciprocal` converts
    to the psi-form modulus.
    """
    prop = Property(prop)
    if r < 1:
        raise ValueError(f"rate r must be at least 1, got {r}")
    trace: list[BisectionStep] = []

    def passes(c: float) -> bool:
        phi = PowerRate(c=c, r=r)
        if prop is Property.open:
            verdict = check_openness(F, base, L, M, phi, spec, retries)
        elif prop is Property.regular:
            verdict = check_regularity(F, base, L, M, phi.inverse(), spec, retries)
        else:
            verdict = check_continuity(F, base, L, M, phi.inverse(), spec, retries)
        trace.append(BisectionStep(c=c, status=verdict.status))
        logger.debug("%s at c=%.6g: %s", prop.value, c, verdict.status.value)
        return verdict.status is Status.holds

    lo: float | None = None
    hi: float | None = None
    c = c_start
    if passes(c):
        lo = c
        while hi is None:
            c *= 2.0
            if c > c_ceiling:
                hi = math.inf
            elif passes(c):
                lo = c
            else:
                hi = c
    else:
        hi = c
        while lo is None:
            c /= 2.0
            if c < c_floor:
                lo = 0.0
            elif passes(c):
                lo = c
            else:
                hi = c

    while 0 < lo and hi < math.inf and hi / lo > 1.0 + tolerance:
        mid = math.sqrt(lo * hi)
        if passes(mid):
            lo = mid
        else:
            hi = mid

    logger.info("%s modulus at rate %g in [%.6g, %.6g]", prop.value, r, lo, hi)
    return ModulusEstimate(property=prop, rate=r, c_lo=lo, c_hi=hi, trace=trace, grid=spec.metadata())


def rate_convention_note(phi: RateFunction) -> str | None:
    if isinstance(phi, PowerRate) and phi.r != 1 and phi.c != 1:
        inv = phi.inverse()
        return (
            f"exact inverse of {phi.describe()} has modulus {inv.c:.6g} at rate {inv.r:.6g}; "
            f"the 1/c convention would give {1.0 / phi.c:.6g}"
        )
    return None


def equivalence_harness(
    F: SetValuedMap,
    base: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    phi: RateFunction,
    spec: NeighborhoodSpec,
    retries: int = 0,
) -> EquivalenceReport:
    """
    Openness of F for (L, M) with phi, regularity of F for (L, -M) with
    phi^-1 and continuity of F^-1 for (-M, L) with phi^-1, side by side.
    """
    psi = phi.inverse()
    openness = check_openness(F, base, L, M, phi, spec, retries)
    regularity = check_regularity(F, base, L, M.negate(), psi, spec, retries)
    continuity = check_continuity(F.inverse(), base.swapped(), M.negate(), L, psi, spec.swapped(), retries)

    verdicts = [openness, regularity, continuity]
    conclusive = all(v.status is not Status.inconclusive for v in verdicts)
    decided = {v.status for v in verdicts if v.status is not Status.inconclusive}
    agree = len(decided) <= 1
    if not agree:
        logger.warning(
            "verdicts disagree: open=%s regular=%s continuous=%s",
            openness.status.value, regularity.status.value, continuity.status.value,
        )
    return EquivalenceReport(
        openness=openness,
        regularity=regularity,
        continuity=continuity,
        agree=agree,
        conclusive=conclusive,
        rate_note=rate_convention_note(phi),
    )
