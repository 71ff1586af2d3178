"""
r-th directional variations on finite scale and base-point sequences.

A direction v is a member when, at every tested scale t and base point
(x_k, y_k), some v_k of the scaled image (F(B[x_k, t] within x_k + cone L) - y_k) / t^r
satisfies v - v_k in cone M, and |v - v_k| stays within the tolerance.
Balls are closed.
"""
import logging
import math
from typing import Sequence

import numpy as np

from dirreg.config import BISECTION_TOL
from dirreg.exceptions import ScopeError
from dirreg.models.cones import DirectionSet
from dirreg.models.maps import BasePoint, SetValuedMap
from dirreg.models.neighborhood import ProbeSpec
from dirreg.models.results import (
    BisectionStep,
    ProbeRecord,
    Status,
    Verdict,
    VariationModulus,
    VariationProbe,
    Witness,
)
from dirreg.services.cones import minimal_time
from dirreg.services.utils.parallel import map_items
from dirreg.services.utils.sampling import unique_rows

logger = logging.getLogger(__name__)


def base_sequence(F: SetValuedMap, base: BasePoint, L: DirectionSet, probe: ProbeSpec) -> list[tuple[np.ndarray, np.ndarray]]:
    """(x, y) followed by graph points at distance h and 2h along the directions of L."""
    points = [(base.x, base.y)]
    count = probe.base_directions or (2 if F.n == 1 else 4)
    for step in (probe.offset, 2.0 * probe.offset):
        for u in L.sample(count):
            x = base.x + step * u
            y = F.values_at(x).nearest(base.y)
            if y is None:
                continue
            points.append((x, y))
    return points


def _in_scaled_image(
    F: SetValuedMap,
    L: DirectionSet,
    x: np.ndarray,
    y: np.ndarray,
    t: float,
    r: float,
    z: np.ndarray,
    slack: float,
) -> bool:
    reach = minimal_time(L, x, F.preimage_at(y + t ** r * z)).value
    return reach <= t * (1.0 + slack)


def _search_directions(M: DirectionSet, v: np.ndarray, count: int | None) -> np.ndarray:
    rows = [M.sample(count)]
    norm = float(np.linalg.norm(v))
    if norm > 0:
        # v - |v| (v / |v|) = 0 is always in the image
        rows.append((v / norm)[np.newaxis, :])
    return unique_rows(np.vstack(rows))


def _residual(
    F: SetValuedMap,
    L: DirectionSet,
    M: DirectionSet,
    x: np.ndarray,
    y: np.ndarray,
    t: float,
    r: float,
    v: np.ndarray,
    probe: ProbeSpec,
    reach: float,
) -> tuple[float, np.ndarray | None]:
    """
    Smallest s with v - s m in the scaled image for a sampled direction m
    of M, searched on [0, reach]; (inf, None) when nothing is found.
    """
    if _in_scaled_image(F, L, x, y, t, r, v, probe.slack):
        return 0.0, v.copy()

    best, witness = math.inf, None
    steps = np.linspace(0.0, reach, probe.search_steps + 1)[1:]
    for m in _search_directions(M, v, probe.direction_count):
        previous = 0.0
        for s in steps:
            if s >= best:
                break
            if _in_scaled_image(F, L, x, y, t, r, v - s * m, probe.slack):
                lo, hi = previous, float(s)
                for _ in range(probe.bisection_steps):
                    mid = 0.5 * (lo + hi)
                    if _in_scaled_image(F, L, x, y, t, r, v - mid * m, probe.slack):
                        hi = mid
                    else:
                        lo = mid
                if hi < best:
                    best, witness = hi, v - hi * m
                break
            previous = float(s)
    return best, witness


def variation_membership(
    F: SetValuedMap,
    base: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    r: float,
    v: Sequence[float] | np.ndarray,
    probe: ProbeSpec | None = None,
    exhaustive: bool = True,
) -> VariationProbe:
    """
    Evidence for v in the r-th directional variation at (x, y).

    With `exhaustive=False` the search stops at the first record whose
    residual exceeds the tolerance, and residual searches only look as far
    as the tolerance.
    """
    probe = probe or ProbeSpec()
    if r <= 0:
        raise ValueError("rate r must be positive")
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.shape[0] != F.m:
        raise ValueError(f"direction needs {F.m} coordinates, got {v.shape[0]}")

    allowance = probe.tolerance * (1.0 + float(np.linalg.norm(v)))
    reach = float(np.linalg.norm(v)) + 1.0 if exhaustive else allowance
    bases = base_sequence(F, base, L, probe)

    records: list[ProbeRecord] = []
    max_residual = 0.0
    for t in probe.scales:
        for index, (x, y) in enumerate(bases):
            residual, witness = _residual(F, L, M, x, y, t, r, v, probe, reach)
            records.append(
                ProbeRecord(
                    scale=t,
                    base_index=index,
                    x=x.tolist(),
                    y=y.tolist(),
                    residual=residual,
                    witness=None if witness is None else witness.tolist(),
                )
            )
            max_residual = max(max_residual, residual)
            if not exhaustive and residual > allowance:
                break
        if not exhaustive and max_residual > allowance:
            break

    member = max_residual <= allowance
    logger.debug("variation at r=%g, v=%s: max residual %.3g", r, v.tolist(), max_residual)
    return VariationProbe(
        v=v.tolist(),
        r=r,
        scales=list(probe.scales),
        base_points=[np.concatenate([x, y]).tolist() for x, y in bases],
        records=records,
        max_residual=max_residual,
        member=member,
        tolerance=probe.tolerance,
    )


def _directions(M: DirectionSet, probe: ProbeSpec) -> np.ndarray:
    return M.sample(probe.direction_count)


def variation_modulus(
    F: SetValuedMap,
    base: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    r: float,
    probe: ProbeSpec | None = None,
    tolerance: float = BISECTION_TOL,
    c_floor: float = 1e-6,
    c_ceiling: float = 1e6,
) -> VariationModulus:
    """Bracket the largest c with c u in the variation for every sampled unit direction u of M."""
    probe = probe or ProbeSpec()
    if r < 1:
        raise ValueError(f"rate r must be at least 1, got {r}")
    directions = _directions(M, probe)
    trace: list[BisectionStep] = []

    def passes(c: float) -> bool:
        ok = all(
            variation_membership(F, base, L, M, r, c * u, probe, exhaustive=False).member
            for u in directions
        )
        trace.append(BisectionStep(c=c, status=Status.holds if ok else Status.fails))
        logger.debug("variation at c=%.6g: %s", c, "member" if ok else "not a member")
        return ok

    lo: float | None = None
    hi: float | None = None
    c = 1.0
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

    logger.info("variation modulus at rate %g in [%.6g, %.6g]", r, lo, hi)
    return VariationModulus(r=r, c_bar_lo=lo, c_bar_hi=hi, directions=directions.tolist(), trace=trace)


def criterion_probes(
    F: SetValuedMap,
    base: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    r: float,
    c: float,
    probe: ProbeSpec | None = None,
) -> list[VariationProbe]:
    """Membership probes for f c u, u a sampled unit direction of M and f a radial fraction."""
    probe = probe or ProbeSpec()
    if not (L.is_convex() and M.is_convex()):
        raise ScopeError("the variation criterion needs convex cone L and cone M")
    if c <= 0:
        raise ValueError("modulus must be positive")
    candidates = [f * c * u for f in probe.radial_fractions for u in _directions(M, probe)]
    return map_items(lambda v: variation_membership(F, base, L, M, r, v, probe), candidates)


def summarize_probes(base: BasePoint, r: float, c: float, probes: list[VariationProbe]) -> Verdict:
    failing = [p for p in probes if not p.member]
    if not failing:
        return Verdict(property="variation", rate=f"{c:g}*t^{r:g}", status=Status.holds, checked=len(probes))
    worst = min(failing, key=lambda p: tuple(p.v))
    allowance = worst.tolerance * (1.0 + float(np.linalg.norm(worst.v)))
    return Verdict(
        property="variation",
        rate=f"{c:g}*t^{r:g}",
        status=Status.fails,
        witness=Witness(
            x=base.x.tolist(),
            y=base.y.tolist(),
            target=worst.v,
            lhs=worst.max_residual,
            rhs=allowance,
            violation=worst.max_residual - allowance,
        ),
        checked=len(probes),
    )


def check_variation_criterion(
    F: SetValuedMap,
    base: BasePoint,
    L: DirectionSet,
    M: DirectionSet,
    r: float,
    c: float,
    probe: ProbeSpec | None = None,
) -> Verdict:
    """Every sampled direction of c B within cone M belongs to the r-th variation."""
    return summarize_probes(base, r, c, criterion_probes(F, base, L, M, r, c, probe))
