from typing import List, Optional

from pydantic import BaseModel

from dirreg.models.results import ModulusEstimate, Verdict

# -----------------------------------------------------------------------
# Report Rows
# -----------------------------------------------------------------------


class VerdictRow(BaseModel):
    property: str
    rate: str
    status: str
    x: Optional[List[float]] = None
    y: Optional[List[float]] = None
    t: Optional[float] = None
    target: Optional[List[float]] = None
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    violation: Optional[float] = None
    points: int = 0
    checks: int = 0
    shrink_count: int = 0
    seed: int = 0

    @classmethod
    def of(cls, verdict: Verdict) -> "VerdictRow":
        w = verdict.witness
        grid = verdict.grid
        return cls(
            property=verdict.property,
            rate=verdict.rate,
            status=verdict.status.value,
            x=w.x if w else None,
            y=w.y if w else None,
            t=w.t if w else None,
            target=w.target if w else None,
            lhs=w.lhs if w else None,
            rhs=w.rhs if w else None,
            violation=w.violation if w else None,
            points=grid.points if grid else 0,
            checks=verdict.checked,
            shrink_count=grid.shrink_count if grid else 0,
            seed=grid.seed if grid else 0,
        )


class EquivalenceRow(VerdictRow):
    agree: bool
    conclusive: bool
    rate_note: Optional[str] = None


class ModulusRow(BaseModel):
    property: str
    rate: float
    step: int
    c: float
    status: str
    c_lo: float
    c_hi: float
    inverse_lo: float
    inverse_hi: float

    @classmethod
    def trace(cls, estimate: ModulusEstimate) -> List["ModulusRow"]:
        inverse_lo, inverse_hi = estimate.reciprocal()
        return [
            cls(
                property=estimate.property.value,
                rate=estimate.rate,
                step=i,
                c=step.c,
                status=step.status.value,
                c_lo=estimate.c_lo,
                c_hi=estimate.c_hi,
                inverse_lo=inverse_lo,
                inverse_hi=inverse_hi,
            )
            for i, step in enumerate(estimate.trace)
        ]
