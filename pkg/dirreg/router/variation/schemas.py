from typing import List, Optional

from pydantic import BaseModel

from dirreg.models.results import VariationModulus, VariationProbe

# -----------------------------------------------------------------------
# Report Rows
# -----------------------------------------------------------------------


class ProbeRow(BaseModel):
    v: List[float]
    r: float
    scale: float
    base_index: int
    x: List[float]
    y: List[float]
    residual: float
    witness: Optional[List[float]] = None
    member: bool

    @classmethod
    def records(cls, probe: VariationProbe) -> List["ProbeRow"]:
        return [
            cls(v=probe.v, r=probe.r, member=probe.member, **record.model_dump())
            for record in probe.records
        ]


class DirectionRow(BaseModel):
    v: List[float]
    r: float
    c: float
    max_residual: float
    tolerance: float
    member: bool


class VariationModulusRow(BaseModel):
    r: float
    step: int
    c: float
    status: str
    c_bar_lo: float
    c_bar_hi: float

    @classmethod
    def trace(cls, estimate: VariationModulus) -> List["VariationModulusRow"]:
        return [
            cls(
                r=estimate.r,
                step=i,
                c=step.c,
                status=step.status.value,
                c_bar_lo=estimate.c_bar_lo,
                c_bar_hi=estimate.c_bar_hi,
            )
            for i, step in enumerate(estimate.trace)
        ]
