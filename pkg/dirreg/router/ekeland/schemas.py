from typing import List

from pydantic import BaseModel

from dirreg.models.results import RefinementTrace

# -----------------------------------------------------------------------
# Report Rows
# -----------------------------------------------------------------------


class PathRow(BaseModel):
    step: int
    index: int
    x: List[float]
    y: List[float]
    value: float
    epsilon: float
    final: bool


class RefineRow(BaseModel):
    index: int
    x: List[float]
    y: List[float]
    step_norm: float
    step_bound: float
    residual: float
    residual_bound: float
    status: str

    @classmethod
    def trace(cls, trace: RefinementTrace) -> List["RefineRow"]:
        return [cls(status=trace.status.value, **step.model_dump()) for step in trace.steps]
