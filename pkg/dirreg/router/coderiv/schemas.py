from typing import List

from pydantic import BaseModel

from dirreg.models.results import CriterionReport

# -----------------------------------------------------------------------
# Report Rows
# -----------------------------------------------------------------------


class CriterionRow(BaseModel):
    side: str
    c: float
    index: int
    point: List[float]
    y_star: List[float]
    x_star: List[float]
    v: List[float]
    u: List[float]
    slack: float
    cone: int
    passed: bool

    @classmethod
    def records(cls, side: str, report: CriterionReport) -> List["CriterionRow"]:
        return [
            cls(side=side, c=report.c, index=i, passed=report.passed, **record.model_dump())
            for i, record in enumerate(report.records)
        ]
