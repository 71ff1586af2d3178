from __future__ import annotations

import enum
import math

from pydantic import BaseModel, model_validator


class Status(str, enum.Enum):
    holds = "holds"
    fails = "fails"
    inconclusive = "inconclusive"


class Property(str, enum.Enum):
    open = "open"
    regular = "regular"
    continuous = "continuous"


class GridMetadata(BaseModel):
    rho_x: float
    rho_y: float
    epsilon: float
    t_values: list[float]
    grid_density: int
    points: int = 0
    checks: int = 0
    directions: int = 0
    shrink_count: int = 0
    seed: int = 0


class Witness(BaseModel):
    """One evaluated inequality lhs <= rhs (strict for openness)."""

    x: list[float]
    y: list[float]
    t: float | None = None
    target: list[float] | None = None
    lhs: float
    rhs: float
    violation: float

    def sort_key(self) -> tuple[float, ...]:
        return (*self.x, *self.y, self.t if self.t is not None else -1.0, *(self.target or []))


class Verdict(BaseModel):
    property: str
    rate: str
    status: Status
    witness: Witness | None = None
    grid: GridMetadata | None = None
    checked: int = 0

    @model_validator(mode="after")
    def witness_matches_status(self) -> Verdict:
        if (self.status is Status.holds) != (self.witness is None):
            raise ValueError("a witness is present exactly when the verdict does not hold")
        return self

    @property
    def holds_on_grid(self) -> bool:
        return self.status is Status.holds


class BisectionStep(BaseModel):
    c: float
    status: Status


class ModulusEstimate(BaseModel):
    property: Property
    rate: float
    c_lo: float
    c_hi: float
    trace: list[BisectionStep]
    grid: GridMetadata | None = None

    @model_validator(mode="after")
    def ordered(self) -> ModulusEstimate:
        if not self.c_lo < self.c_hi:
            raise ValueError(f"modulus bracket is not ordered: [{self.c_lo}, {self.c_hi}]")
        return self

    def reciprocal(self) -> tuple[float, float]:
        """Bracket of 1/c."""
        lo = 0.0 if math.isinf(self.c_hi) else 1.0 / self.c_hi
        hi = math.inf if self.c_lo == 0 else 1.0 / self.c_lo
        return lo, hi


class EquivalenceReport(BaseModel):
    openness: Verdict
    regularity: Verdict
    continuity: Verdict
    agree: bool
    conclusive: bool
    rate_note: str | None = None

    def verdicts(self) -> list[Verdict]:
        return [self.openness, self.regularity, self.continuity]


class CriterionRecord(BaseModel):
    point: list[float]
    y_star: list[float]
    x_star: list[float]
    v: list[float]
    u: list[float]
    slack: float
    cone: int = 0


class CriterionReport(BaseModel):
    c: float
    records: list[CriterionRecord]
    min_slack: float
    passed: bool
    tolerance: float

    @property
    def worst(self) -> CriterionRecord | None:
        if not self.records:
            return None
        return min(self.records, key=lambda r: r.slack)


class CriterionBracket(BaseModel):
    estimate: ModulusEstimate
    below: CriterionReport
    above: CriterionReport | None = None
    consistent: bool


class ProbeRecord(BaseModel):
    scale: float
    base_index: int
    x: list[float]
    y: list[float]
    residual: float
    witness: list[float] | None = None


class VariationProbe(BaseModel):
    v: list[float]
    r: float
    scales: list[float]
    base_points: list[list[float]]
    records: list[ProbeRecord]
    max_residual: float
    member: bool
    tolerance: float


class VariationModulus(BaseModel):
    r: float
    c_bar_lo: float
    c_bar_hi: float
    directions: list[list[float]]
    trace: list[BisectionStep]

    @model_validator(mode="after")
    def ordered(self) -> VariationModulus:
        if self.c_bar_lo > self.c_bar_hi:
            raise ValueError("variation modulus bracket is not ordered")
        return self


class EkelandResult(BaseModel):
    index: int
    x: list[float]
    y: list[float]
    value: float
    epsilon: float
    path: list[int]


class RefinementStatus(str, enum.Enum):
    converged = "converged"
    extrapolated = "extrapolated"
    failed = "failed"


class RefinementStep(BaseModel):
    index: int
    x: list[float]
    y: list[float]
    step_norm: float
    step_bound: float
    residual: float
    residual_bound: float


class RefinementTrace(BaseModel):
    steps: list[RefinementStep]
    status: RefinementStatus
    final_x: list[float]
    final_y: list[float]
    total_length: float
    t: float
    alpha: float
    r: float

    def step_ratios(self) -> list[float]:
        norms = [s.step_norm for s in self.steps]
        return [b / a for a, b in zip(norms, norms[1:]) if a > 0]
