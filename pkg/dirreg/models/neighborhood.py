from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, model_validator

from dirreg.config import (
    BOUNDARY_OFFSET,
    BOUNDARY_SLACK,
    GRID_DENSITY,
    MAX_GRID_POINTS,
    T_COUNT,
    T_RATIO,
    VARIATION_SCALE_COUNT,
    VARIATION_SCALE_RATIO,
    VARIATION_SCALE_START,
)
from dirreg.models.results import GridMetadata
from dirreg.services.utils.sampling import geometric_values


class NeighborhoodSpec(BaseModel):
    """Radii of U and V, the localization epsilon and the tested t values."""

    model_config = ConfigDict(frozen=True)

    rho_x: PositiveFloat
    rho_y: PositiveFloat
    epsilon: PositiveFloat
    t_values: tuple[float, ...]
    grid_density: int = Field(default=GRID_DENSITY, ge=3)
    direction_count: int | None = None
    radial_fractions: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    slack: float = BOUNDARY_SLACK
    boundary_offset: float = BOUNDARY_OFFSET
    max_points: int = MAX_GRID_POINTS
    seed: int = 0
    shrink_count: int = 0

    @model_validator(mode="after")
    def t_values_inside_epsilon(self) -> NeighborhoodSpec:
        if not self.t_values:
            raise ValueError("t_values must not be empty")
        if any(not 0 < t < self.epsilon for t in self.t_values):
            raise ValueError(f"t_values must lie in (0, epsilon={self.epsilon})")
        if any(b >= a for a, b in zip(self.t_values, self.t_values[1:])):
            raise ValueError("t_values must be strictly decreasing")
        return self

    @classmethod
    def geometric(
        cls,
        rho_x: float,
        rho_y: float,
        epsilon: float,
        count: int = T_COUNT,
        ratio: float = T_RATIO,
        **kwargs: object,
    ) -> NeighborhoodSpec:
        """t values epsilon/2, epsilon/2 * ratio, ..."""
        return cls(
            rho_x=rho_x,
            rho_y=rho_y,
            epsilon=epsilon,
            t_values=tuple(geometric_values(epsilon / 2.0, ratio, count)),
            **kwargs,  # type: ignore[arg-type]
        )

    def shrunk(self) -> NeighborhoodSpec:
        epsilon = self.epsilon / 2.0
        kept = tuple(t for t in self.t_values if t < epsilon)
        if not kept:
            kept = tuple(geometric_values(epsilon / 2.0, T_RATIO, len(self.t_values)))
        return self.model_copy(
            update={
                "rho_x": self.rho_x / 2.0,
                "rho_y": self.rho_y / 2.0,
                "epsilon": epsilon,
                "t_values": kept,
                "shrink_count": self.shrink_count + 1,
            }
        )

    def swapped(self) -> NeighborhoodSpec:
        """The same neighborhood seen from the inverse mapping."""
        return self.model_copy(update={"rho_x": self.rho_y, "rho_y": self.rho_x})

    def scaled(self, grid_scale: int) -> NeighborhoodSpec:
        return self.model_copy(update={"grid_density": (self.grid_density - 1) * grid_scale + 1})

    def metadata(self, points: int = 0, checks: int = 0, directions: int = 0) -> GridMetadata:
        return GridMetadata(
            rho_x=self.rho_x,
            rho_y=self.rho_y,
            epsilon=self.epsilon,
            t_values=list(self.t_values),
            grid_density=self.grid_density,
            points=points,
            checks=checks,
            directions=directions,
            shrink_count=self.shrink_count,
            seed=self.seed,
        )


class ProbeSpec(BaseModel):
    """Finite stand-in for the vanishing sequences of a variation: scales, base offsets and search resolution."""

    model_config = ConfigDict(frozen=True)

    scales: tuple[float, ...] = tuple(
        geometric_values(VARIATION_SCALE_START, VARIATION_SCALE_RATIO, VARIATION_SCALE_COUNT)
    )
    offset: PositiveFloat = 0.01
    base_directions: int | None = None
    direction_count: int | None = None
    radial_fractions: tuple[float, ...] = (0.5, 1.0)
    tolerance: PositiveFloat = 1e-6
    slack: float = BOUNDARY_SLACK
    search_steps: int = Field(default=24, ge=2)
    bisection_steps: int = Field(default=30, ge=0)

    @model_validator(mode="after")
    def scales_decreasing(self) -> ProbeSpec:
        if not self.scales or any(s <= 0 for s in self.scales):
            raise ValueError("scales must be positive")
        if any(b >= a for a, b in zip(self.scales, self.scales[1:])):
            raise ValueError("scales must be strictly decreasing")
        return self

    def refined(self) -> ProbeSpec:
        """One extra halving at the fine end."""
        return self.model_copy(update={"scales": (*self.scales, self.scales[-1] / 2.0)})
