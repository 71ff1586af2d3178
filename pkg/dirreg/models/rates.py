from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class RateFunction(abc.ABC):
    """Strictly increasing continuous phi with phi(0) = 0 and a closed-form inverse."""

    @abc.abstractmethod
    def __call__(self, t: float) -> float: ...

    @abc.abstractmethod
    def inverse(self) -> RateFunction: ...

    @abc.abstractmethod
    def describe(self) -> str: ...


@dataclass(frozen=True)
class PowerRate(RateFunction):
    """phi(t) = c * t**r."""

    c: float
    r: float

    def __post_init__(self) -> None:
        if not (self.c > 0 and self.r > 0):
            raise ValueError(f"power rate needs c > 0 and r > 0, got c={self.c}, r={self.r}")

    def __call__(self, t: float) -> float:
        if math.isinf(t):
            return math.inf
        return self.c * max(t, 0.0) ** self.r

    def inverse(self) -> PowerRate:
        return PowerRate(c=self.c ** (-1.0 / self.r), r=1.0 / self.r)

    def describe(self) -> str:
        return f"{self.c:.6g}*t^{self.r:.6g}"


@dataclass(frozen=True)
class PiecewiseLinearRate(RateFunction):
    """
    Linear interpolation through (0, 0) and the given knots, extended past
    the last knot with the last slope.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        ts = [0.0] + [k[0] for k in self.knots]
        vs = [0.0] + [k[1] for k in self.knots]
        if not self.knots:
            raise ValueError("piecewise rate needs at least one knot")
        if any(b <= a for a, b in zip(ts, ts[1:])) or any(b <= a for a, b in zip(vs, vs[1:])):
            raise ValueError("piecewise rate knots must be strictly increasing in both coordinates")

    @classmethod
    def of(cls, knots: Sequence[Sequence[float]]) -> PiecewiseLinearRate:
        pairs = tuple((float(t), float(v)) for t, v in knots if not (t == 0 and v == 0))
        return cls(knots=pairs)

    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        ts = np.array([0.0] + [k[0] for k in self.knots])
        vs = np.array([0.0] + [k[1] for k in self.knots])
        return ts, vs

    def __call__(self, t: float) -> float:
        if math.isinf(t):
            return math.inf
        ts, vs = self._arrays()
        t = max(t, 0.0)
        if t <= ts[-1]:
            return float(np.interp(t, ts, vs))
        slope = (vs[-1] - vs[-2]) / (ts[-1] - ts[-2])
        return float(vs[-1] + slope * (t - ts[-1]))

    def inverse(self) -> PiecewiseLinearRate:
        return PiecewiseLinearRate(knots=tuple((v, t) for t, v in self.knots))

    def describe(self) -> str:
        return "pl(" + ";".join(f"{t:.6g}:{v:.6g}" for t, v in self.knots) + ")"
