from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from dirreg.config import MEMBERSHIP_TOL
from dirreg.models.cones import DirectionSet, PolyhedralCone, cone_rays
from dirreg.models.geometry import Polyhedron


class NormalKind(str, enum.Enum):
    regular = "regular"
    limiting = "limiting"


@dataclass(frozen=True, eq=False)
class NormalConeRep:
    """
    Directional normal cone at `base_point`; a single convex cone for the
    regular kind, a finite union for the limiting kind.
    """

    base_point: np.ndarray
    cones: tuple[PolyhedralCone, ...]
    kind: NormalKind
    L: DirectionSet
    M: DirectionSet

    @property
    def cone(self) -> PolyhedralCone:
        return self.cones[0]

    def contains(self, w: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        return any(c.contains(w, tol) for c in self.cones)


@dataclass(frozen=True)
class SlicePiece:
    inequalities: Polyhedron
    points: np.ndarray
    rays: np.ndarray
    cone: int


@dataclass(frozen=True, eq=False)
class CoderivativeSlice:
    """{x* : (x*, -y*) in N} for a fixed y*, one polyhedron per normal cone piece."""

    y_star: np.ndarray
    kind: NormalKind
    pieces: tuple[SlicePiece, ...] = field(default_factory=tuple)

    @classmethod
    def build(cls, y_star: np.ndarray, kind: NormalKind, normal: NormalConeRep, n: int) -> CoderivativeSlice:
        pieces = []
        for index, cone in enumerate(normal.cones):
            H = cone.halfspace_matrix
            if H.shape[0] == 0:
                region = Polyhedron.full(n)
            else:
                # H_x x* - H_y y* >= 0
                region = Polyhedron.from_inequalities(-H[:, :n], -H[:, n:] @ y_star)
            if region.A.shape[0] and region.is_empty:
                continue
            points = region.vertices()
            if points.shape[0] == 0:
                anchor = region.nearest_point(np.zeros(n))
                assert anchor is not None
                points = anchor[np.newaxis, :]
            rays = cone_rays(-region.A) if region.A.shape[0] else cone_rays(np.zeros((0, n)))
            pieces.append(SlicePiece(inequalities=region, points=points, rays=rays, cone=index))
        return cls(y_star=y_star, kind=kind, pieces=tuple(pieces))

    def is_empty(self) -> bool:
        return not self.pieces

    def contains(self, x_star: np.ndarray, tol: float = 1e-7) -> bool:
        return any(p.inequalities.contains(x_star, tol) for p in self.pieces)
