from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from dirreg.config import MEMBERSHIP_TOL, UNIT_TOL
from dirreg.exceptions import RepresentationError
from dirreg.services.utils.ldp import project_onto_generators, project_onto_halfspaces
from dirreg.services.utils.sampling import cap_directions, sphere_directions, unique_rows

logger = logging.getLogger(__name__)

# above this many row subsets the ray enumeration gets logged
_RAY_COMBINATION_WARNING = 50_000


def cone_rays(H: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """
    Generators of {u : H u >= 0}: both signs of a lineality basis plus the
    extreme rays of the pointed part, as unit rows.
    """
    d = H.shape[1]
    if H.shape[0] == 0:
        return np.vstack([np.eye(d), -np.eye(d)])

    lineality = null_space(H, rcond=1e-10)
    rays = [s * lineality[:, j] for j in range(lineality.shape[1]) for s in (1.0, -1.0)]

    k = d - lineality.shape[1]
    if k > 0:
        basis = null_space(lineality.T) if lineality.shape[1] else np.eye(d)
        reduced = H @ basis
        if k == 1:
            for s in (1.0, -1.0):
                if np.all(reduced[:, 0] * s >= -tol):
                    rays.append(basis[:, 0] * s)
        else:
            combos = math.comb(reduced.shape[0], k - 1)
            if combos > _RAY_COMBINATION_WARNING:
                logger.warning("enumerating %d row subsets for extreme rays", combos)
            for rows in itertools.combinations(range(reduced.shape[0]), k - 1):
                kernel = null_space(reduced[list(rows)], rcond=1e-10)
                if kernel.shape[1] != 1:
                    continue
                z = kernel[:, 0]
                for s in (1.0, -1.0):
                    if np.all(reduced @ (s * z) >= -tol):
                        rays.append(basis @ (s * z))

    if not rays:
        return np.zeros((0, d))
    arr = np.array(rays)
    arr = arr / np.linalg.norm(arr, axis=1, keepdims=True)
    return unique_rows(arr, decimals=9)


@dataclass(frozen=True, eq=False)
class PolyhedralCone:
    """
    Closed convex cone given by generators (nonnegative hull of the rows),
    by inner normals ({u : <a_j, u> >= 0}), or by both.
    """

    dimension: int
    generators: np.ndarray | None = None
    halfspaces: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.generators is None and self.halfspaces is None:
            raise RepresentationError("a polyhedral cone needs generators or halfspace normals")
        for name, arr in (("generator", self.generators), ("halfspace normal", self.halfspaces)):
            if arr is not None and arr.shape[1] != self.dimension:
                raise RepresentationError(f"{name} dimension {arr.shape[1]} != {self.dimension}")
        if self.generators is not None:
            for i, g in enumerate(self.generators):
                if np.linalg.norm(g) <= UNIT_TOL:
                    raise RepresentationError(f"generator {i} is the zero vector")

    @classmethod
    def from_generators(cls, generators: Sequence[Sequence[float]] | np.ndarray, dimension: int | None = None) -> PolyhedralCone:
        G = np.asarray(generators, dtype=float)
        dim = dimension if dimension is not None else G.shape[-1]
        return cls(dimension=dim, generators=G.reshape(-1, dim))

    @classmethod
    def from_halfspaces(cls, normals: Sequence[Sequence[float]] | np.ndarray, dimension: int | None = None) -> PolyhedralCone:
        H = np.asarray(normals, dtype=float)
        dim = dimension if dimension is not None else H.shape[-1]
        return cls(dimension=dim, halfspaces=H.reshape(-1, dim))

    @classmethod
    def full(cls, dimension: int) -> PolyhedralCone:
        return cls(dimension=dimension, halfspaces=np.zeros((0, dimension)))

    @classmethod
    def orthant(cls, dimension: int) -> PolyhedralCone:
        return cls(dimension=dimension, generators=np.eye(dimension), halfspaces=np.eye(dimension))

    @classmethod
    def ray(cls, u: Sequence[float] | np.ndarray) -> PolyhedralCone:
        u = np.asarray(u, dtype=float).reshape(1, -1)
        return cls(dimension=u.shape[1], generators=u)

    @cached_property
    def generator_matrix(self) -> np.ndarray:
        if self.generators is not None:
            return self.generators
        assert self.halfspaces is not None
        return cone_rays(self.halfspaces)

    @cached_property
    def halfspace_matrix(self) -> np.ndarray:
        if self.halfspaces is not None:
            return self.halfspaces
        assert self.generators is not None
        return -cone_rays(-self.generators)

    def is_full_space(self) -> bool:
        return self.halfspace_matrix.shape[0] == 0 or bool(np.all(np.abs(self.halfspace_matrix) <= UNIT_TOL))

    def is_trivial(self) -> bool:
        """True for the zero cone."""
        return self.generator_matrix.shape[0] == 0

    @cached_property
    def consistency_defect(self) -> float:
        """Largest violation between the two representations (0 when only one is stored)."""
        if self.generators is None or self.halfspaces is None:
            return 0.0
        defect = 0.0
        if self.generators.shape[0] and self.halfspaces.shape[0]:
            defect = max(defect, float(-(self.halfspaces @ self.generators.T).min()))
        for r in cone_rays(self.halfspaces):
            p = project_onto_generators(self.generators, r)
            defect = max(defect, float(np.linalg.norm(p - r)))
        return defect

    def check_consistency(self, tol: float = MEMBERSHIP_TOL) -> None:
        if self.consistency_defect > max(tol, 1e-7):
            raise RepresentationError(
                f"generators and halfspace normals describe different cones (defect {self.consistency_defect:.3g})"
            )

    def contains(self, v: Sequence[float] | np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        v = np.asarray(v, dtype=float)
        self.check_consistency()
        scale = max(1.0, float(np.linalg.norm(v)))
        if self.halfspaces is not None:
            return bool(np.all(self.halfspaces @ v >= -tol * scale))
        return bool(np.linalg.norm(self.project(v) - v) <= tol * scale)

    def project(self, w: Sequence[float] | np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if self.halfspaces is not None:
            return project_onto_halfspaces(self.halfspaces, w)
        assert self.generators is not None
        return project_onto_generators(self.generators, w)

    def support(self, w: Sequence[float] | np.ndarray) -> float:
        """max <w, u> over u in the cone with |u| <= 1."""
        return float(np.linalg.norm(self.project(w)))

    def polar(self) -> PolyhedralCone:
        if self.generators is not None:
            return PolyhedralCone(dimension=self.dimension, halfspaces=-self.generators)
        assert self.halfspaces is not None
        nonzero = np.linalg.norm(self.halfspaces, axis=1) > UNIT_TOL
        return PolyhedralCone(dimension=self.dimension, generators=-self.halfspaces[nonzero])

    def intersect(self, other: PolyhedralCone) -> PolyhedralCone:
        return PolyhedralCone(
            dimension=self.dimension,
            halfspaces=np.vstack([self.halfspace_matrix, other.halfspace_matrix]),
        )

    def product(self, other: PolyhedralCone) -> PolyhedralCone:
        H1, H2 = self.halfspace_matrix, other.halfspace_matrix
        H = np.zeros((H1.shape[0] + H2.shape[0], self.dimension + other.dimension))
        H[: H1.shape[0], : self.dimension] = H1
        H[H1.shape[0]:, self.dimension:] = H2
        return PolyhedralCone(dimension=self.dimension + other.dimension, halfspaces=H)


class DirectionKind(enum.Enum):
    sphere = "sphere"
    finite = "finite"
    cap = "cap"


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Nonempty closed subset of the unit sphere in R^dimension."""

    dimension: int
    kind: DirectionKind
    directions: np.ndarray | None = None
    cone: PolyhedralCone | None = None

    @classmethod
    def sphere(cls, dimension: int) -> DirectionSet:
        return cls(dimension=dimension, kind=DirectionKind.sphere)

    @classmethod
    def finite(cls, directions: Sequence[Sequence[float]] | np.ndarray) -> DirectionSet:
        D = np.atleast_2d(np.asarray(directions, dtype=float))
        if D.shape[0] == 0 or D.size == 0:
            raise RepresentationError("a direction set must contain at least one direction")
        for i, d in enumerate(D):
            if abs(np.linalg.norm(d) - 1.0) > UNIT_TOL:
                raise RepresentationError(f"direction {i} {d.tolist()} does not have unit norm")
        return cls(dimension=D.shape[1], kind=DirectionKind.finite, directions=D)

    @classmethod
    def cap(cls, cone: PolyhedralCone) -> DirectionSet:
        if cone.is_trivial():
            raise RepresentationError("the zero cone has no unit directions")
        return cls(dimension=cone.dimension, kind=DirectionKind.cap, cone=cone)

    @classmethod
    def from_cone(cls, cone: PolyhedralCone) -> DirectionSet:
        if cone.is_full_space():
            return cls.sphere(cone.dimension)
        return cls.cap(cone)

    def negate(self) -> DirectionSet:
        if self.kind is DirectionKind.sphere:
            return self
        if self.kind is DirectionKind.finite:
            assert self.directions is not None
            return DirectionSet(dimension=self.dimension, kind=self.kind, directions=-self.directions)
        assert self.cone is not None
        cone = self.cone
        return DirectionSet(
            dimension=self.dimension,
            kind=self.kind,
            cone=PolyhedralCone(
                dimension=cone.dimension,
                generators=None if cone.generators is None else -cone.generators,
                halfspaces=None if cone.halfspaces is None else -cone.halfspaces,
            ),
        )

    def cone_pieces(self) -> list[PolyhedralCone]:
        """cone(L) as a union of convex cones."""
        if self.kind is DirectionKind.sphere:
            return [PolyhedralCone.full(self.dimension)]
        if self.kind is DirectionKind.cap:
            assert self.cone is not None
            return [self.cone]
        assert self.directions is not None
        return [PolyhedralCone.ray(d) for d in self.directions]

    def is_convex(self) -> bool:
        if self.kind is not DirectionKind.finite:
            return True
        assert self.directions is not None
        return unique_rows(self.directions, decimals=12).shape[0] == 1

    def cone_contains(self, v: Sequence[float] | np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        v = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(v))
        if self.kind is DirectionKind.sphere or norm <= tol:
            return True
        if self.kind is DirectionKind.cap:
            assert self.cone is not None
            return self.cone.contains(v, tol)
        assert self.directions is not None
        return bool(np.min(np.linalg.norm(self.directions - v / norm, axis=1)) <= max(tol, 1e-9))

    def default_count(self) -> int:
        if self.kind is DirectionKind.sphere:
            return {1: 2, 2: 32}.get(self.dimension, 64)
        return 15

    def sample(self, count: int | None = None) -> np.ndarray:
        count = count or self.default_count()
        if self.kind is DirectionKind.sphere:
            return sphere_directions(self.dimension, count)
        if self.kind is DirectionKind.finite:
            assert self.directions is not None
            return self.directions
        assert self.cone is not None
        return cap_directions(self.cone.generator_matrix, count)

    def representative(self) -> np.ndarray:
        return self.sample()[0]

    def describe(self) -> str:
        if self.kind is DirectionKind.sphere:
            return f"sphere(R^{self.dimension})"
        if self.kind is DirectionKind.finite:
            assert self.directions is not None
            return "finite(" + "; ".join(" ".join(f"{c:g}" for c in d) for d in self.directions) + ")"
        assert self.cone is not None
        return "cap(" + "; ".join(" ".join(f"{c:g}" for c in g) for g in self.cone.generator_matrix) + ")"


@dataclass(frozen=True)
class MinimalTimeValue:
    value: float
    attaining_direction: np.ndarray | None = None
    attaining_time: float | None = None

    @classmethod
    def unreachable(cls) -> MinimalTimeValue:
        return cls(value=math.inf)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)
