from __future__ import annotations

import abc
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from dirreg.config import MEMBERSHIP_TOL
from dirreg.services.utils.ldp import least_distance
from dirreg.services.utils.sampling import box_grid, unique_rows


def as_vector(v: Sequence[float] | np.ndarray) -> np.ndarray:
    return np.atleast_1d(np.asarray(v, dtype=float))


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """
    Closed convex polyhedron {z : A z <= b}.

    Rows are kept at unit norm so that `b - A z` reads as a Euclidean
    margin. Build through the classmethods, which take care of that.
    """

    A: np.ndarray
    b: np.ndarray

    @classmethod
    def from_inequalities(
        cls,
        A: np.ndarray | Sequence[Sequence[float]],
        b: np.ndarray | Sequence[float],
        eq_A: np.ndarray | Sequence[Sequence[float]] | None = None,
        eq_b: np.ndarray | Sequence[float] | None = None,
    ) -> Polyhedron:
        A_arr = np.atleast_2d(np.asarray(A, dtype=float))
        b_arr = np.asarray(b, dtype=float).reshape(-1)
        if eq_A is not None and eq_b is not None:
            E = np.atleast_2d(np.asarray(eq_A, dtype=float))
            e = np.asarray(eq_b, dtype=float).reshape(-1)
            A_arr = np.vstack([A_arr.reshape(-1, E.shape[1]), E, -E])
            b_arr = np.concatenate([b_arr, e, -e])

        norms = np.linalg.norm(A_arr, axis=1)
        zero = norms <= 1e-14
        rows = A_arr[~zero] / norms[~zero, np.newaxis]
        rhs = b_arr[~zero] / norms[~zero]
        if np.any(b_arr[zero] < -MEMBERSHIP_TOL):
            # 0 <= negative: keep a single unsatisfiable row
            rows = np.vstack([rows, np.zeros((1, A_arr.shape[1]))])
            rhs = np.append(rhs, -1.0)
        return cls(A=rows, b=rhs)

    @classmethod
    def full(cls, dim: int) -> Polyhedron:
        return cls(A=np.zeros((0, dim)), b=np.zeros(0))

    @classmethod
    def point(cls, z: Sequence[float] | np.ndarray) -> Polyhedron:
        z = as_vector(z)
        eye = np.eye(z.shape[0])
        return cls.from_inequalities(np.vstack([eye, -eye]), np.concatenate([z, -z]))

    @classmethod
    def box(cls, lo: Sequence[float] | np.ndarray, hi: Sequence[float] | np.ndarray) -> Polyhedron:
        lo, hi = as_vector(lo), as_vector(hi)
        eye = np.eye(lo.shape[0])
        return cls.from_inequalities(np.vstack([eye, -eye]), np.concatenate([hi, -lo]))

    @property
    def dimension(self) -> int:
        return int(self.A.shape[1])

    def residuals(self, z: np.ndarray) -> np.ndarray:
        return self.A @ z - self.b

    def contains(self, z: Sequence[float] | np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        return bool(np.all(self.residuals(as_vector(z)) <= tol))

    def nearest_point(self, x: Sequence[float] | np.ndarray) -> np.ndarray | None:
        x = as_vector(x)
        w = least_distance(-self.A, self.residuals(x))
        if w is None:
            return None
        return x + w

    @cached_property
    def is_empty(self) -> bool:
        return self.nearest_point(np.zeros(self.dimension)) is None

    def intersect(self, other: Polyhedron) -> Polyhedron:
        return Polyhedron(A=np.vstack([self.A, other.A]), b=np.concatenate([self.b, other.b]))

    def restrict(self, A: np.ndarray, b: np.ndarray) -> Polyhedron:
        """Add the inequalities A z <= b."""
        return self.intersect(Polyhedron.from_inequalities(A, b))

    def fix_leading(self, x: np.ndarray) -> Polyhedron:
        """The slice {w : (x, w) in P} over the trailing coordinates."""
        k = x.shape[0]
        return Polyhedron.from_inequalities(self.A[:, k:], self.b - self.A[:, :k] @ x)

    def fix_trailing(self, y: np.ndarray) -> Polyhedron:
        """The slice {w : (w, y) in P} over the leading coordinates."""
        k = self.dimension - y.shape[0]
        return Polyhedron.from_inequalities(self.A[:, :k], self.b - self.A[:, k:] @ y)

    def permute(self, order: Sequence[int]) -> Polyhedron:
        """Coordinates reordered so that new coordinate i is old coordinate order[i]."""
        return Polyhedron(A=self.A[:, list(order)], b=self.b.copy())

    def swap(self, n: int) -> Polyhedron:
        """(x, y) -> (y, x) where x holds the first n coordinates."""
        d = self.dimension
        return self.permute(list(range(n, d)) + list(range(n)))

    def product(self, other: Polyhedron) -> Polyhedron:
        d1, d2 = self.dimension, other.dimension
        A = np.zeros((self.A.shape[0] + other.A.shape[0], d1 + d2))
        A[: self.A.shape[0], :d1] = self.A
        A[self.A.shape[0]:, d1:] = other.A
        return Polyhedron(A=A, b=np.concatenate([self.b, other.b]))

    def affine(self, shift: np.ndarray, scale: float) -> Polyhedron:
        """{(z - shift) / scale : z in P} for scale > 0."""
        return Polyhedron.from_inequalities(scale * self.A, self.b - self.A @ shift)

    def active_set(self, p: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return np.flatnonzero(np.abs(self.residuals(p)) <= tol)

    def vertices(self, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        """Vertices by enumerating square subsystems of the active rows."""
        d = self.dimension
        found = []
        for rows in itertools.combinations(range(self.A.shape[0]), d):
            sub = self.A[list(rows)]
            if abs(np.linalg.det(sub)) <= 1e-12:
                continue
            z = np.linalg.solve(sub, self.b[list(rows)])
            if self.contains(z, tol):
                found.append(z)
        if not found:
            return np.zeros((0, d))
        return unique_rows(np.array(found), decimals=9)

    def is_bounded(self) -> bool:
        for i, sign in itertools.product(range(self.dimension), (1.0, -1.0)):
            c = np.zeros(self.dimension)
            c[i] = -sign
            res = linprog(c, A_ub=self.A, b_ub=self.b, bounds=[(None, None)] * self.dimension, method="highs")
            if res.status == 3:
                return False
        return True


class Region(abc.ABC):
    """Closed subset of R^d given by points or a finite union of polyhedra."""

    @property
    @abc.abstractmethod
    def dimension(self) -> int: ...

    @abc.abstractmethod
    def is_empty(self) -> bool: ...

    @abc.abstractmethod
    def contains(self, z: Sequence[float] | np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool: ...

    @abc.abstractmethod
    def nearest(self, z: Sequence[float] | np.ndarray) -> np.ndarray | None: ...

    @abc.abstractmethod
    def sample_near(self, center: np.ndarray, radius: float, density: int, seed: int = 0) -> np.ndarray: ...

    @abc.abstractmethod
    def affine(self, shift: np.ndarray, scale: float) -> Region: ...

    @abc.abstractmethod
    def as_polytopes(self) -> PolytopeUnion: ...

    @abc.abstractmethod
    def norm_bound(self) -> float: ...

    def product(self, other: Region) -> Region:
        if isinstance(self, PointCloud) and isinstance(other, PointCloud):
            pairs = [np.concatenate([p, q]) for p in self.points for q in other.points]
            return PointCloud.of(pairs, self.dimension + other.dimension)
        left, right = self.as_polytopes(), other.as_polytopes()
        pieces = [p.product(q) for p in left.pieces for q in right.pieces]
        return PolytopeUnion(pieces=tuple(pieces), dim=self.dimension + other.dimension)


@dataclass(frozen=True, eq=False)
class PointCloud(Region):
    points: np.ndarray

    @classmethod
    def of(cls, points: Sequence[Sequence[float]] | np.ndarray, dim: int) -> PointCloud:
        arr = np.asarray(points, dtype=float).reshape(-1, dim)
        return cls(points=arr)

    @classmethod
    def empty(cls, dim: int) -> PointCloud:
        return cls(points=np.zeros((0, dim)))

    @property
    def dimension(self) -> int:
        return int(self.points.shape[1])

    def is_empty(self) -> bool:
        return self.points.shape[0] == 0

    def distances(self, z: np.ndarray) -> np.ndarray:
        return np.linalg.norm(self.points - z, axis=1)

    def contains(self, z: Sequence[float] | np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        if self.is_empty():
            return False
        return bool(self.distances(as_vector(z)).min() <= tol)

    def nearest(self, z: Sequence[float] | np.ndarray) -> np.ndarray | None:
        if self.is_empty():
            return None
        return self.points[int(np.argmin(self.distances(as_vector(z))))].copy()

    def sample_near(self, center: np.ndarray, radius: float, density: int, seed: int = 0) -> np.ndarray:
        if self.is_empty():
            return self.points
        return self.points[self.distances(center) <= radius + MEMBERSHIP_TOL]

    def affine(self, shift: np.ndarray, scale: float) -> PointCloud:
        return PointCloud(points=(self.points - shift) / scale)

    def as_polytopes(self) -> PolytopeUnion:
        return PolytopeUnion(pieces=tuple(Polyhedron.point(p) for p in self.points), dim=self.dimension)

    def norm_bound(self) -> float:
        if self.is_empty():
            return 0.0
        return float(np.linalg.norm(self.points, axis=1).max())


@dataclass(frozen=True, eq=False)
class PolytopeUnion(Region):
    pieces: tuple[Polyhedron, ...]
    dim: int

    @classmethod
    def single(cls, piece: Polyhedron) -> PolytopeUnion:
        return cls(pieces=(piece,), dim=piece.dimension)

    @property
    def dimension(self) -> int:
        return self.dim

    def nonempty_pieces(self) -> list[Polyhedron]:
        return [p for p in self.pieces if not p.is_empty]

    def is_empty(self) -> bool:
        return not self.nonempty_pieces()

    def contains(self, z: Sequence[float] | np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        return any(p.contains(z, tol) for p in self.pieces)

    def nearest(self, z: Sequence[float] | np.ndarray) -> np.ndarray | None:
        z = as_vector(z)
        best, best_dist = None, np.inf
        for piece in self.pieces:
            q = piece.nearest_point(z)
            if q is not None and np.linalg.norm(q - z) < best_dist:
                best, best_dist = q, float(np.linalg.norm(q - z))
        return best

    def sample_near(self, center: np.ndarray, radius: float, density: int, seed: int = 0) -> np.ndarray:
        grid = box_grid(center, radius, density, seed=seed)
        found = [z for z in grid if self.contains(z)]
        for piece in self.pieces:
            q = piece.nearest_point(center)
            if q is not None and np.linalg.norm(q - center) <= radius + MEMBERSHIP_TOL:
                found.append(q)
        if not found:
            return np.zeros((0, self.dim))
        return unique_rows(np.array(found))

    def affine(self, shift: np.ndarray, scale: float) -> PolytopeUnion:
        return PolytopeUnion(pieces=tuple(p.affine(shift, scale) for p in self.pieces), dim=self.dim)

    def as_polytopes(self) -> PolytopeUnion:
        return self

    def norm_bound(self) -> float:
        bound = 0.0
        for piece in self.nonempty_pieces():
            if not piece.is_bounded():
                return float("inf")
            vertices = piece.vertices()
            if vertices.shape[0]:
                bound = max(bound, float(np.linalg.norm(vertices, axis=1).max()))
        return bound
