from __future__ import annotations

import abc
import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from dirreg.config import MEMBERSHIP_TOL
from dirreg.models.geometry import PointCloud, Polyhedron, PolytopeUnion, Region, as_vector


class MapKind(enum.Enum):
    polyhedral_graph = "polyhedral_graph"
    sampled_graph = "sampled_graph"
    catalog = "catalog"


@dataclass(frozen=True, eq=False)
class BasePoint:
    x: np.ndarray
    y: np.ndarray

    @classmethod
    def of(cls, x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> BasePoint:
        return cls(x=as_vector(x), y=as_vector(y))

    @property
    def point(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])

    def swapped(self) -> BasePoint:
        return BasePoint(x=self.y.copy(), y=self.x.copy())


class SetValuedMap(abc.ABC):
    """Closed set-valued mapping F: R^n => R^m."""

    n: int
    m: int
    kind: MapKind
    name: str

    @abc.abstractmethod
    def values_at(self, x: np.ndarray) -> Region: ...

    @abc.abstractmethod
    def preimage_at(self, y: np.ndarray) -> Region: ...

    @abc.abstractmethod
    def graph_contains(self, p: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool: ...

    def inverse(self) -> SetValuedMap:
        return InverseMap(base=self)

    def polyhedral_graph(self) -> PolyhedralGraph | None:
        """The graph as a finite union of polyhedra, when it is one."""
        return None

    def split(self, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        p = as_vector(p)
        return p[: self.n], p[self.n:]


@dataclass(frozen=True, eq=False)
class LinearMap(SetValuedMap):
    matrix: np.ndarray
    kind: MapKind = MapKind.catalog
    name: str = "linear"

    @property
    def n(self) -> int:  # type: ignore[override]
        return int(self.matrix.shape[1])

    @property
    def m(self) -> int:  # type: ignore[override]
        return int(self.matrix.shape[0])

    def is_invertible(self) -> bool:
        return self.n == self.m and np.linalg.cond(self.matrix) < 1e12

    def values_at(self, x: np.ndarray) -> Region:
        return PointCloud.of([self.matrix @ as_vector(x)], self.m)

    def preimage_at(self, y: np.ndarray) -> Region:
        y = as_vector(y)
        if self.is_invertible():
            return PointCloud.of([np.linalg.solve(self.matrix, y)], self.n)
        piece = Polyhedron.from_inequalities(np.zeros((0, self.n)), np.zeros(0), eq_A=self.matrix, eq_b=y)
        return PolytopeUnion.single(piece)

    def graph_contains(self, p: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        x, y = self.split(p)
        return bool(np.linalg.norm(self.matrix @ x - y) <= tol)

    def inverse(self) -> SetValuedMap:
        if self.is_invertible():
            return LinearMap(matrix=np.linalg.inv(self.matrix))
        return InverseMap(base=self)

    def polyhedral_graph(self) -> PolyhedralGraph:
        eq = np.hstack([self.matrix, -np.eye(self.m)])
        piece = Polyhedron.from_inequalities(np.zeros((0, self.n + self.m)), np.zeros(0), eq_A=eq, eq_b=np.zeros(self.m))
        return PolyhedralGraph(n=self.n, m=self.m, pieces=(piece,), kind=MapKind.catalog, name=self.name)


@dataclass(frozen=True, eq=False)
class SquareMap(SetValuedMap):
    """F(x) = {x^2} on the real line."""

    n: int = 1
    m: int = 1
    kind: MapKind = MapKind.catalog
    name: str = "square"

    def values_at(self, x: np.ndarray) -> Region:
        return PointCloud.of([as_vector(x)[0] ** 2], 1)

    def preimage_at(self, y: np.ndarray) -> Region:
        v = float(as_vector(y)[0])
        if v < 0:
            return PointCloud.empty(1)
        if v == 0:
            return PointCloud.of([0.0], 1)
        root = math.sqrt(v)
        return PointCloud.of([-root, root], 1)

    def graph_contains(self, p: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        x, y = self.split(p)
        return abs(y[0] - x[0] ** 2) <= tol


@dataclass(frozen=True, eq=False)
class EpigraphMap(SetValuedMap):
    """F(x) = {y : y >= <a, x>}."""

    a: np.ndarray
    kind: MapKind = MapKind.catalog
    name: str = "epigraph"

    @property
    def n(self) -> int:  # type: ignore[override]
        return int(self.a.shape[0])

    @property
    def m(self) -> int:  # type: ignore[override]
        return 1

    def values_at(self, x: np.ndarray) -> Region:
        level = float(self.a @ as_vector(x))
        return PolytopeUnion.single(Polyhedron.from_inequalities([[-1.0]], [-level]))

    def preimage_at(self, y: np.ndarray) -> Region:
        v = float(as_vector(y)[0])
        return PolytopeUnion.single(Polyhedron.from_inequalities(self.a[np.newaxis, :], [v]))

    def graph_contains(self, p: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        x, y = self.split(p)
        return float(self.a @ x - y[0]) <= tol

    def polyhedral_graph(self) -> PolyhedralGraph:
        piece = Polyhedron.from_inequalities(np.append(self.a, -1.0)[np.newaxis, :], [0.0])
        return PolyhedralGraph(n=self.n, m=1, pieces=(piece,), kind=MapKind.catalog, name=self.name)


@dataclass(frozen=True, eq=False)
class PolyhedralGraph(SetValuedMap):
    """Graph given as a finite union of convex polyhedra in R^(n+m)."""

    n: int
    m: int
    pieces: tuple[Polyhedron, ...]
    kind: MapKind = MapKind.polyhedral_graph
    name: str = "polyhedral_graph"

    def __post_init__(self) -> None:
        for i, piece in enumerate(self.pieces):
            if piece.dimension != self.n + self.m:
                raise ValueError(f"graph piece {i} lives in R^{piece.dimension}, expected R^{self.n + self.m}")

    @property
    def region(self) -> PolytopeUnion:
        return PolytopeUnion(pieces=self.pieces, dim=self.n + self.m)

    def values_at(self, x: np.ndarray) -> Region:
        x = as_vector(x)
        return PolytopeUnion(pieces=tuple(p.fix_leading(x) for p in self.pieces), dim=self.m)

    def preimage_at(self, y: np.ndarray) -> Region:
        y = as_vector(y)
        return PolytopeUnion(pieces=tuple(p.fix_trailing(y) for p in self.pieces), dim=self.n)

    def graph_contains(self, p: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        return any(piece.contains(p, tol) for piece in self.pieces)

    def inverse(self) -> PolyhedralGraph:
        return PolyhedralGraph(
            n=self.m,
            m=self.n,
            pieces=tuple(p.swap(self.n) for p in self.pieces),
            kind=self.kind,
            name=f"inverse({self.name})",
        )

    def polyhedral_graph(self) -> PolyhedralGraph:
        return self


@dataclass(frozen=True, eq=False)
class SampledGraph(SetValuedMap):
    """Finite sample of a graph; queries resolve to the nearest slab of samples within h."""

    n: int
    m: int
    points: np.ndarray
    resolution: float
    kind: MapKind = MapKind.sampled_graph
    name: str = "sampled_graph"

    def __post_init__(self) -> None:
        if self.points.ndim != 2 or self.points.shape[1] != self.n + self.m:
            raise ValueError(f"samples must have {self.n + self.m} coordinates")
        if self.resolution <= 0:
            raise ValueError("sample resolution must be positive")

    def _slab(self, block: np.ndarray, query: np.ndarray) -> np.ndarray:
        dist = np.linalg.norm(block - query, axis=1)
        if dist.size == 0 or dist.min() > self.resolution:
            return np.zeros(dist.shape[0], dtype=bool)
        return dist <= dist.min() + 1e-12

    def values_at(self, x: np.ndarray) -> Region:
        mask = self._slab(self.points[:, : self.n], as_vector(x))
        return PointCloud(points=self.points[mask, self.n:])

    def preimage_at(self, y: np.ndarray) -> Region:
        mask = self._slab(self.points[:, self.n:], as_vector(y))
        return PointCloud(points=self.points[mask, : self.n])

    def graph_contains(self, p: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        dist = np.linalg.norm(self.points - as_vector(p), axis=1)
        return bool(dist.size and dist.min() <= self.resolution + tol)

    def inverse(self) -> SampledGraph:
        swapped = np.hstack([self.points[:, self.n:], self.points[:, : self.n]])
        return SampledGraph(n=self.m, m=self.n, points=swapped, resolution=self.resolution, name=f"inverse({self.name})")


@dataclass(frozen=True, eq=False)
class ProductMap(SetValuedMap):
    """(x1, x2) => F1(x1) x F2(x2)."""

    first: SetValuedMap
    second: SetValuedMap
    kind: MapKind = MapKind.catalog
    name: str = field(default="product")

    @property
    def n(self) -> int:  # type: ignore[override]
        return self.first.n + self.second.n

    @property
    def m(self) -> int:  # type: ignore[override]
        return self.first.m + self.second.m

    def values_at(self, x: np.ndarray) -> Region:
        x = as_vector(x)
        return self.first.values_at(x[: self.first.n]).product(self.second.values_at(x[self.first.n:]))

    def preimage_at(self, y: np.ndarray) -> Region:
        y = as_vector(y)
        return self.first.preimage_at(y[: self.first.m]).product(self.second.preimage_at(y[self.first.m:]))

    def graph_contains(self, p: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        x, y = self.split(p)
        n1, m1 = self.first.n, self.first.m
        return self.first.graph_contains(np.concatenate([x[:n1], y[:m1]]), tol) and self.second.graph_contains(
            np.concatenate([x[n1:], y[m1:]]), tol
        )

    def inverse(self) -> ProductMap:
        return ProductMap(first=self.first.inverse(), second=self.second.inverse(), name=f"inverse({self.name})")

    def polyhedral_graph(self) -> PolyhedralGraph | None:
        left, right = self.first.polyhedral_graph(), self.second.polyhedral_graph()
        if left is None or right is None:
            return None
        n1, m1, n2, m2 = left.n, left.m, right.n, right.m
        # (x1, y1, x2, y2) -> (x1, x2, y1, y2)
        order = (
            list(range(n1))
            + list(range(n1 + m1, n1 + m1 + n2))
            + list(range(n1, n1 + m1))
            + list(range(n1 + m1 + n2, n1 + m1 + n2 + m2))
        )
        pieces = tuple(p.product(q).permute(order) for p in left.pieces for q in right.pieces)
        return PolyhedralGraph(n=n1 + n2, m=m1 + m2, pieces=pieces, kind=MapKind.catalog, name=self.name)


@dataclass(frozen=True, eq=False)
class InverseMap(SetValuedMap):
    base: SetValuedMap

    @property
    def n(self) -> int:  # type: ignore[override]
        return self.base.m

    @property
    def m(self) -> int:  # type: ignore[override]
        return self.base.n

    @property
    def kind(self) -> MapKind:  # type: ignore[override]
        return self.base.kind

    @property
    def name(self) -> str:  # type: ignore[override]
        return f"inverse({self.base.name})"

    def values_at(self, x: np.ndarray) -> Region:
        return self.base.preimage_at(x)

    def preimage_at(self, y: np.ndarray) -> Region:
        return self.base.values_at(y)

    def graph_contains(self, p: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        x, y = self.split(p)
        return self.base.graph_contains(np.concatenate([y, x]), tol)

    def inverse(self) -> SetValuedMap:
        return self.base

    def polyhedral_graph(self) -> PolyhedralGraph | None:
        graph = self.base.polyhedral_graph()
        return None if graph is None else graph.inverse()
