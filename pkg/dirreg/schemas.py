from __future__ import annotations

import enum
import inspect
import math
from pathlib import Path
from typing import Any, Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError, model_validator

from dirreg.config import MAX_ITERATIONS, SHRINK_RETRIES, T_COUNT, T_RATIO
from dirreg.exceptions import InstanceError, RepresentationError
from dirreg.models.cones import DirectionSet, PolyhedralCone
from dirreg.models.geometry import Polyhedron, PolytopeUnion, Region
from dirreg.models.maps import BasePoint, LinearMap, PolyhedralGraph, SampledGraph, SetValuedMap
from dirreg.models.neighborhood import NeighborhoodSpec, ProbeSpec
from dirreg.models.rates import PiecewiseLinearRate, PowerRate, RateFunction
from dirreg.services.maps import CATALOG, catalog, piecewise_linearize
from dirreg.services.utils.csv_reader import read_points

Vector = list[float]
Matrix = list[list[float]]


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# -----------------------------------------------------------------------
# Instance sections
# -----------------------------------------------------------------------


class Dimensions(Strict):
    n: int = Field(ge=1)
    m: int = Field(ge=1)


class PieceSpec(Strict):
    A: Matrix = Field(default_factory=list)
    b: Vector = Field(default_factory=list)
    eq_A: Matrix | None = None
    eq_b: Vector | None = None

    def build(self, dim: int) -> Polyhedron:
        A = np.asarray(self.A, dtype=float).reshape(-1, dim)
        return Polyhedron.from_inequalities(A, self.b, eq_A=self.eq_A, eq_b=self.eq_b)


class MapKindSpec(str, enum.Enum):
    linear = "linear"
    catalog = "catalog"
    polyhedral_graph = "polyhedral_graph"
    sampled_graph = "sampled_graph"


class LinearizeSpec(Strict):
    knots: int = Field(default=4, ge=1)
    spacing: PositiveFloat = 0.1


class MapSpec(Strict):
    kind: MapKindSpec
    matrix: Matrix | None = None
    name: str | None = None
    params: dict[str, Any] = Field(default_factory=dict)
    pieces: list[PieceSpec] | None = None
    points: Matrix | None = None
    points_file: str | None = None
    resolution: PositiveFloat | None = None
    linearize: LinearizeSpec | None = None

    @model_validator(mode="after")
    def fields_match_kind(self) -> MapSpec:
        needed = {
            MapKindSpec.linear: ("matrix",),
            MapKindSpec.catalog: ("name",),
            MapKindSpec.polyhedral_graph: ("pieces",),
            MapKindSpec.sampled_graph: ("resolution",),
        }[self.kind]
        for name in needed:
            if getattr(self, name) is None:
                raise ValueError(f"map kind {self.kind.value} needs '{name}'")
        if self.kind is MapKindSpec.sampled_graph and (self.points is None) == (self.points_file is None):
            raise ValueError("a sampled graph needs exactly one of 'points' and 'points_file'")
        return self


class BaseSpec(Strict):
    x: Vector
    y: Vector


class DirectionKindSpec(str, enum.Enum):
    sphere = "sphere"
    finite = "finite"
    cap = "cap"


class DirectionSpec(Strict):
    kind: DirectionKindSpec
    directions: Matrix | None = None
    generators: Matrix | None = None
    halfspaces: Matrix | None = None

    @model_validator(mode="after")
    def fields_match_kind(self) -> DirectionSpec:
        if self.kind is DirectionKindSpec.finite and not self.directions:
            raise ValueError("finite direction sets need 'directions'")
        if self.kind is DirectionKindSpec.cap and self.generators is None and self.halfspaces is None:
            raise ValueError("caps need 'generators' or 'halfspaces'")
        if self.directions:
            for i, d in enumerate(self.directions):
                norm = math.sqrt(sum(c * c for c in d))
                if abs(norm - 1.0) > 1e-12:
                    raise ValueError(f"direction {i} {d} does not have unit norm ({norm:.6g})")
        return self

    def cone(self, dim: int) -> PolyhedralCone:
        G = None if self.generators is None else np.asarray(self.generators, dtype=float).reshape(-1, dim)
        H = None if self.halfspaces is None else np.asarray(self.halfspaces, dtype=float).reshape(-1, dim)
        if G is None and H is None:
            return PolyhedralCone.full(dim)
        cone = PolyhedralCone(dimension=dim, generators=G, halfspaces=H)
        cone.check_consistency()
        return cone

    def build(self, dim: int) -> DirectionSet:
        if self.kind is DirectionKindSpec.sphere:
            return DirectionSet.sphere(dim)
        if self.kind is DirectionKindSpec.finite:
            return DirectionSet.finite(self.directions or [])
        return DirectionSet.cap(self.cone(dim))


class RateSpec(Strict):
    c: PositiveFloat | None = None
    r: PositiveFloat = 1.0
    knots: Matrix | None = None

    @model_validator(mode="after")
    def one_form(self) -> RateSpec:
        if (self.c is None) == (self.knots is None):
            raise ValueError("a rate needs either 'c' (with 'r') or 'knots'")
        return self

    def build(self) -> RateFunction:
        if self.knots is not None:
            return PiecewiseLinearRate.of(self.knots)
        assert self.c is not None
        return PowerRate(c=self.c, r=self.r)


class NeighborhoodFileSpec(Strict):
    rho_x: PositiveFloat
    rho_y: PositiveFloat
    epsilon: PositiveFloat
    t_values: Vector | None = None
    t_count: int = Field(default=T_COUNT, ge=1)
    t_ratio: float = Field(default=T_RATIO, gt=0, lt=1)
    grid_density: int | None = Field(default=None, ge=3)
    direction_count: int | None = Field(default=None, ge=1)
    shrink_retries: int = Field(default=SHRINK_RETRIES, ge=0)


class Tolerances(Strict):
    slack: PositiveFloat | None = None
    bisection: PositiveFloat | None = None
    criterion: PositiveFloat = 1e-7
    variation: PositiveFloat = 1e-6
    refine: PositiveFloat = 1e-9


class ModulusSpec(Strict):
    property: Literal["open", "regular", "continuous"] = "open"
    r: PositiveFloat | None = None


class CriterionSpec(Strict):
    c: float | None = Field(default=None, ge=0)
    rho: PositiveFloat | None = None
    density: int = Field(default=11, ge=2)
    y_count: int = Field(default=64, ge=2)


class VariationSpec(Strict):
    r: PositiveFloat = 1.0
    c: PositiveFloat | None = None
    v: Vector | None = None
    scales: Vector | None = None
    offset: PositiveFloat = 0.01
    direction_count: int | None = Field(default=None, ge=1)


class EkelandSpec(Strict):
    points: Matrix | None = None
    points_file: str | None = None
    values: Vector | None = None
    start: int = Field(default=0, ge=0)
    epsilon: PositiveFloat = 1.0

    @model_validator(mode="after")
    def one_source(self) -> EkelandSpec:
        if (self.points is None) == (self.points_file is None):
            raise ValueError("the Ekeland set needs exactly one of 'points' and 'points_file'")
        if self.points is not None and self.values is None:
            raise ValueError("inline Ekeland points need 'values'")
        return self


class BoxSpec(Strict):
    lo: Vector
    hi: Vector

    def build(self) -> Region:
        return PolytopeUnion.single(Polyhedron.box(self.lo, self.hi))


class RefineSpec(Strict):
    x: Vector | None = None
    y: Vector | None = None
    y_target: Vector
    cone: DirectionSpec | None = None
    K: BoxSpec
    r: PositiveFloat = 1.0
    alpha: float = Field(ge=0, lt=1)
    t: float = Field(ge=0)
    max_iterations: int = Field(default=MAX_ITERATIONS, ge=1)


class InstanceFile(Strict):
    schema_version: Literal[1] = Field(alias="schema")
    dimensions: Dimensions
    map: MapSpec
    base_point: BaseSpec
    L: DirectionSpec
    M: DirectionSpec
    rate: RateSpec | None = None
    neighborhood: NeighborhoodFileSpec | None = None
    tolerances: Tolerances = Field(default_factory=Tolerances)
    modulus: ModulusSpec | None = None
    criterion: CriterionSpec | None = None
    variation: VariationSpec | None = None
    ekeland: EkelandSpec | None = None
    refine: RefineSpec | None = None

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


# -----------------------------------------------------------------------
# Parsing
# -----------------------------------------------------------------------


def _line_index(text: str) -> dict[tuple[str | int, ...], int]:
    """1-based line of every mapping key and sequence item, by path."""
    index: dict[tuple[str | int, ...], int] = {}

    def walk(node: yaml.Node, path: tuple[str | int, ...]) -> None:
        index[path] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            for key, value in node.value:
                child = (*path, str(key.value))
                walk(value, child)
                index[child] = key.start_mark.line + 1
        elif isinstance(node, yaml.SequenceNode):
            for i, item in enumerate(node.value):
                walk(item, (*path, i))

    root = yaml.compose(text, Loader=yaml.SafeLoader)
    if root is not None:
        walk(root, ())
    return index


def _locate(index: dict[tuple[str | int, ...], int], loc: tuple[str | int, ...]) -> int:
    path = tuple(loc)
    while path and path not in index:
        path = path[:-1]
    return index.get(path, 1)


def _dotted(loc: tuple[str | int, ...]) -> str:
    out = ""
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


def _fail(index: dict[tuple[str | int, ...], int], loc: tuple[str | int, ...], message: str) -> InstanceError:
    return InstanceError(f"line {_locate(index, loc)}: {_dotted(loc)}: {message}")


def _check_length(index: dict, loc: tuple[str | int, ...], value: list | None, expected: int) -> None:
    if value is not None and len(value) != expected:
        raise _fail(index, loc, f"expected {expected} entries, got {len(value)}")


def _check_rows(index: dict, loc: tuple[str | int, ...], rows: list[list[float]] | None, expected: int) -> None:
    for i, row in enumerate(rows or []):
        _check_length(index, (*loc, i), row, expected)


def _cross_check(inst: InstanceFile, index: dict) -> None:
    n, m = inst.dimensions.n, inst.dimensions.m
    _check_length(index, ("base_point", "x"), inst.base_point.x, n)
    _check_length(index, ("base_point", "y"), inst.base_point.y, m)
    for name, dim in (("L", n), ("M", m)):
        spec: DirectionSpec = getattr(inst, name)
        for field in ("directions", "generators", "halfspaces"):
            _check_rows(index, (name, field), getattr(spec, field), dim)

    spec_map = inst.map
    if spec_map.matrix is not None:
        if len(spec_map.matrix) != m:
            raise _fail(index, ("map", "matrix"), f"expected {m} rows, got {len(spec_map.matrix)}")
        _check_rows(index, ("map", "matrix"), spec_map.matrix, n)
    for i, piece in enumerate(spec_map.pieces or []):
        _check_rows(index, ("map", "pieces", i, "A"), piece.A, n + m)
        _check_rows(index, ("map", "pieces", i, "eq_A"), piece.eq_A, n + m)
        _check_length(index, ("map", "pieces", i, "b"), piece.b, len(piece.A))
        if piece.eq_A is not None:
            _check_length(index, ("map", "pieces", i, "eq_b"), piece.eq_b, len(piece.eq_A))
    _check_rows(index, ("map", "points"), spec_map.points, n + m)
    if spec_map.kind is MapKindSpec.catalog and spec_map.name in CATALOG:
        accepted = inspect.signature(CATALOG[spec_map.name]).parameters
        for key in spec_map.params:
            if key not in accepted:
                raise _fail(index, ("map", "params", key), f"catalog map {spec_map.name!r} takes no parameter {key!r}")
        missing = [p.name for p in accepted.values() if p.default is p.empty and p.name not in spec_map.params]
        if missing:
            raise _fail(index, ("map", "params"), f"catalog map {spec_map.name!r} needs {', '.join(missing)}")

    if inst.neighborhood is not None and inst.neighborhood.t_values is not None:
        eps = inst.neighborhood.epsilon
        t = inst.neighborhood.t_values
        if not t or any(not 0 < v < eps for v in t) or any(b >= a for a, b in zip(t, t[1:])):
            raise _fail(index, ("neighborhood", "t_values"), f"t values must decrease strictly inside (0, {eps})")
    if inst.variation is not None:
        _check_length(index, ("variation", "v"), inst.variation.v, m)
    if inst.ekeland is not None:
        _check_rows(index, ("ekeland", "points"), inst.ekeland.points, n + m)
        if inst.ekeland.points is not None and inst.ekeland.values is not None:
            _check_length(index, ("ekeland", "values"), inst.ekeland.values, len(inst.ekeland.points))
    if inst.refine is not None:
        _check_length(index, ("refine", "x"), inst.refine.x, n)
        _check_length(index, ("refine", "y"), inst.refine.y, m)
        _check_length(index, ("refine", "y_target"), inst.refine.y_target, m)
        _check_length(index, ("refine", "K", "lo"), inst.refine.K.lo, m)
        _check_length(index, ("refine", "K", "hi"), inst.refine.K.hi, m)
        if inst.refine.cone is not None:
            for field in ("generators", "halfspaces"):
                _check_rows(index, ("refine", "cone", field), getattr(inst.refine.cone, field), n)


def parse_text(text: str) -> InstanceFile:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else 1
        raise InstanceError(f"line {line}: not valid YAML: {getattr(e, 'problem', e)}")
    if not isinstance(data, dict):
        raise InstanceError("line 1: <root>: an instance must be a mapping")

    index = _line_index(text)
    try:
        inst = InstanceFile.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        loc = tuple(p for p in first["loc"] if not (isinstance(p, str) and p.startswith("function-")))
        raise _fail(index, loc, first["msg"])
    _cross_check(inst, index)
    return inst


def parse_instance(path: str | Path) -> InstanceFile:
    return parse_text(Path(path).read_text(encoding="utf-8"))


def serialize_instance(inst: InstanceFile) -> str:
    data = inst.model_dump(mode="json", by_alias=True, exclude_none=True, exclude_defaults=True)
    data = {"schema": 1, **data}
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)


# -----------------------------------------------------------------------
# Builders
# -----------------------------------------------------------------------


def _resolve(base_dir: Path, file_name: str) -> Path:
    path = Path(file_name)
    return path if path.is_absolute() else base_dir / path


def build_map(inst: InstanceFile, base_dir: Path = Path(".")) -> SetValuedMap:
    spec = inst.map
    n, m = inst.dimensions.n, inst.dimensions.m
    F: SetValuedMap
    if spec.kind is MapKindSpec.linear:
        F = LinearMap(matrix=np.asarray(spec.matrix, dtype=float).reshape(m, n))
    elif spec.kind is MapKindSpec.catalog:
        assert spec.name is not None
        try:
            F = catalog(spec.name, **spec.params)
        except TypeError as e:
            raise InstanceError(f"map.params: catalog map {spec.name!r} rejects its parameters: {e}") from e
    elif spec.kind is MapKindSpec.polyhedral_graph:
        pieces = tuple(p.build(n + m) for p in spec.pieces or [])
        F = PolyhedralGraph(n=n, m=m, pieces=pieces)
    else:
        assert spec.resolution is not None
        if spec.points_file is not None:
            points = read_points(_resolve(base_dir, spec.points_file), n + m)
        else:
            points = np.asarray(spec.points, dtype=float).reshape(-1, n + m)
        F = SampledGraph(n=n, m=m, points=points, resolution=spec.resolution)

    if spec.linearize is not None:
        F = piecewise_linearize(F, spec.linearize.knots, spec.linearize.spacing)
    if (F.n, F.m) != (n, m):
        raise InstanceError(f"map {F.name!r} maps R^{F.n} to R^{F.m}, dimensions say R^{n} to R^{m}")
    return F


def build_directions(inst: InstanceFile) -> tuple[DirectionSet, DirectionSet]:
    try:
        return inst.L.build(inst.dimensions.n), inst.M.build(inst.dimensions.m)
    except RepresentationError as e:
        raise InstanceError(e.detail)


def build_base(inst: InstanceFile) -> BasePoint:
    return BasePoint.of(inst.base_point.x, inst.base_point.y)


def build_rate(inst: InstanceFile) -> RateFunction:
    if inst.rate is None:
        raise InstanceError("this command needs a 'rate' section")
    return inst.rate.build()


def build_neighborhood(inst: InstanceFile, seed: int, slack: float | None = None, grid_scale: int = 1) -> NeighborhoodSpec:
    spec = inst.neighborhood
    if spec is None:
        raise InstanceError("this command needs a 'neighborhood' section")
    options: dict[str, Any] = {"seed": seed}
    if spec.grid_density is not None:
        options["grid_density"] = spec.grid_density
    if spec.direction_count is not None:
        options["direction_count"] = spec.direction_count
    chosen_slack = slack if slack is not None else inst.tolerances.slack
    if chosen_slack is not None:
        options["slack"] = chosen_slack
    if spec.t_values is not None:
        hood = NeighborhoodSpec(
            rho_x=spec.rho_x, rho_y=spec.rho_y, epsilon=spec.epsilon, t_values=tuple(spec.t_values), **options
        )
    else:
        hood = NeighborhoodSpec.geometric(
            spec.rho_x, spec.rho_y, spec.epsilon, count=spec.t_count, ratio=spec.t_ratio, **options
        )
    return hood.scaled(grid_scale) if grid_scale > 1 else hood


def build_probe(inst: InstanceFile, tolerance: float | None = None) -> ProbeSpec:
    spec = inst.variation or VariationSpec()
    options: dict[str, Any] = {
        "offset": spec.offset,
        "direction_count": spec.direction_count,
        "tolerance": tolerance if tolerance is not None else inst.tolerances.variation,
    }
    if spec.scales is not None:
        options["scales"] = tuple(spec.scales)
    return ProbeSpec(**options)


def ekeland_points(inst: InstanceFile, base_dir: Path = Path(".")) -> tuple[np.ndarray, np.ndarray]:
    """Points and values; a points file carries the value in its last column."""
    spec = inst.ekeland
    if spec is None:
        raise InstanceError("this command needs an 'ekeland' section")
    dim = inst.dimensions.n + inst.dimensions.m
    if spec.points_file is not None:
        table = read_points(_resolve(base_dir, spec.points_file), dim + 1)
        return table[:, :dim], table[:, dim]
    assert spec.values is not None
    return np.asarray(spec.points, dtype=float).reshape(-1, dim), np.asarray(spec.values, dtype=float)
