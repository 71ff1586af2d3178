from dirreg.models.cones import DirectionKind, DirectionSet, MinimalTimeValue, PolyhedralCone
from dirreg.models.geometry import PointCloud, Polyhedron, PolytopeUnion, Region
from dirreg.models.maps import (
    BasePoint,
    EpigraphMap,
    InverseMap,
    LinearMap,
    MapKind,
    PolyhedralGraph,
    ProductMap,
    SampledGraph,
    SetValuedMap,
    SquareMap,
)
from dirreg.models.neighborhood import NeighborhoodSpec, ProbeSpec
from dirreg.models.rates import PiecewiseLinearRate, PowerRate, RateFunction
from dirreg.models.results import Property, Status, Verdict

__all__ = [
    "BasePoint",
    "DirectionKind",
    "DirectionSet",
    "EpigraphMap",
    "InverseMap",
    "LinearMap",
    "MapKind",
    "MinimalTimeValue",
    "NeighborhoodSpec",
    "PiecewiseLinearRate",
    "PointCloud",
    "PolyhedralCone",
    "PolyhedralGraph",
    "Polyhedron",
    "PolytopeUnion",
    "PowerRate",
    "ProbeSpec",
    "ProductMap",
    "Property",
    "RateFunction",
    "Region",
    "SampledGraph",
    "SetValuedMap",
    "SquareMap",
    "Status",
    "Verdict",
]
