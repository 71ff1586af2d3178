import numpy as np
import pytest

from dirreg.exceptions import ScopeError
from dirreg.models.cones import DirectionSet
from dirreg.models.maps import BasePoint, LinearMap, SetValuedMap, SquareMap
from dirreg.models.neighborhood import NeighborhoodSpec, ProbeSpec
from dirreg.models.results import Property, Status
from dirreg.services.variation import (
    base_sequence,
    check_variation_criterion,
    variation_membership,
    variation_modulus,
)
from dirreg.services.wellposed import estimate_modulus

ORIGIN = BasePoint.of([0.0], [0.0])


def double() -> LinearMap:
    return LinearMap(matrix=np.array([[2.0]]))


def test_base_sequence_walks_along_L(line: DirectionSet, small_probe: ProbeSpec) -> None:
    bases = base_sequence(double(), ORIGIN, line, small_probe)
    assert len(bases) == 5
    np.testing.assert_allclose(bases[0][0], [0.0])
    for x, y in bases:
        np.testing.assert_allclose(y, 2.0 * x)


def test_linear_membership(line: DirectionSet, small_probe: ProbeSpec) -> None:
    inside = variation_membership(double(), ORIGIN, line, line, 1.0, [1.5], small_probe)
    assert inside.member
    assert inside.max_residual == 0.0
    assert len(inside.records) == len(small_probe.scales) * len(inside.base_points)

    outside = variation_membership(double(), ORIGIN, line, line, 1.0, [3.0], small_probe)
    assert not outside.member
    assert outside.max_residual == pytest.approx(1.0, abs=1e-4)


def test_square_membership_at_rate_two(line: DirectionSet, up: DirectionSet, small_probe: ProbeSpec) -> None:
    F = SquareMap()
    assert variation_membership(F, ORIGIN, line, up, 2.0, [1.0], small_probe).member

    beyond = variation_membership(F, ORIGIN, line, up, 2.0, [1.2], small_probe)
    assert not beyond.member
    assert beyond.max_residual == pytest.approx(0.2, abs=1e-4)

    assert not variation_membership(F, ORIGIN, line, up, 2.0, [-1.0], small_probe).member


def test_membership_validates_arguments(line: DirectionSet, small_probe: ProbeSpec) -> None:
    with pytest.raises(ValueError):
        variation_membership(double(), ORIGIN, line, line, 0.0, [1.0], small_probe)
    with pytest.raises(ValueError):
        variation_membership(double(), ORIGIN, line, line, 1.0, [1.0, 0.0], small_probe)


def test_linear_variation_modulus(line: DirectionSet, small_probe: ProbeSpec) -> None:
    estimate = variation_modulus(double(), ORIGIN, line, line, 1.0, small_probe)
    assert estimate.c_bar_lo == pytest.approx(2.0)
    assert 2.0 <= estimate.c_bar_hi <= 2.1
    assert estimate.trace[0].c == 1.0
    assert estimate.trace[0].status is Status.holds


def test_variation_modulus_needs_rate_at_least_one(line: DirectionSet, small_probe: ProbeSpec) -> None:
    with pytest.raises(ValueError, match="at least 1"):
        variation_modulus(double(), ORIGIN, line, line, 0.5, small_probe)


def test_variation_criterion(line: DirectionSet, small_probe: ProbeSpec) -> None:
    holds = check_variation_criterion(double(), ORIGIN, line, line, 1.0, 1.5, small_probe)
    assert holds.status is Status.holds
    assert holds.witness is None

    fails = check_variation_criterion(double(), ORIGIN, line, line, 1.0, 2.5, small_probe)
    assert fails.status is Status.fails
    assert fails.witness is not None
    assert fails.witness.target == [-2.5]
    assert fails.witness.lhs > fails.witness.rhs


def test_variation_criterion_scope(line: DirectionSet, small_probe: ProbeSpec) -> None:
    both = DirectionSet.finite([[1.0], [-1.0]])
    with pytest.raises(ScopeError):
        check_variation_criterion(double(), ORIGIN, both, line, 1.0, 1.0, small_probe)
    with pytest.raises(ValueError):
        check_variation_criterion(double(), ORIGIN, line, line, 1.0, 0.0, small_probe)


@pytest.mark.parametrize(
    "F, M, r",
    [
        (double(), DirectionSet.sphere(1), 1.0),
        (double(), DirectionSet.sphere(1), 2.0),
        (SquareMap(), DirectionSet.finite([[1.0]]), 1.0),
        (SquareMap(), DirectionSet.finite([[1.0]]), 2.0),
    ],
)
def test_variation_and_openness_brackets_overlap(
    F: SetValuedMap, M: DirectionSet, r: float, line: DirectionSet, small_spec: NeighborhoodSpec
) -> None:
    sampling = ProbeSpec(scales=small_spec.t_values, search_steps=8, bisection_steps=20)
    variation = variation_modulus(F, ORIGIN, line, M, r, sampling)
    openness = estimate_modulus(Property.open, F, ORIGIN, line, M, r, small_spec)
    assert max(variation.c_bar_lo, openness.c_lo) <= min(variation.c_bar_hi, openness.c_hi)


def test_square_variation_modulus(line: DirectionSet, up: DirectionSet, small_spec: NeighborhoodSpec) -> None:
    sampling = ProbeSpec(scales=small_spec.t_values, search_steps=8, bisection_steps=20)
    quadratic = variation_modulus(SquareMap(), ORIGIN, line, up, 2.0, sampling)
    assert quadratic.c_bar_lo == pytest.approx(1.0)
    assert quadratic.c_bar_hi <= 1.05

    # at rate 1 the bracket sits at the finest scale and vanishes with it
    linear = variation_modulus(SquareMap(), ORIGIN, line, up, 1.0, sampling)
    finer = variation_modulus(SquareMap(), ORIGIN, line, up, 1.0, sampling.refined().refined())
    finest = small_spec.t_values[-1]
    assert linear.c_bar_lo <= finest * (1.0 + 1e-3)
    assert finest <= linear.c_bar_hi <= finest * 1.06
    assert finer.c_bar_hi <= linear.c_bar_lo
