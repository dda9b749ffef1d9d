import os
import sys

import pytest
import sympy

# Ensure repo root on sys.path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.catalog import FlatMetric, conformal_killing_flat, conformal_n1, conformal_n2, killing_flat
from core.jetspace import JetFrame
from core.vector_fields import (
    JetSection,
    PolyVectorField,
    coordinates,
    elation_second_jet,
    elations,
    field_satisfies,
    jet_section_from_field,
    lie_bracket,
    polynomial_solutions,
    section_satisfies,
    spencer_operator,
)

x1, x2, x3 = coordinates(3)


def rotation():
    return PolyVectorField.from_components([-x2, x1, 0])


def test_partial_and_apply():
    d2 = PolyVectorField.partial(3, 2)
    assert d2.components == (0, 1, 0)
    assert d2.apply(x1 * x2 ** 2) == 2 * x1 * x2


def test_lie_bracket_is_antisymmetric():
    a, b = rotation(), PolyVectorField.partial(3, 1)
    assert lie_bracket(a, b) == -lie_bracket(b, a)
    assert lie_bracket(a, b).components == (0, -1, 0)


def test_bracket_across_dimensions_rejected():
    with pytest.raises(ValueError):
        lie_bracket(PolyVectorField.partial(2, 1), PolyVectorField.partial(3, 1))


@pytest.mark.parametrize("metric", [FlatMetric.euclidean(3), FlatMetric.minkowski(4)])
def test_elations_are_conformal_not_killing(metric):
    conformal = conformal_killing_flat(metric)
    killing = killing_flat(metric)
    for theta in elations(metric):
        assert theta.degree() == 2
        assert field_satisfies(conformal, theta)
        assert not field_satisfies(killing, theta)


@pytest.mark.parametrize("metric", [FlatMetric.euclidean(3), FlatMetric.minkowski(4)])
def test_elation_divergence(metric):
    xs = coordinates(metric.n)
    for s, theta in enumerate(elations(metric)):
        assert sympy.expand(theta.divergence() - metric.n * metric.omega(s, s) * xs[s]) == 0


def test_elations_commute():
    thetas = elations(FlatMetric.euclidean(3))
    for a in thetas:
        for b in thetas:
            assert lie_bracket(a, b).is_zero()


def test_bracket_of_conformal_fields_is_conformal():
    S = conformal_killing_flat(FlatMetric.euclidean(3))
    theta = elations(FlatMetric.euclidean(3))[0]
    assert field_satisfies(S, lie_bracket(theta, rotation()))
    assert field_satisfies(S, lie_bracket(theta, PolyVectorField.partial(3, 1)))


def test_elation_second_jet_formula():
    metric = FlatMetric.euclidean(3)
    jet = elation_second_jet(metric, [1, 0, 0])
    # theta_1 = 1/2 (x1^2 - x2^2 - x3^2) d1 + x1 x2 d2 + x1 x3 d3
    assert {(c.unknown, tuple(c.index)): v for c, v in jet.items()} == {
        (0, (2, 0, 0)): 1,
        (0, (0, 2, 0)): -1,
        (0, (0, 0, 2)): -1,
        (1, (1, 1, 0)): 1,
        (2, (1, 0, 1)): 1,
    }


def test_spencer_operator_kills_holonomic_sections():
    theta = elations(FlatMetric.euclidean(3))[1]
    assert spencer_operator(jet_section_from_field(theta, 2)).is_zero()


def test_spencer_operator_detects_non_holonomic_section():
    frame = JetFrame(1, 1, 1)
    value, derivative = frame.coordinates[1], frame.coordinates[0]
    section = JetSection(frame, {value: x1, derivative: sympy.Integer(0)})
    image = spencer_operator(section)
    assert not image.is_zero()
    assert image.slice(1).value(value) == 1


def test_section_must_cover_frame():
    frame = JetFrame(1, 1, 1)
    with pytest.raises(ValueError):
        JetSection(frame, {frame.coordinates[0]: sympy.Integer(0)})


def test_section_frame_must_match_system():
    S = conformal_killing_flat(FlatMetric.euclidean(3))
    with pytest.raises(ValueError):
        section_satisfies(S, jet_section_from_field(PolyVectorField.partial(2, 1), 1))


@pytest.mark.parametrize(
    "build, expected",
    [
        (conformal_n1, 3),
        (conformal_n2, 6),
        (lambda: conformal_killing_flat(FlatMetric.euclidean(3)), 10),
        (lambda: killing_flat(FlatMetric.euclidean(3)), 6),
    ],
)
def test_polynomial_solution_counts(build, expected):
    S = build()
    solutions = polynomial_solutions(S, 2)
    assert solutions.dimension == expected
    assert solutions.certified
    assert all(field_satisfies(S, field) for field in solutions.fields)


def test_polynomial_solutions_below_system_order_are_not_certified():
    S = conformal_n2()
    low = polynomial_solutions(S, 1)
    assert low.dimension == 4
    assert not low.certified
    full = polynomial_solutions(S, 2)
    assert full.dimension == 6
    assert full.certified


@pytest.mark.slow
def test_polynomial_solutions_n4():
    assert polynomial_solutions(conformal_killing_flat(FlatMetric.euclidean(4)), 2).dimension == 15


def test_polynomial_solutions_need_square_system():
    from core.catalog import macaulay

    with pytest.raises(ValueError):
        polynomial_solutions(macaulay(), 2)
