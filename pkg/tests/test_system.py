import os
import sys

import pytest

# Ensure repo root on sys.path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.catalog import FlatMetric, vanishing_pair, killing_flat, macaulay
from core.errors import CoordinateOutOfFrameError, SingularTransformError
from core.exactalg import RationalMatrix
from core.jetspace import JetCoordinate, JetFrame, MultiIndex, jet_label
from core.system import (
    change_coordinates,
    full_space,
    involutive_completion,
    is_formally_integrable,
    leading_jets,
    make_system,
    parametric_jets,
    project,
    projected_dimension,
    prolong,
    prolonged_dimension,
    symbol_at,
    symbol_dimension,
)


def jet(n, *variables, unknown=0):
    return JetCoordinate(unknown, MultiIndex.from_variables(n, variables))


# ============================================================================
# CONSTRUCTION
# ============================================================================

def test_make_system_reduces_dependent_equations():
    frame = JetFrame(2, 1, 1)
    S = make_system(frame, [{jet(2, 1): 1}, {jet(2, 1): 2}, {jet(2, 2): 1, jet(2): -1}])
    assert S.rank == 2
    assert S.solution_dim == 1


def test_make_system_rejects_foreign_coordinate():
    with pytest.raises(CoordinateOutOfFrameError):
        make_system(JetFrame(2, 1, 1), [{jet(2, 1, 1): 1}])


def test_full_space_has_no_equations():
    S = full_space(JetFrame(3, 2, 2))
    assert S.rank == 0
    assert S.solution_dim == 20


def test_macaulay_parametric_jets():
    S = macaulay()
    assert [jet_label(c, ["y"]) for c in leading_jets(S)] == ["y(3,3)", "y(2,3)", "y(2,2)"]
    assert [jet_label(c, ["y"]) for c in parametric_jets(S)] == [
        "y(1,3)", "y(1,2)", "y(1,1)", "y(3)", "y(2)", "y(1)", "y",
    ]


# ============================================================================
# PROLONGATION / PROJECTION
# ============================================================================

@pytest.mark.parametrize("r, expected", [(0, 7), (1, 8), (2, 8)])
def test_macaulay_prolonged_dims(r, expected):
    S = macaulay()
    assert prolonged_dimension(S, r) == expected
    assert prolong(S, r).solution_dim == expected


@pytest.mark.parametrize("r", range(6))
def test_vanishing_pair_dims_stay_four(r):
    assert prolonged_dimension(vanishing_pair(), r) == 4


def test_projection_of_formally_integrable_prolongation_is_identity():
    S = macaulay()
    assert project(prolong(S, 1), 2) == S


def test_vanishing_pair_projection_drops():
    S = vanishing_pair()
    assert projected_dimension(S, 0) == 3
    assert project(prolong(S, 1), 2).solution_dim == 3


def test_project_upwards_rejected():
    with pytest.raises(ValueError):
        project(macaulay(), 3)


def test_prolong_negative_rejected():
    with pytest.raises(ValueError):
        prolong(macaulay(), -1)


# ============================================================================
# SYMBOLS
# ============================================================================

@pytest.mark.parametrize("level, expected", [(2, 3), (3, 1), (4, 0), (5, 0)])
def test_macaulay_symbol_dims(level, expected):
    S = macaulay()
    assert symbol_dimension(S, level) == expected
    assert symbol_at(S, level).dim == expected


def test_killing_symbol_dims():
    S = killing_flat(FlatMetric.euclidean(3))
    assert symbol_dimension(S, 1) == 3
    assert symbol_dimension(S, 2) == 0
    assert symbol_at(S, 2).is_zero


def test_symbol_below_order_rejected():
    with pytest.raises(ValueError):
        symbol_dimension(macaulay(), 1)


# ============================================================================
# FORMAL INTEGRABILITY / COMPLETION
# ============================================================================

def test_killing_is_formally_integrable():
    verdict = is_formally_integrable(killing_flat(FlatMetric.euclidean(3)), 4)
    assert verdict.holds
    assert verdict.bound == 4


def test_vanishing_pair_is_not_formally_integrable():
    verdict = is_formally_integrable(vanishing_pair(), 2)
    assert not verdict.holds
    assert verdict.failing_level == 2


def test_completion_of_vanishing_pair_reaches_zero():
    trace = involutive_completion(vanishing_pair())
    assert trace.completed
    assert trace.final.solution_dim == 0
    assert trace.projections == 4
    assert [step.solution_dim for step in trace.steps] == [3, 2, 1, 0]


def test_completion_of_macaulay_stops_at_order_four():
    trace = involutive_completion(macaulay())
    assert trace.completed
    assert trace.prolongations == 2
    assert trace.final.order == 4
    assert trace.final.solution_dim == 8


def test_completion_of_killing_stops_at_order_two():
    trace = involutive_completion(killing_flat(FlatMetric.euclidean(3)))
    assert trace.completed
    assert trace.final.order == 2
    assert trace.final.solution_dim == 6


def test_completion_budget_reported():
    trace = involutive_completion(macaulay(), max_steps=1)
    assert not trace.completed
    assert "not completed" in trace.message


# ============================================================================
# COORDINATE CHANGES
# ============================================================================

def test_swap_of_variables_moves_jets():
    frame = JetFrame(2, 1, 2)
    S = make_system(frame, [{jet(2, 1, 1): 1}])
    A = RationalMatrix.from_rows([[0, 1], [1, 0]])
    assert change_coordinates(S, A) == make_system(frame, [{jet(2, 2, 2): 1}])


def test_identity_change_is_trivial():
    S = macaulay()
    assert change_coordinates(S, RationalMatrix.identity(3)) == S


def test_singular_change_rejected():
    with pytest.raises(SingularTransformError):
        change_coordinates(macaulay(), RationalMatrix.zeros(3, 3))


SCRAMBLE = RationalMatrix.from_rows([[1, 2, 1], [0, 1, 3], [1, 2, 2]])


@pytest.mark.parametrize("build", [macaulay, lambda: prolong(macaulay(), 1)])
def test_unimodular_change_keeps_dimensions(build):
    S = build()
    T = change_coordinates(S, SCRAMBLE)
    assert T != S
    for r in range(3):
        assert prolonged_dimension(T, r) == prolonged_dimension(S, r)
    for level in range(S.order, S.order + 3):
        assert symbol_dimension(T, level) == symbol_dimension(S, level)
