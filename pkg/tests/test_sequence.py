import os
import sys
import threading
from fractions import Fraction

import pytest

# Ensure repo root on sys.path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import EngineSettings
from core.catalog import (
    FlatMetric,
    conformal_killing_flat,
    conformal_n1,
    conformal_n2,
    vanishing_pair,
    vanishing_pair_operator,
    killing_cc_dims,
    killing_flat,
    macaulay,
)
from core.deltacohomology import random_regularizing_change
from core.errors import NotFormallyIntegrableError, NotInvolutiveError, OperationCancelled
from core.exactalg import RationalMatrix
from core.jetspace import JetCoordinate, JetFrame, MultiIndex, jet_label
from core.sequence import (
    CompatibilityConditions,
    alternating_sum,
    cc_at_order,
    cc_by_substitution,
    cc_order_bound,
    check_jet_exactness,
    check_symbol_exactness,
    complete_operator,
    compose,
    euler_poincare,
    fundamental_diagram,
    generating_conditions,
    hybrid_bundles,
    hybrid_first_slot,
    identity_operator,
    janet_bundles_by_dots,
    janet_tabular,
    left_inverse,
    operator_from_conditions,
    operator_from_rows,
    operator_from_system,
    resolution,
    spencer_bundles,
    spencer_form,
)
from core.system import change_coordinates, involutive_completion, prolong


def killing(n):
    return killing_flat(FlatMetric.euclidean(n))


def value_and_derivative():
    """D y = (y, y_x) on the line."""
    frame = JetFrame(1, 1, 1)
    return operator_from_rows(frame, [{1: 1}, {0: 1}], "value-and-derivative")


# ============================================================================
# OPERATORS
# ============================================================================

def test_operator_from_system_shapes():
    D = operator_from_system(killing(3))
    assert (D.source_dim, D.target_dim, D.order, D.n) == (3, 6, 1, 3)
    assert D.row_orders() == [1] * 6


def test_compose_with_identity():
    D = vanishing_pair_operator()
    composite = compose(identity_operator(2, 2), D)
    assert composite.order == 2
    assert composite.system == D.system


def test_compose_rejects_mismatched_operators():
    with pytest.raises(ValueError):
        compose(operator_from_system(killing(3)), vanishing_pair_operator())


# ============================================================================
# COMPATIBILITY CONDITIONS
# ============================================================================

def test_killing_generating_cc():
    scan = generating_conditions(operator_from_system(killing(3)))
    assert scan.order == 2
    assert scan.count == killing_cc_dims(3)[0] == 6


def test_cc_compose_to_zero():
    D = operator_from_system(killing(3))
    D1 = operator_from_conditions(generating_conditions(D).conditions)
    assert compose(D1, D).is_zero()


def test_cc_order_bound_matches_scan():
    assert cc_order_bound(operator_from_system(killing(3))) == 2


@pytest.mark.parametrize(
    "n, expected",
    [
        (3, 3),
        pytest.param(4, 2, marks=pytest.mark.slow),
    ],
)
def test_cc_order_bound_of_conformal(n, expected):
    D = operator_from_system(conformal_killing_flat(FlatMetric.euclidean(n)))
    assert cc_order_bound(D) == expected


def test_cc_order_bound_reads_fi_bound_from_settings():
    D = operator_from_system(killing(3))
    assert cc_order_bound(D, settings=EngineSettings(fi_bound=1)) == 2
    assert cc_order_bound(D, fi_bound=0, settings=EngineSettings(fi_bound=1)) == 2
    with pytest.raises(NotFormallyIntegrableError):
        cc_order_bound(vanishing_pair_operator(), settings=EngineSettings(fi_bound=1))


def test_cc_order_bound_needs_formal_integrability():
    with pytest.raises(NotFormallyIntegrableError):
        cc_order_bound(vanishing_pair_operator())


def test_vanishing_pair_single_second_order_cc():
    scan = generating_conditions(vanishing_pair_operator())
    assert [cc.order for cc in scan.conditions] == [2]
    assert scan.count == 1


def test_vanishing_pair_cc_is_d12u_minus_u_minus_d22v():
    cc = generating_conditions(vanishing_pair_operator()).conditions[0]
    row = {jet_label(cc.frame.coordinates[c], ["u", "v"]): v for c, v in cc.rows[0].items()}
    scale = row["u(1,2)"]
    assert {label: v / scale for label, v in row.items()} == {"u(1,2)": 1, "u": -1, "v(2,2)": -1}


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_vanishing_pair_generating_sequence_sums_to_zero(r):
    D = vanishing_pair_operator()
    C = operator_from_conditions(generating_conditions(D).conditions)
    assert check_jet_exactness([D, C], r).alternating_sum == 0


@pytest.mark.parametrize("degree", [4, 5, 6])
def test_vanishing_pair_symbol_sequence_has_defect_one(degree):
    D = vanishing_pair_operator()
    C = operator_from_conditions(generating_conditions(D).conditions)
    assert check_symbol_exactness([D, C], degree).defects == (1, 0)


def test_cc_at_order_counts_known_conditions():
    D = operator_from_system(killing(3))
    first = cc_at_order(D, 2)
    again = cc_at_order(D, 3, [first])
    assert first.count == 6
    assert again.known_rank == again.cokernel_dim
    assert again.count == 0


def test_cc_order_must_be_positive():
    with pytest.raises(ValueError):
        cc_at_order(vanishing_pair_operator(), 0)


# ============================================================================
# LEFT INVERSES
# ============================================================================

def test_left_inverse_of_value_and_derivative():
    D = value_and_derivative()
    inverse = left_inverse(D)
    assert inverse is not None
    assert inverse.order == 0
    # L o D = y, column 1 of J_1
    assert compose(inverse.operator, D).rows == ({1: 1},)


def test_cc_by_substitution():
    D = value_and_derivative()
    cc = cc_by_substitution(D)
    assert cc.row_orders() == [0, 1]
    assert not cc.rows[0]
    assert compose(cc, D).is_zero()


# ============================================================================
# RESOLUTIONS
# ============================================================================

@pytest.mark.slow
def test_killing3_resolution():
    report = resolution(operator_from_system(killing(3)))
    assert report.complete
    assert report.bundles == (3, 6, 6, 3)
    assert report.orders == (1, 2, 1)
    assert report.euler_poincare == 0
    assert report.chain() == "3 -1-> 6 -2-> 6 -1-> 3"


def test_resolution_step_budget():
    report = resolution(operator_from_system(killing(3)), max_steps=0)
    assert not report.complete
    assert report.bundles == (3, 6)
    assert "stopped after 0" in report.message


def test_complete_operator_prolongs_lower_order_conditions():
    first, second = JetFrame(2, 1, 1), JetFrame(2, 1, 2)
    u = lambda frame, *vs: frame.index(JetCoordinate(0, MultiIndex.from_variables(2, vs)))
    conditions = [
        CompatibilityConditions(1, first, ({u(first, 1): Fraction(1)},), 1, 0),
        CompatibilityConditions(2, second, ({u(second, 2, 2): Fraction(1)},), 1, 0),
    ]
    assert operator_from_conditions(conditions).target_dim == 2
    D = complete_operator(conditions)
    # u_1, u_11, u_12, u_22
    assert D.order == 2
    assert D.target_dim == 4
    assert D.system.solution_dim == 2


def test_complete_operator_projects_until_integrable():
    S = vanishing_pair()
    D = complete_operator([CompatibilityConditions(2, S.frame, S.rows, 2, 0)])
    assert D.target_dim == S.frame.dim
    assert D.system.solution_dim == 0


def test_resolution_steps_record_generating_counts():
    report = resolution(operator_from_system(killing(3)), max_steps=1)
    assert [step.raw_dim for step in report.steps] == [6, 6]
    assert [step.target_dim for step in report.steps] == [6, 6]
    assert report.steps[0].kernel_fi


@pytest.mark.slow
def test_macaulay3_resolution_completes_mixed_order_conditions():
    report = resolution(operator_from_system(prolong(macaulay(), 1)))
    assert report.complete
    assert report.bundles == (1, 12, 21, 46, 72, 48, 12)
    assert report.orders == (3, 1, 2, 1, 1, 1)
    assert report.euler_poincare == 0
    assert (report.steps[2].raw_dim, report.steps[2].target_dim) == (13, 46)
    assert any("13 generating CC, 46 after completion" in note for note in report.notes)


@pytest.mark.slow
@pytest.mark.parametrize(
    "n, bundles, orders",
    [
        (3, (3, 5, 5, 3), (1, 3, 1)),
        (4, (4, 9, 10, 9, 4), (1, 2, 2, 1)),
    ],
)
def test_conformal_resolution(n, bundles, orders):
    report = resolution(operator_from_system(conformal_killing_flat(FlatMetric.euclidean(n))))
    assert report.complete
    assert report.bundles == bundles
    assert report.orders == orders
    assert report.euler_poincare == 0


@pytest.mark.slow
def test_killing4_resolution_prefix_matches_closed_forms():
    report = resolution(operator_from_system(killing(4)), max_steps=2)
    assert report.bundles == (4, 10, 20, 20)
    assert report.bundles[2:] == killing_cc_dims(4)
    assert report.orders == (1, 2, 1)


def test_resolution_cancellation():
    cancel = threading.Event()
    cancel.set()
    with pytest.raises(OperationCancelled):
        resolution(operator_from_system(killing(3)), cancel_event=cancel)


@pytest.mark.parametrize(
    "values, expected",
    [
        ([1, 12, 21, 46, 72, 48, 12], 0),
        ([3, 6, 6, 3], 0),
        ([4, 10, 20, 20, 10, 4], 0),
        ([1, 2], 1),
    ],
)
def test_euler_poincare(values, expected):
    assert euler_poincare(values) == expected


def test_alternating_sum_sign():
    assert alternating_sum([8, 24, 24, 8], 1) == 0
    assert alternating_sum([1, 2, 3], 1) == 2


# ============================================================================
# EXACTNESS
# ============================================================================

def test_killing_jet_sequence_exact_at_first_target():
    D = operator_from_system(killing(3))
    D1 = operator_from_conditions(generating_conditions(D).conditions)
    report = check_jet_exactness([D, D1], 0)
    assert report.kernel_dim == 6
    assert report.defects[0] == 0


def test_killing_symbol_sequence():
    D = operator_from_system(killing(3))
    D1 = operator_from_conditions(generating_conditions(D).conditions)
    report = check_symbol_exactness([D, D1], 3)
    assert report.kernel_dim == 0
    assert report.defects[0] == 0


def test_exactness_rejects_broken_chain():
    with pytest.raises(ValueError):
        check_jet_exactness([vanishing_pair_operator(), operator_from_system(killing(3))], 0)


# ============================================================================
# FUNDAMENTAL DIAGRAM
# ============================================================================

def test_macaulay_diagram():
    S = prolong(macaulay(), 2)
    diagram = fundamental_diagram(S)
    assert diagram.spencer == (8, 24, 24, 8)
    assert diagram.hybrid == (35, 84, 70, 20)
    assert diagram.janet == (27, 60, 46, 12)
    assert diagram.janet_by_dots == diagram.janet
    assert diagram.spencer_euler_poincare == 0
    assert diagram.janet_euler_poincare == 0
    assert diagram.hybrid_euler_poincare == 0


@pytest.mark.slow
def test_scrambled_macaulay_diagram_after_regularizing():
    A = RationalMatrix.from_rows([[1, 2, 1], [0, 1, 3], [1, 2, 2]])
    scrambled = change_coordinates(prolong(macaulay(), 2), A)
    result = random_regularizing_change(scrambled)
    assert result.success
    diagram = fundamental_diagram(result.system)
    assert diagram.spencer == (8, 24, 24, 8)
    assert diagram.hybrid == (35, 84, 70, 20)
    assert diagram.janet == (27, 60, 46, 12)


@pytest.mark.parametrize(
    "build, spencer, hybrid, janet",
    [
        (conformal_n1, (3, 3), (4, 3), (1, 0)),
        (conformal_n2, (6, 12, 6), (20, 30, 12), (14, 18, 6)),
        (lambda: conformal_killing_flat(FlatMetric.euclidean(3)),
         (10, 30, 30, 10), (60, 135, 108, 30), (50, 105, 78, 20)),
    ],
)
def test_completed_conformal_diagrams(build, spencer, hybrid, janet):
    trace = involutive_completion(build())
    assert trace.completed
    diagram = fundamental_diagram(trace.final)
    assert (diagram.spencer, diagram.hybrid, diagram.janet) == (spencer, hybrid, janet)


def test_janet_tabular_dots():
    T = janet_tabular(prolong(macaulay(), 2))
    assert T.total == 27
    assert janet_bundles_by_dots(T) == [60, 46, 12]
    assert all(len(row.board().split()) == 3 for row in T.rows)


def test_janet_tabular_needs_involution():
    with pytest.raises(NotInvolutiveError):
        janet_tabular(macaulay())


def test_spencer_bundles_need_involution():
    with pytest.raises(NotInvolutiveError):
        spencer_bundles(macaulay())


def test_hybrid_first_slot():
    slot = hybrid_first_slot(3, 1, 4)
    assert (slot.next_jets, slot.first_jets, slot.quotient) == (56, 140, 84)
    assert hybrid_bundles(3, 1, 4)[1] == 84


# ============================================================================
# SPENCER FORM
# ============================================================================

def test_spencer_form_of_killing():
    form = spencer_form(killing(3))
    assert form.order == 1
    assert form.m == 6
    assert form.rank == 18
    assert form.solution_dim == 6


def test_spencer_form_needs_zero_next_symbol():
    with pytest.raises(NotInvolutiveError):
        spencer_form(macaulay())


def test_spencer_form_needs_projection():
    with pytest.raises((NotFormallyIntegrableError, NotInvolutiveError)):
        spencer_form(vanishing_pair())


def test_spencer_form_of_macaulay_order_three():
    form = spencer_form(prolong(macaulay(), 1))
    assert (form.m, form.rank, form.solution_dim) == (8, 24, 8)


def test_spencer_form_of_conformal_n2():
    form = spencer_form(conformal_n2())
    assert (form.m, form.rank, form.solution_dim) == (6, 12, 6)


# ============================================================================
# VANISHING PAIR BY SUBSTITUTION
# ============================================================================

def test_vanishing_pair_left_inverse_has_order_two():
    D = vanishing_pair_operator()
    inverse = left_inverse(D)
    assert inverse is not None
    assert inverse.order == 2
    big = JetFrame(2, 1, 4)
    assert compose(inverse.operator, D).rows == ({big.index(JetCoordinate(0, MultiIndex.zero(2))): 1},)


def test_vanishing_pair_substitution_gives_two_fourth_order_cc():
    D = vanishing_pair_operator()
    cc = cc_by_substitution(D)
    assert cc.order == 4
    assert cc.row_orders() == [4, 4]
    assert compose(cc, D).is_zero()


@pytest.mark.slow
def test_conformal5_resolution_prefix():
    report = resolution(operator_from_system(conformal_killing_flat(FlatMetric.euclidean(5))), max_steps=1)
    assert report.bundles == (5, 14, 35)
    assert report.orders == (1, 2)


def test_vanishing_pair_substitution_sequence_sums_to_four():
    D = vanishing_pair_operator()
    cc = cc_by_substitution(D)
    frame = JetFrame(2, 2, 2)
    u = lambda *vs: frame.index(JetCoordinate(0, MultiIndex.from_variables(2, vs)))
    v = lambda *vs: frame.index(JetCoordinate(1, MultiIndex.from_variables(2, vs)))
    W = operator_from_rows(frame, [{v(1, 2): 1, v(): 1, u(1, 1): -1}], "W")
    assert check_jet_exactness([D, cc, W], 0).alternating_sum == 4
