"""
Core engine modules for JetKit
"""
from .errors import (
    JetKitError,
    CoordinateOutOfFrameError,
    SingularTransformError,
    DimensionOverflowError,
    NotInvolutiveError,
    NotFormallyIntegrableError,
    BudgetExhaustedError,
    ConsistencyError,
    OperationCancelled,
    DocumentError,
)
from .exactalg import RationalMatrix, Modular, EXACT, rank, rref, kernel_basis, cokernel_basis
from .jetspace import JetCoordinate, JetFrame, MultiIndex, SymbolFrame, dim_jet, dim_symbol, multi_indices
from .system import (
    LinearJetSystem,
    make_system,
    prolong,
    project,
    symbol_at,
    symbol_dimension,
    parametric_jets,
    is_formally_integrable,
    involutive_completion,
    change_coordinates,
)
from .deltacohomology import cohomology, is_s_acyclic, is_involutive, cartan_test, random_regularizing_change
from .sequence import (
    OperatorHandle,
    operator_from_system,
    cc_at_order,
    cc_order_bound,
    resolution,
    janet_tabular,
    janet_bundles_by_dots,
    spencer_bundles,
    hybrid_bundles,
    fundamental_diagram,
    check_jet_exactness,
    euler_poincare,
)
from .catalog import FlatMetric, catalog_names, catalog_system
from .vector_fields import PolyVectorField, lie_bracket, elations, polynomial_solutions, spencer_operator

__all__ = [
    'JetKitError',
    'CoordinateOutOfFrameError',
    'SingularTransformError',
    'DimensionOverflowError',
    'NotInvolutiveError',
    'NotFormallyIntegrableError',
    'BudgetExhaustedError',
    'ConsistencyError',
    'OperationCancelled',
    'DocumentError',
    'RationalMatrix',
    'Modular',
    'EXACT',
    'rank',
    'rref',
    'kernel_basis',
    'cokernel_basis',
    'JetCoordinate',
    'JetFrame',
    'MultiIndex',
    'SymbolFrame',
    'dim_jet',
    'dim_symbol',
    'multi_indices',
    'LinearJetSystem',
    'make_system',
    'prolong',
    'project',
    'symbol_at',
    'symbol_dimension',
    'parametric_jets',
    'is_formally_integrable',
    'involutive_completion',
    'change_coordinates',
    'cohomology',
    'is_s_acyclic',
    'is_involutive',
    'cartan_test',
    'random_regularizing_change',
    'OperatorHandle',
    'operator_from_system',
    'cc_at_order',
    'cc_order_bound',
    'resolution',
    'janet_tabular',
    'janet_bundles_by_dots',
    'spencer_bundles',
    'hybrid_bundles',
    'fundamental_diagram',
    'check_jet_exactness',
    'euler_poincare',
    'FlatMetric',
    'catalog_names',
    'catalog_system',
    'PolyVectorField',
    'lie_bracket',
    'elations',
    'polynomial_solutions',
    'spencer_operator',
]
