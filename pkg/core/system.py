"""
Linear constant-coefficient systems R_q in J_q(E).

A system is stored as the rref of its equation rows over the frame order,
so pivots are leading jets and the remaining coordinates are parametric.
Prolongation is pure index shifting; projection keeps the rref rows whose
pivot sits at or below the target order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import sympy

from config import COMPLETION_MAX_STEPS, FI_BOUND, EngineSettings, default_settings
from core.errors import CoordinateOutOfFrameError, SingularTransformError
from core.exactalg import (
    RationalMatrix,
    SparseRow,
    determinant,
    kernel_basis,
    rank_of_rows,
    sparse_rref,
)
from core.jetspace import (
    JetCoordinate,
    JetFrame,
    MultiIndex,
    SymbolFrame,
    dim_symbol,
    multi_indices,
)
from utils.logger import logger

Combination = Mapping[JetCoordinate, object]


# ============================================================================
# TYPES
# ============================================================================

class LinearJetSystem:
    """Homogeneous system R_q: rref rows over the coordinates of ``frame``."""

    __slots__ = ("frame", "rows", "pivots", "label", "_matrix")

    def __init__(self, frame: JetFrame, rows: Sequence[SparseRow], pivots: Sequence[int], label: str = ""):
        self.frame = frame
        self.rows = tuple(rows)
        self.pivots = tuple(pivots)
        self.label = label
        self._matrix = None

    @property
    def n(self) -> int:
        return self.frame.n

    @property
    def m(self) -> int:
        return self.frame.m

    @property
    def order(self) -> int:
        return self.frame.q

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def solution_dim(self) -> int:
        return self.frame.dim - self.rank

    @property
    def equations(self) -> RationalMatrix:
        if self._matrix is None:
            self._matrix = RationalMatrix.from_sparse(self.rows, self.frame.dim)
        return self._matrix

    def row_order(self, i: int) -> int:
        return self.frame.degree_of_column(self.pivots[i])

    def combinations(self) -> list[dict[JetCoordinate, Fraction]]:
        coords = self.frame.coordinates
        return [{coords[c]: v for c, v in sorted(row.items())} for row in self.rows]

    def relabel(self, label: str) -> "LinearJetSystem":
        return LinearJetSystem(self.frame, self.rows, self.pivots, label)

    def _key(self):
        return self.frame, tuple(tuple(sorted(r.items())) for r in self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearJetSystem):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        name = f"'{self.label}' " if self.label else ""
        return (f"LinearJetSystem({name}n={self.n}, m={self.m}, q={self.order}, "
                f"equations={self.rank}, solution_dim={self.solution_dim})")


@dataclass(frozen=True)
class SymbolSpace:
    """g_d as the column span of ``basis`` inside S_d T* (x) E."""
    frame: SymbolFrame
    basis: RationalMatrix

    @property
    def level(self) -> int:
        return self.frame.q

    @property
    def dim(self) -> int:
        return self.basis.cols

    def is_zero(self) -> bool:
        return self.dim == 0


@dataclass(frozen=True)
class FormalIntegrabilityVerdict:
    holds: bool
    bound: int
    failing_level: int | None = None
    dims: tuple[int, ...] = ()

    def describe(self) -> str:
        if self.holds:
            return f"formally integrable up to prolongation bound {self.bound}"
        return f"not formally integrable: projection onto order {self.failing_level} is not surjective"


@dataclass(frozen=True)
class CompletionStep:
    operation: str  # "prolong" | "project"
    order: int
    solution_dim: int
    symbol_dim: int


@dataclass(frozen=True)
class CompletionTrace:
    steps: tuple[CompletionStep, ...]
    final: LinearJetSystem
    prolongations: int
    projections: int
    completed: bool
    message: str = ""
    initial: LinearJetSystem | None = field(default=None, compare=False)


# ============================================================================
# CONSTRUCTION
# ============================================================================

def system_from_rows(frame: JetFrame, rows: Iterable[Mapping[int, object]], label: str = "") -> LinearJetSystem:
    """Row-reduce sparse column rows into a system."""
    reduced = sparse_rref(rows)
    return LinearJetSystem(frame, [r for _, r in reduced], [p for p, _ in reduced], label)


def make_system(frame: JetFrame, equations: Iterable[Combination] | RationalMatrix, label: str = "") -> LinearJetSystem:
    """
    Build R_q from linear combinations of jet coordinates.

    Args:
        frame: The jet frame J_q(E).
        equations: Mappings JetCoordinate -> coefficient, or an equation matrix
            whose columns follow the frame order.
        label: Provenance shown in reports.

    Returns:
        The system in rref with zero rows dropped.

    Raises:
        CoordinateOutOfFrameError: If a coordinate does not belong to the frame.
    """
    if isinstance(equations, RationalMatrix):
        if equations.cols != frame.dim:
            raise CoordinateOutOfFrameError(
                f"equation matrix has {equations.cols} columns, frame has {frame.dim}"
            )
        return system_from_rows(frame, equations.sparse_rows(), label)

    rows = []
    for combination in equations:
        row: dict[int, Fraction] = {}
        for coord, coefficient in combination.items():
            coord = JetCoordinate(int(coord[0]), MultiIndex(coord[1]))
            if len(coord.index) != frame.n or coord not in frame or coord.unknown >= frame.m:
                raise CoordinateOutOfFrameError(f"jet {tuple(coord.index)} of unknown "
                                                f"{coord.unknown + 1} lies outside {frame}")
            col = frame.index(coord)
            row[col] = row.get(col, Fraction(0)) + Fraction(coefficient)
        rows.append({c: v for c, v in row.items() if v})
    return system_from_rows(frame, rows, label)


def full_space(frame: JetFrame, label: str = "") -> LinearJetSystem:
    return LinearJetSystem(frame, [], [], label)


# ============================================================================
# PROLONGATION / PROJECTION
# ============================================================================

def shifted_row(row: Mapping[int, Fraction], source: JetFrame, target: JetFrame, nu: Sequence[int]) -> SparseRow:
    """The formal derivative d_nu of one equation, as a row over ``target``."""
    coords = source.coordinates
    return {
        target.index(JetCoordinate(coords[c].unknown, coords[c].index.shift(nu))): v
        for c, v in row.items()
    }


def prolonged_rows(S: LinearJetSystem, r: int) -> tuple[JetFrame, list[SparseRow]]:
    """All formal derivatives of order <= r of the equations of S."""
    target = S.frame.raised(S.order + r)
    shifts = [nu for d in range(r + 1) for nu in multi_indices(S.n, d)]
    rows = [shifted_row(row, S.frame, target, nu) for row in S.rows for nu in shifts]
    return target, rows


def prolong(S: LinearJetSystem, r: int) -> LinearJetSystem:
    if r < 0:
        raise ValueError("prolongation order must be non-negative")
    if r == 0:
        return S
    target, rows = prolonged_rows(S, r)
    return system_from_rows(target, rows, f"prolong({S.label or 'R'}, {r})")


def project(S: LinearJetSystem, target_order: int) -> LinearJetSystem:
    """Rows supported on degree <= target_order, induced on J_target(E)."""
    if target_order > S.order:
        raise ValueError(f"cannot project order {S.order} to higher order {target_order}")
    if target_order == S.order:
        return S
    target = S.frame.raised(target_order)
    offset = target.offset_into(S.frame)
    rows, pivots = [], []
    for pivot, row in zip(S.pivots, S.rows):
        if pivot >= offset:
            rows.append({c - offset: v for c, v in row.items()})
            pivots.append(pivot - offset)
    return LinearJetSystem(target, rows, pivots, f"project({S.label or 'R'}, {target_order})")


def parametric_jets(S: LinearJetSystem) -> list[JetCoordinate]:
    pivots = set(S.pivots)
    return [c for i, c in enumerate(S.frame.coordinates) if i not in pivots]


def leading_jets(S: LinearJetSystem) -> list[JetCoordinate]:
    coords = S.frame.coordinates
    return [coords[p] for p in S.pivots]


# ============================================================================
# SYMBOLS
# ============================================================================

def symbol_rows(S: LinearJetSystem, level: int) -> list[SparseRow]:
    """Equations of g_level in the coordinates of SymbolFrame(n, m, level)."""
    if level < S.order:
        raise ValueError(f"symbol level {level} below system order {S.order}")
    top = S.frame.degree_block(S.order)
    target = JetFrame(S.n, S.m, level)
    coords = S.frame.coordinates
    shifts = multi_indices(S.n, level - S.order)
    out = []
    for pivot, row in zip(S.pivots, S.rows):
        if pivot not in top:
            continue
        head = [(coords[c], v) for c, v in row.items() if c in top]
        for nu in shifts:
            out.append({target.index(JetCoordinate(k, mu.shift(nu))): v for (k, mu), v in head})
    return out


def symbol_dimension(S: LinearJetSystem, level: int, settings: EngineSettings | None = None) -> int:
    cols = dim_symbol(S.n, S.m, level)
    return cols - rank_of_rows(symbol_rows(S, level), cols, settings)


def symbol_at(S: LinearJetSystem, level: int) -> SymbolSpace:
    """Basis of g_level, prolonging S internally when level exceeds its order."""
    frame = SymbolFrame(S.n, S.m, level)
    rows = symbol_rows(S, level)
    if not rows:
        return SymbolSpace(frame, RationalMatrix.identity(frame.dim))
    matrix = RationalMatrix.from_sparse(rows, frame.dim)
    return SymbolSpace(frame, kernel_basis(matrix))


def prolonged_dimension(S: LinearJetSystem, r: int, settings: EngineSettings | None = None) -> int:
    """dim R_{q+r} from the rank of the prolonged equations."""
    target, rows = prolonged_rows(S, r)
    return target.dim - rank_of_rows(rows, target.dim, settings)


def projected_dimension(S: LinearJetSystem, r: int, settings: EngineSettings | None = None) -> int:
    """dim of the projection of R_{q+r+1} onto order q+r."""
    return (prolonged_dimension(S, r + 1, settings)
            - symbol_dimension(S, S.order + r + 1, settings))


# ============================================================================
# FORMAL INTEGRABILITY
# ============================================================================

def is_formally_integrable(S: LinearJetSystem, bound: int = FI_BOUND,
                           settings: EngineSettings | None = None) -> FormalIntegrabilityVerdict:
    """
    Check that R_{q+r+1} projects onto R_{q+r} for r = 0..bound.

    Returns:
        A verdict carrying the bound it is certified to, or the first order
        onto which the projection fails to be surjective.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    settings = settings or default_settings()
    dims = [prolonged_dimension(S, 0, settings)]
    for r in range(bound + 1):
        dims.append(prolonged_dimension(S, r + 1, settings))
        projected = dims[r + 1] - symbol_dimension(S, S.order + r + 1, settings)
        if projected != dims[r]:
            logger.debug(f"Projection onto order {S.order + r} has dim {projected}, expected {dims[r]}")
            return FormalIntegrabilityVerdict(False, bound, S.order + r, tuple(dims))
    return FormalIntegrabilityVerdict(True, bound, None, tuple(dims))


def involutive_completion(S: LinearJetSystem, max_steps: int = COMPLETION_MAX_STEPS,
                          settings: EngineSettings | None = None) -> CompletionTrace:
    """
    Alternate prolongation and projection until the system is formally
    integrable with an involutive symbol.

    Projection runs first whenever R_{q+1} does not cover R_q, so hidden
    lower-order conditions are absorbed before the order grows.
    """
    from core.deltacohomology import is_involutive

    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    settings = settings or default_settings()
    current = S
    steps: list[CompletionStep] = []
    prolongations = projections = 0
    for _ in range(max_steps):
        q = current.order
        if projected_dimension(current, 0, settings) < current.solution_dim:
            current = project(prolong(current, 1), q)
            projections += 1
            steps.append(CompletionStep("project", q, current.solution_dim,
                                        symbol_dimension(current, q, settings)))
            logger.info(f"Completion: projection revealed new equations, dim R_{q} = {current.solution_dim}")
            continue
        # an involutive symbol with a surjective first projection is formally integrable
        if is_involutive(current, settings=settings).holds:
            return CompletionTrace(tuple(steps), current, prolongations, projections, True,
                                   f"involutive at order {q}", initial=S)
        current = prolong(current, 1)
        prolongations += 1
        steps.append(CompletionStep("prolong", q + 1, current.solution_dim,
                                    symbol_dimension(current, q + 1, settings)))
        logger.info(f"Completion: prolonged to order {q + 1}, dim R_{q + 1} = {current.solution_dim}")
    return CompletionTrace(tuple(steps), current, prolongations, projections, False,
                           f"not completed within {max_steps} steps", initial=S)


# ============================================================================
# COORDINATE CHANGES
# ============================================================================

def _to_sympy(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def change_coordinates(S: LinearJetSystem, A: RationalMatrix) -> LinearJetSystem:
    """
    Rewrite S in coordinates xbar with x = A xbar.

    The derivative d/dx_i becomes sum_j (A^-1)_{ji} d/dxbar_j, applied through
    the symmetric powers of each jet.

    Raises:
        SingularTransformError: If A is not invertible.
    """
    n = S.n
    if A.shape != (n, n):
        raise SingularTransformError(f"expected a {n}x{n} matrix, got {A.rows}x{A.cols}")
    if determinant(A) == 0:
        raise SingularTransformError("coordinate change matrix is singular")
    inverse = sympy.Matrix(n, n, [_to_sympy(v) for v in A.entries]).inv()
    symbols = sympy.symbols(f"p1:{n + 1}")
    forms = [sum(inverse[j, i] * symbols[j] for j in range(n)) for i in range(n)]

    expansions: dict[MultiIndex, list[tuple[MultiIndex, Fraction]]] = {}

    def expand(mu: MultiIndex):
        if mu not in expansions:
            product = sympy.Integer(1)
            for i, e in enumerate(mu):
                if e:
                    product *= forms[i] ** e
            poly = sympy.Poly(product, *symbols)
            expansions[mu] = [
                (MultiIndex(exps), Fraction(int(c.p), int(c.q)))
                for exps, c in poly.terms() if c != 0
            ]
        return expansions[mu]

    coords = S.frame.coordinates
    rows = []
    for row in S.rows:
        out: dict[int, Fraction] = {}
        for c, v in row.items():
            k, mu = coords[c]
            for nu, coefficient in expand(mu):
                col = S.frame.index(JetCoordinate(k, nu))
                out[col] = out.get(col, Fraction(0)) + v * coefficient
        rows.append({c: v for c, v in out.items() if v})
    return system_from_rows(S.frame, rows, f"{S.label or 'R'} (changed coordinates)")
