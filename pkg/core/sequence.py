"""
Differential sequences built from linear operators.

An operator D : E -> F0 of order q is kept as its rows over J_q(E); the
kernel view is the system those rows define. Compatibility conditions (CC)
are relations among the prolonged rows, read as rows over J_r(F0).
"""
from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Iterable, Mapping, Sequence

from config import (
    ACYCLICITY_BOUND,
    COMPLETION_MAX_STEPS,
    KERNEL_CHECK_LIMIT,
    LEFT_INVERSE_BUDGET,
    RESOLUTION_BUDGET,
    RESOLUTION_FI_BOUND,
    RESOLUTION_LOOKAHEAD,
    RESOLUTION_MAX_STEPS,
    EngineSettings,
    default_settings,
)
from core.deltacohomology import cartan_test, delta_rank, is_involutive, is_s_acyclic
from core.errors import (
    BudgetExhaustedError,
    ConsistencyError,
    CoordinateOutOfFrameError,
    JetKitError,
    NotFormallyIntegrableError,
    NotInvolutiveError,
    OperationCancelled,
)
from core.exactalg import RationalMatrix, SparseRow, left_kernel_rows, rank_of_rows, sparse_rref
from core.jetspace import JetCoordinate, JetFrame, MultiIndex, SymbolFrame, class_of, dim_jet, multi_indices
from core.system import (
    LinearJetSystem,
    SymbolSpace,
    is_formally_integrable,
    parametric_jets,
    project,
    prolong,
    shifted_row,
    symbol_at,
    system_from_rows,
)
from utils.logger import logger


# ============================================================================
# OPERATORS
# ============================================================================

@dataclass(frozen=True, eq=False)
class OperatorHandle:
    """D : E -> F0 given by one row over J_q(E) per component of F0."""
    source: JetFrame
    rows: tuple[SparseRow, ...]
    label: str = ""

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def source_dim(self) -> int:
        return self.source.m

    @property
    def order(self) -> int:
        return self.source.q

    @property
    def target_dim(self) -> int:
        return len(self.rows)

    @cached_property
    def system(self) -> LinearJetSystem:
        """The kernel view R_q defined by the rows."""
        return system_from_rows(self.source, self.rows, self.label)

    def row_orders(self) -> list[int]:
        return [max((self.source.degree_of_column(c) for c in row), default=0) for row in self.rows]

    def is_zero(self) -> bool:
        return not any(self.rows)

    def __repr__(self) -> str:
        name = f"'{self.label}' " if self.label else ""
        return (f"OperatorHandle({name}{self.source_dim} -> {self.target_dim}, "
                f"order {self.order}, n={self.n})")


def operator_from_system(S: LinearJetSystem, label: str = "") -> OperatorHandle:
    """The operator whose components are the rref equations of S."""
    return OperatorHandle(S.frame, S.rows, label or S.label)


def operator_from_rows(frame: JetFrame, rows: Iterable[Mapping[int, object]], label: str = "") -> OperatorHandle:
    """Wrap explicit rows; their order fixes the target basis."""
    kept = []
    for row in rows:
        clean = {}
        for c, v in row.items():
            if not 0 <= c < frame.dim:
                raise CoordinateOutOfFrameError(f"column {c} outside {frame}")
            if v:
                clean[c] = Fraction(v)
        kept.append(clean)
    return OperatorHandle(frame, tuple(kept), label)


def prolonged_operator_rows(D: OperatorHandle, r: int) -> tuple[JetFrame, list[SparseRow]]:
    """
    Rows of the prolonged map J_{q+r}(E) -> J_r(F0).

    Returns:
        (J_{q+r}(E), rows) with one row per coordinate (tau, nu) of J_r(F0),
        in that frame's order.
    """
    if r < 0:
        raise ValueError("prolongation order must be non-negative")
    big = D.source.raised(D.order + r)
    target = JetFrame(D.n, D.target_dim, r)
    rows = [shifted_row(D.rows[tau], D.source, big, nu) for tau, nu in target.coordinates]
    return big, rows


def _add_into(acc: dict[int, Fraction], row: Mapping[int, Fraction], factor: Fraction):
    for c, v in row.items():
        w = acc.get(c, Fraction(0)) + factor * v
        if w:
            acc[c] = w
        else:
            acc.pop(c, None)


def compose(D1: OperatorHandle, D: OperatorHandle, label: str = "") -> OperatorHandle:
    """
    The composite D1 o D over J_{q + q1}(E).

    Raises:
        ValueError: If D1 does not act on the target of D.
    """
    if D1.source_dim != D.target_dim or D1.n != D.n:
        raise ValueError(f"cannot compose {D1!r} after {D!r}")
    big = D.source.raised(D.order + D1.order)
    coords = D1.source.coordinates
    rows = []
    for row in D1.rows:
        acc: dict[int, Fraction] = {}
        for c, v in row.items():
            tau, lam = coords[c]
            _add_into(acc, shifted_row(D.rows[tau], D.source, big, lam), v)
        rows.append(acc)
    return OperatorHandle(big, tuple(rows), label or f"{D1.label or 'D1'} o {D.label or 'D'}")


def identity_operator(n: int, m: int) -> OperatorHandle:
    frame = JetFrame(n, m, 0)
    return OperatorHandle(frame, tuple({k: Fraction(1)} for k in range(m)), "id")


# ============================================================================
# COMPATIBILITY CONDITIONS
# ============================================================================

@dataclass(frozen=True, eq=False)
class CompatibilityConditions:
    """New generating CC found at one order, as rows over J_r(F0)."""
    order: int
    frame: JetFrame
    rows: tuple[SparseRow, ...]
    cokernel_dim: int
    known_rank: int

    @property
    def count(self) -> int:
        return len(self.rows)


def _check_cancel(cancel_event: threading.Event | None):
    if cancel_event is not None and cancel_event.is_set():
        raise OperationCancelled("computation cancelled")


def _prolonged_conditions(known: Sequence[CompatibilityConditions], target: JetFrame) -> list[SparseRow]:
    rows = []
    for cc in known:
        if cc.order > target.q:
            continue
        shifts = [nu for d in range(target.q - cc.order + 1) for nu in multi_indices(target.n, d)]
        for row in cc.rows:
            rows.extend(shifted_row(row, cc.frame, target, nu) for nu in shifts)
    return rows


def cc_at_order(D: OperatorHandle, r: int, known: Sequence[CompatibilityConditions] = (),
                settings: EngineSettings | None = None) -> CompatibilityConditions:
    """
    Generating CC of D at order r, modulo prolongations of ``known``.

    Args:
        D: The operator.
        r: CC order, at least 1.
        known: Conditions found at lower orders.

    Returns:
        The new conditions in rref over J_r(F0); ``cokernel_dim`` counts every
        relation at order r, old and new.
    """
    if r < 1:
        raise ValueError("CC order must be at least 1")
    target = JetFrame(D.n, D.target_dim, r)
    _, rows = prolonged_operator_rows(D, r)
    relations = left_kernel_rows(rows)
    consequences = _prolonged_conditions(known, target)
    base = sparse_rref(consequences)
    base_pivots = {p for p, _ in base}
    full = sparse_rref(consequences + relations)
    if len(full) != len(relations):
        raise ConsistencyError("prolonged conditions fall outside the cokernel")
    new = tuple(row for p, row in full if p not in base_pivots)
    logger.debug(f"CC order {r}: cokernel {len(relations)}, known span {len(base)}, new {len(new)}")
    return CompatibilityConditions(r, target, new, len(relations), len(base))


def cc_order_bound(D: OperatorHandle, budget: int = RESOLUTION_BUDGET, fi_bound: int | None = None,
                   settings: EngineSettings | None = None) -> int:
    """
    Predicted order s + 1 of the generating CC, s the first level with a 2-acyclic symbol.

    ``fi_bound`` defaults to ``settings.fi_bound``.

    Raises:
        NotFormallyIntegrableError: If the kernel is not formally integrable.
        BudgetExhaustedError: If no 2-acyclic level appears within ``budget``.
    """
    settings = settings or default_settings()
    S = D.system
    verdict = is_formally_integrable(S, settings.fi_bound if fi_bound is None else fi_bound, settings)
    if not verdict.holds:
        raise NotFormallyIntegrableError(
            f"kernel of {D!r} is not formally integrable ({verdict.describe()}); "
            "complete it first with `complete`"
        )
    degree = min(2, S.n)
    for s in range(budget + 1):
        if is_s_acyclic(S, degree, ACYCLICITY_BOUND, start_level=S.order + s, settings=settings).holds:
            return s + 1
    raise BudgetExhaustedError(f"no {degree}-acyclic symbol within {budget} prolongations")


@dataclass(frozen=True, eq=False)
class GeneratorScan:
    conditions: tuple[CompatibilityConditions, ...]
    limit: int | None
    scanned_to: int
    exhausted: bool

    @property
    def count(self) -> int:
        return sum(cc.count for cc in self.conditions)

    @property
    def order(self) -> int:
        return max((cc.order for cc in self.conditions), default=0)


def generating_conditions(D: OperatorHandle, budget: int = RESOLUTION_BUDGET, limit: int | None = None,
                          cancel_event: threading.Event | None = None,
                          settings: EngineSettings | None = None) -> GeneratorScan:
    """
    Collect generating CC order by order.

    With a ``limit`` (from ``cc_order_bound``) every order up to it is scanned.
    Without one, the scan stops after ``RESOLUTION_LOOKAHEAD`` empty orders, or
    after one empty order once something was found.
    """
    found: list[CompatibilityConditions] = []
    empty = 0
    r = 0
    for r in range(1, budget + 1):
        _check_cancel(cancel_event)
        if limit is not None and r > limit:
            return GeneratorScan(tuple(found), limit, r - 1, False)
        cc = cc_at_order(D, r, found, settings)
        if cc.count:
            found.append(cc)
            empty = 0
        else:
            empty += 1
        if limit is None and empty >= (1 if found else RESOLUTION_LOOKAHEAD):
            return GeneratorScan(tuple(found), None, r, False)
    return GeneratorScan(tuple(found), limit, r, limit is None or limit > budget)


def operator_from_conditions(conditions: Sequence[CompatibilityConditions], label: str = "") -> OperatorHandle:
    """Stack CC of several orders into one operator over the highest-order frame."""
    top = max(conditions, key=lambda cc: cc.order).frame
    rows = []
    for cc in sorted(conditions, key=lambda cc: cc.order):
        offset = cc.frame.offset_into(top)
        rows.extend({c + offset: v for c, v in row.items()} for row in cc.rows)
    return OperatorHandle(top, tuple(rows), label)


def complete_operator(conditions: Sequence[CompatibilityConditions], label: str = "",
                      settings: EngineSettings | None = None) -> OperatorHandle:
    """
    The CC operator written as a system at its top order.

    Lower-order conditions are prolonged to the top order, so the target is the
    whole CC space there rather than the generating count. A kernel that still
    fails formal integrability is completed by prolongation-projection at the
    same order; kernels on more than ``KERNEL_CHECK_LIMIT`` coordinates are not
    checked.

    Raises:
        BudgetExhaustedError: If projection does not settle within ``COMPLETION_MAX_STEPS``.
    """
    settings = settings or default_settings()
    top = max(conditions, key=lambda cc: cc.order).frame
    rows = tuple(row for _, row in sparse_rref(_prolonged_conditions(conditions, top)))
    D = OperatorHandle(top, rows, label)
    if top.dim > KERNEL_CHECK_LIMIT:
        return D
    S = D.system
    for _ in range(COMPLETION_MAX_STEPS):
        verdict = is_formally_integrable(S, RESOLUTION_FI_BOUND, settings)
        if verdict.holds:
            if S is not D.system:
                logger.info(f"Completed {D!r} to {S.rank} equations")
                return operator_from_system(S, label)
            return D
        S = project(prolong(S, verdict.failing_level - S.order + 1), S.order)
    raise BudgetExhaustedError(f"kernel of {D!r} not formally integrable after {COMPLETION_MAX_STEPS} projections")


# ============================================================================
# RESOLUTIONS
# ============================================================================

@dataclass(frozen=True)
class ResolutionStep:
    """One CC operator: generating count before completion, target after it."""
    source_dim: int
    raw_dim: int
    target_dim: int
    order: int
    kernel_fi: bool | None = None
    scan_limit: int | None = None


@dataclass(frozen=True)
class SequenceReport:
    """
    Bundle dimensions dim E, F0, F1, ... and the orders of the operators between them.

    The Euler-Poincare sum starts at -dim E.
    """
    bundles: tuple[int, ...]
    orders: tuple[int, ...]
    steps: tuple[ResolutionStep, ...] = ()
    complete: bool = True
    message: str = ""
    notes: tuple[str, ...] = ()
    operators: tuple[OperatorHandle, ...] = field(default=(), compare=False)

    @property
    def euler_poincare(self) -> int:
        return euler_poincare(self)

    def chain(self) -> str:
        parts = [str(self.bundles[0])]
        for order, dim in zip(self.orders, self.bundles[1:]):
            parts.append(f"-{order}-> {dim}")
        return " ".join(parts)


def alternating_sum(values: Sequence[int], start_sign: int = -1) -> int:
    total, sign = 0, start_sign
    for v in values:
        total += sign * v
        sign = -sign
    return total


def euler_poincare(report: SequenceReport | Sequence[int]) -> int:
    """Alternating sum -dim E + dim F0 - dim F1 + ..."""
    bundles = report.bundles if isinstance(report, SequenceReport) else report
    return alternating_sum(bundles, -1)


def _kernel_diagnostics(D: OperatorHandle, budget: int,
                        settings: EngineSettings) -> tuple[bool | None, int | None]:
    """(kernel FI, scan limit) for kernels small enough to check."""
    if D.source.dim > KERNEL_CHECK_LIMIT:
        return None, None
    if not is_formally_integrable(D.system, RESOLUTION_FI_BOUND, settings).holds:
        return False, None
    try:
        return True, cc_order_bound(D, budget, RESOLUTION_FI_BOUND, settings)
    except JetKitError as e:
        logger.debug(f"No CC order bound for {D!r}: {e}")
        return True, None


def resolution(D: OperatorHandle, budget: int = RESOLUTION_BUDGET, max_steps: int = RESOLUTION_MAX_STEPS,
               cancel_event: threading.Event | None = None,
               settings: EngineSettings | None = None) -> SequenceReport:
    """
    Chain generating CC operators D, D1, D2, ... until a zero bundle.

    Each new operator is rewritten by ``complete_operator`` before its own CC
    are sought, so the bundles are the completed targets; ``steps`` keeps the
    generating count next to them.

    Args:
        D: The first operator.
        budget: Highest CC order scanned for each operator.
        max_steps: Most operators built after D.
        cancel_event: Checked between CC orders; setting it raises OperationCancelled.

    Returns:
        The report; ``complete`` is False when ``max_steps`` or ``budget`` ran out.
    """
    settings = settings or default_settings()
    bundles = [D.source_dim, D.target_dim]
    orders = [D.order]
    steps: list[ResolutionStep] = []
    operators = [D]
    notes: list[str] = []
    current, raw_dim = D, D.target_dim

    def report(complete: bool, message: str) -> SequenceReport:
        return SequenceReport(tuple(bundles), tuple(orders), tuple(steps), complete, message,
                              tuple(notes), tuple(operators))

    for _ in range(max_steps):
        _check_cancel(cancel_event)
        fi, limit = _kernel_diagnostics(current, budget, settings)
        steps.append(ResolutionStep(current.source_dim, raw_dim, current.target_dim, current.order, fi, limit))
        if fi is False:
            notes.append(f"kernel of operator {len(steps)} is not formally integrable")
        scan = generating_conditions(current, budget, limit, cancel_event, settings)
        if scan.exhausted and scan.count == 0:
            return report(False, f"no CC found up to order {budget}; budget may be too small")
        if scan.count == 0:
            logger.info(f"Resolution ends: {current.target_dim} has no compatibility conditions")
            return report(True, "resolution complete")
        raw_dim = scan.count
        current = complete_operator(scan.conditions, f"D{len(operators)}", settings)
        if current.target_dim != raw_dim:
            notes.append(f"operator {len(operators) + 1}: {raw_dim} generating CC, "
                         f"{current.target_dim} after completion at order {current.order}")
        operators.append(current)
        bundles.append(current.target_dim)
        orders.append(current.order)
        logger.info(f"Resolution: {current.target_dim} CC of order {current.order} ({raw_dim} generating)")
    steps.append(ResolutionStep(current.source_dim, raw_dim, current.target_dim, current.order))
    return report(False, f"stopped after {max_steps} operators")


# ============================================================================
# EXACTNESS CHECKS
# ============================================================================

@dataclass(frozen=True)
class SlotDefect:
    dim: int
    rank_in: int
    rank_out: int

    @property
    def defect(self) -> int:
        return self.dim - self.rank_in - self.rank_out


@dataclass(frozen=True)
class ExactnessReport:
    kernel_dim: int
    top_dim: int
    slots: tuple[SlotDefect, ...]

    @property
    def defects(self) -> tuple[int, ...]:
        return tuple(slot.defect for slot in self.slots)

    @property
    def exact(self) -> bool:
        return not any(self.defects)

    @property
    def alternating_sum(self) -> int:
        return self.kernel_dim + alternating_sum([self.top_dim] + [s.dim for s in self.slots], -1)


def _check_chain(chain: Sequence[OperatorHandle]):
    if not chain:
        raise ValueError("empty operator chain")
    for D, D1 in zip(chain, chain[1:]):
        if D1.source_dim != D.target_dim or D1.n != D.n:
            raise ValueError(f"{D1!r} does not act on the target of {D!r}")


def _exactness(dims: list[int], ranks: list[int]) -> ExactnessReport:
    slots = []
    for k in range(1, len(dims)):
        rank_out = ranks[k] if k < len(ranks) else 0
        slots.append(SlotDefect(dims[k], ranks[k - 1], rank_out))
    return ExactnessReport(dims[0] - ranks[0], dims[0], tuple(slots))


def check_jet_exactness(chain: Sequence[OperatorHandle], r: int,
                        settings: EngineSettings | None = None) -> ExactnessReport:
    """
    Ranks in 0 -> R_N -> J_N(E) -> J_{N-q0}(F0) -> ... with N = r + total order.

    The last slot is J_r of the last target bundle.
    """
    _check_chain(chain)
    settings = settings or default_settings()
    level = r + sum(D.order for D in chain)
    dims, ranks = [dim_jet(chain[0].n, chain[0].source_dim, level)], []
    for D in chain:
        level -= D.order
        big, rows = prolonged_operator_rows(D, level)
        ranks.append(rank_of_rows(rows, big.dim, settings))
        dims.append(dim_jet(D.n, D.target_dim, level))
    return _exactness(dims, ranks)


def _symbol_operator_rows(D: OperatorHandle, level: int) -> tuple[int, list[SparseRow]]:
    """sigma(D) on S_{q+level}(E) -> S_level(F0), rows over SymbolFrame."""
    source = SymbolFrame(D.n, D.source_dim, D.order + level)
    top = D.source.degree_block(D.order)
    big = JetFrame(D.n, D.source_dim, D.order + level)
    coords = D.source.coordinates
    rows = []
    for nu in multi_indices(D.n, level):
        for tau in range(D.target_dim):
            rows.append({
                big.index(JetCoordinate(coords[c].unknown, coords[c].index.shift(nu))): v
                for c, v in D.rows[tau].items() if c in top
            })
    return source.dim, rows


def check_symbol_exactness(chain: Sequence[OperatorHandle], degree: int,
                           settings: EngineSettings | None = None) -> ExactnessReport:
    """
    The top-degree analogue of ``check_jet_exactness`` starting at S_degree(E).

    The kernel slot is the symbol of the first operator at ``degree``.
    """
    _check_chain(chain)
    settings = settings or default_settings()
    level = degree
    if level < sum(D.order for D in chain):
        raise ValueError(f"degree {degree} is below the total order of the chain")
    dims: list[int] = []
    ranks: list[int] = []
    for D in chain:
        level -= D.order
        cols, rows = _symbol_operator_rows(D, level)
        if not dims:
            dims.append(cols)
        ranks.append(rank_of_rows(rows, cols, settings))
        dims.append(SymbolFrame(D.n, D.target_dim, level).dim)
    return _exactness(dims, ranks)


# ============================================================================
# LEFT INVERSES
# ============================================================================

@dataclass(frozen=True, eq=False)
class LeftInverse:
    """L : F0 -> E with L o D = id, rows over J_order(F0)."""
    operator: OperatorHandle

    @property
    def order(self) -> int:
        return self.operator.order


def _reduce(vector: Mapping[int, Fraction], basis: Sequence[tuple[int, SparseRow]]) -> dict[int, Fraction]:
    out = dict(vector)
    for p, row in basis:
        factor = out.get(p)
        if factor:
            _add_into(out, row, -factor)
    return out


def left_inverse(D: OperatorHandle, budget: int = LEFT_INVERSE_BUDGET) -> LeftInverse | None:
    """
    The lowest-order L with L o D = id, reduced modulo the CC of that order.

    Returns:
        None when no order up to ``budget`` admits a left inverse.
    """
    for r in range(budget + 1):
        big, rows = prolonged_operator_rows(D, r)
        # tag columns follow the jet columns, so pure relations get tag pivots
        augmented = []
        for i, row in enumerate(rows):
            tagged = dict(row)
            tagged[big.dim + i] = Fraction(1)
            augmented.append(tagged)
        reduced = sparse_rref(augmented)
        inverse_rows = []
        for k in range(D.source_dim):
            unit = {big.index(JetCoordinate(k, MultiIndex.zero(D.n))): Fraction(1)}
            residue = _reduce(unit, reduced)
            if any(c < big.dim for c in residue):
                break
            inverse_rows.append({c - big.dim: -v for c, v in residue.items()})
        else:
            frame = JetFrame(D.n, D.target_dim, r)
            logger.debug(f"Left inverse of order {r} found for {D!r}")
            return LeftInverse(OperatorHandle(frame, tuple(inverse_rows), f"left_inverse({D.label or 'D'})"))
    return None


def cc_by_substitution(D: OperatorHandle, inverse: LeftInverse | None = None) -> OperatorHandle:
    """
    D o L - id: one CC per component of F0 from a left inverse L.

    Raises:
        BudgetExhaustedError: If D has no left inverse within the default budget.
    """
    inverse = inverse or left_inverse(D)
    if inverse is None:
        raise BudgetExhaustedError(f"{D!r} has no left inverse within {LEFT_INVERSE_BUDGET} orders")
    composite = compose(D, inverse.operator)
    frame = composite.source
    rows = []
    for tau, row in enumerate(composite.rows):
        row = dict(row)
        _add_into(row, {frame.index(JetCoordinate(tau, MultiIndex.zero(D.n))): Fraction(1)}, Fraction(-1))
        rows.append(row)
    return OperatorHandle(frame, tuple(rows), f"cc_by_substitution({D.label or 'D'})")


# ============================================================================
# JANET TABULAR
# ============================================================================

@dataclass(frozen=True)
class TabularRow:
    order: int
    cls: int | None  # None marks lower-order overflow rows
    count: int
    n: int

    @property
    def multiplicative(self) -> tuple[int, ...]:
        return tuple(range(1, self.cls + 1)) if self.cls else ()

    @property
    def dots(self) -> int:
        return self.n - len(self.multiplicative)

    def board(self) -> str:
        return " ".join(str(i) if i <= (self.cls or 0) else "•" for i in range(1, self.n + 1))


@dataclass(frozen=True)
class JanetTabular:
    n: int
    order: int
    rows: tuple[TabularRow, ...]

    @property
    def total(self) -> int:
        return sum(row.count for row in self.rows)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(row.count for row in self.rows)


def janet_tabular(S: LinearJetSystem, seed: int = 0, settings: EngineSettings | None = None) -> JanetTabular:
    """
    Group the leading jets of an involutive system by order and class.

    Raises:
        NotInvolutiveError: If the Cartan test does not certify involutivity.
    """
    settings = settings or default_settings()
    report = cartan_test(S, seed=seed, settings=settings)
    if not report.involutive:
        raise NotInvolutiveError(f"Janet tabular needs an involutive system; Cartan test says {report.verdict}")
    system = report.system or S
    coords = system.frame.coordinates
    counts: Counter = Counter()
    for pivot in system.pivots:
        mu = coords[pivot].index
        if mu.degree == system.order:
            counts[(system.order, class_of(mu))] += 1
        else:
            counts[(mu.degree, None)] += 1
    keys = sorted(counts, key=lambda k: (-k[0], -(k[1] or 0)))
    rows = tuple(TabularRow(order, cls, counts[(order, cls)], system.n) for order, cls in keys)
    return JanetTabular(system.n, system.order, rows)


def janet_bundles_by_dots(T: JanetTabular, n: int | None = None) -> list[int]:
    """F_1..F_n with F_k the number of k-subsets of dots, summed over rows."""
    n = n or T.n
    return [sum(row.count * comb(row.dots, k) for row in T.rows) for k in range(1, n + 1)]


# ============================================================================
# SPENCER / HYBRID / JANET ROWS
# ============================================================================

def _require_involutive(S: LinearJetSystem, settings: EngineSettings):
    verdict = is_involutive(S, settings=settings)
    if not verdict.holds:
        raise NotInvolutiveError(f"{S!r} is not involutive: {verdict.describe()}")


def spencer_bundles(S: LinearJetSystem, settings: EngineSettings | None = None) -> list[int]:
    """C_r = C(n, r) dim R_q - rank delta(Lambda^{r-1} (x) g_{q+1}) for r = 0..n."""
    settings = settings or default_settings()
    _require_involutive(S, settings)
    g_next = symbol_at(S, S.order + 1)
    dims = [comb(S.n, r) * S.solution_dim - (delta_rank(g_next, r - 1, settings) if r else 0)
            for r in range(S.n + 1)]
    if g_next.dim == 0 and dims != [comb(S.n, r) * S.solution_dim for r in range(S.n + 1)]:
        raise ConsistencyError("Spencer bundles disagree with the finite type formula")
    return dims


def _full_symbol(n: int, m: int, level: int) -> SymbolSpace:
    frame = SymbolFrame(n, m, level)
    return SymbolSpace(frame, RationalMatrix.identity(frame.dim))


def hybrid_bundles(n: int, m: int, q: int, settings: EngineSettings | None = None) -> list[int]:
    """C_r(E) = C(n, r) dim J_q(E) - rank delta(Lambda^{r-1} (x) S_{q+1} (x) E)."""
    settings = settings or default_settings()
    full = _full_symbol(n, m, q + 1)
    jets = dim_jet(n, m, q)
    return [comb(n, r) * jets - (delta_rank(full, r - 1, settings) if r else 0) for r in range(n + 1)]


@dataclass(frozen=True)
class HybridSlot:
    next_jets: int
    first_jets: int
    quotient: int


def hybrid_first_slot(n: int, m: int, q: int, settings: EngineSettings | None = None) -> HybridSlot:
    """
    Rank-check 0 -> J_{q+1}(E) -> J_1(J_q(E)) -> C_1(E) -> 0.

    Raises:
        ConsistencyError: If the embedding rank or the quotient disagrees.
    """
    settings = settings or default_settings()
    small = JetFrame(n, m, q)
    big = small.raised(q + 1)
    rows = []
    for coord in small.coordinates:
        rows.append({big.index(coord): Fraction(1)})
        for i in range(1, n + 1):
            rows.append({big.index(JetCoordinate(coord.unknown, coord.index.add(i))): Fraction(1)})
    first_jets = len(rows)
    embedded = rank_of_rows(rows, big.dim, settings)
    quotient = first_jets - embedded
    if embedded != big.dim or quotient != hybrid_bundles(n, m, q, settings)[1]:
        raise ConsistencyError(f"first hybrid slot fails: rank {embedded}, quotient {quotient}")
    return HybridSlot(big.dim, first_jets, quotient)


@dataclass(frozen=True)
class DiagramReport:
    n: int
    source_dim: int
    solution_dim: int
    spencer: tuple[int, ...]
    hybrid: tuple[int, ...]
    janet: tuple[int, ...]
    janet_by_dots: tuple[int, ...]
    tabular: JanetTabular | None = None

    @property
    def janet_euler_poincare(self) -> int:
        return alternating_sum((self.source_dim,) + self.janet, -1)

    @property
    def hybrid_euler_poincare(self) -> int:
        return alternating_sum((self.source_dim,) + self.hybrid, -1)

    @property
    def spencer_euler_poincare(self) -> int:
        return alternating_sum(self.spencer, 1)


def fundamental_diagram(S: LinearJetSystem, seed: int = 0,
                        settings: EngineSettings | None = None) -> DiagramReport:
    """
    Spencer, hybrid and Janet rows of an involutive system.

    Raises:
        NotInvolutiveError: If S is not involutive.
        ConsistencyError: If a column fails F_r = C_r(E) - C_r or the dot count.
    """
    settings = settings or default_settings()
    spencer = spencer_bundles(S, settings)
    hybrid = hybrid_bundles(S.n, S.m, S.order, settings)
    janet = [h - c for h, c in zip(hybrid, spencer)]
    tabular = janet_tabular(S, seed, settings)
    by_dots = [tabular.total] + janet_bundles_by_dots(tabular, S.n)
    if janet[0] != S.rank:
        raise ConsistencyError(f"F0 = {janet[0]} but the system has {S.rank} equations")
    if janet != by_dots:
        raise ConsistencyError(f"Janet row {janet} disagrees with dot counting {by_dots}")
    return DiagramReport(S.n, S.m, S.solution_dim, tuple(spencer), tuple(hybrid), tuple(janet),
                         tuple(by_dots), tabular)


# ============================================================================
# SPENCER FORM
# ============================================================================

def spencer_form(S: LinearJetSystem) -> LinearJetSystem:
    """
    First-order system for z = parametric jets of R_q: d_i z = (R_{q+1} in terms of z).

    Raises:
        NotFormallyIntegrableError: If R_{q+1} does not project onto R_q.
        NotInvolutiveError: If g_{q+1} is not zero.
    """
    params = parametric_jets(S)
    higher = prolong(S, 1)
    offset = S.frame.offset_into(higher.frame)
    param_cols = {higher.frame.index(c): i for i, c in enumerate(params)}
    pivots = set(higher.pivots)
    free = {c for c in range(higher.frame.dim) if c not in pivots}
    if any(c < offset for c in free):
        raise NotInvolutiveError(f"spencer form needs g_{S.order + 1} = 0")
    if free != set(param_cols):
        raise NotFormallyIntegrableError(f"R_{S.order + 1} does not project onto R_{S.order}")

    values: dict[int, dict[int, Fraction]] = {c: {i: Fraction(1)} for c, i in param_cols.items()}
    for pivot, row in zip(higher.pivots, higher.rows):
        values[pivot] = {param_cols[c]: -v for c, v in row.items() if c != pivot}

    d = len(params)
    frame = JetFrame(S.n, d, 1)
    rows = []
    for z, (k, mu) in enumerate(params):
        for i in range(1, S.n + 1):
            target = higher.frame.index(JetCoordinate(k, mu.add(i)))
            row = {frame.index(JetCoordinate(z, MultiIndex.zero(S.n).add(i))): Fraction(1)}
            for w, v in values[target].items():
                _add_into(row, {frame.index(JetCoordinate(w, MultiIndex.zero(S.n))): Fraction(1)}, -v)
            rows.append(row)
    return system_from_rows(frame, rows, f"spencer_form({S.label or 'R'})")


__all__ = [
    "OperatorHandle",
    "operator_from_system",
    "operator_from_rows",
    "prolonged_operator_rows",
    "compose",
    "identity_operator",
    "CompatibilityConditions",
    "cc_at_order",
    "cc_order_bound",
    "GeneratorScan",
    "generating_conditions",
    "operator_from_conditions",
    "complete_operator",
    "ResolutionStep",
    "SequenceReport",
    "alternating_sum",
    "euler_poincare",
    "resolution",
    "SlotDefect",
    "ExactnessReport",
    "check_jet_exactness",
    "check_symbol_exactness",
    "LeftInverse",
    "left_inverse",
    "cc_by_substitution",
    "TabularRow",
    "JanetTabular",
    "janet_tabular",
    "janet_bundles_by_dots",
    "spencer_bundles",
    "hybrid_bundles",
    "HybridSlot",
    "hybrid_first_slot",
    "DiagramReport",
    "fundamental_diagram",
    "spencer_form",
]
