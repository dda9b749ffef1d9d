"""
Spencer delta-cohomology of symbols.

delta acts on v in Lambda^s T* (x) S_d T* (x) E by
    (delta v)^k_{nu, J} = sum_{j in J} (-1)^{pos(j, J)} v^k_{nu + 1_j, J - {j}}
with exterior indices J strictly increasing and ordered lexicographically.
Ranks are taken in the ambient codomain Lambda^{s+1} (x) S_{d-1} (x) E, which
contains the image of the symbol.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from config import (
    ACYCLICITY_BOUND,
    REGULARITY_ENTRY_BOUND,
    REGULARITY_RETRIES,
    EngineSettings,
    default_settings,
)
from core.exactalg import RationalMatrix, SparseRow, determinant, rank_of_rows
from core.jetspace import JetCoordinate, JetFrame, class_of, dim_symbol, exterior_basis
from core.system import (
    LinearJetSystem,
    SymbolSpace,
    change_coordinates,
    symbol_at,
    symbol_dimension,
)
from utils.logger import logger

INVOLUTIVE = "involutive"
NOT_INVOLUTIVE = "not involutive"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class DeltaSlot:
    level: int
    s: int
    dim: int
    rank_out: int
    rank_in: int

    @property
    def cohomology(self) -> int:
        return self.dim - self.rank_out - self.rank_in


@dataclass(frozen=True)
class DeltaComplexReport:
    order: int
    slots: tuple[DeltaSlot, ...]

    def get(self, level: int, s: int) -> DeltaSlot:
        for slot in self.slots:
            if slot.level == level and slot.s == s:
                return slot
        raise KeyError((level, s))


@dataclass(frozen=True)
class AcyclicityVerdict:
    holds: bool
    s: int
    start_level: int
    bound: int
    certified: bool
    failing: tuple[int, int] | None = None  # (level, degree of H)
    zero_level: int | None = None

    def describe(self) -> str:
        scope = "certified (finite type)" if self.certified else f"checked to level {self.start_level + self.bound}"
        if self.holds:
            return f"{self.s}-acyclic from level {self.start_level}, {scope}"
        level, degree = self.failing
        return f"not {self.s}-acyclic: H^{degree} at level {level} is nonzero"


@dataclass(frozen=True)
class CartanReport:
    characters: tuple[int, ...]
    verdict: str
    next_symbol_dim: int
    cartan_sum: int
    coordinate_change: RationalMatrix | None = None
    system: LinearJetSystem | None = field(default=None, compare=False)

    @property
    def involutive(self) -> bool:
        return self.verdict == INVOLUTIVE


# ============================================================================
# DELTA MAPS
# ============================================================================

def _delta_image(n: int, m: int, d: int, I: tuple[int, ...], vector: SparseRow) -> SparseRow:
    """delta(dx^I (x) v) for v in S_d (x) E given over SymbolFrame(n, m, d)."""
    if d == 0:
        return {}
    source = JetFrame(n, m, d).coordinates
    target = JetFrame(n, m, d - 1)
    target_dim = dim_symbol(n, m, d - 1)
    J_index = {J: i for i, J in enumerate(exterior_basis(n, len(I) + 1))}
    out: SparseRow = {}
    for col, value in vector.items():
        k, mu = source[col]
        for j in range(n):
            if not mu[j] or j in I:
                continue
            J = tuple(sorted(I + (j,)))
            sign = -1 if J.index(j) % 2 else 1
            nu = list(mu)
            nu[j] -= 1
            row = J_index[J] * target_dim + target.index(JetCoordinate(k, tuple(nu)))
            w = out.get(row, Fraction(0)) + sign * value
            if w:
                out[row] = w
            else:
                out.pop(row, None)
    return out


def _domain_images(g: SymbolSpace, s: int) -> list[SparseRow]:
    n, m, d = g.frame.n, g.frame.m, g.frame.q
    columns = [{i: v for i, v in enumerate(g.basis.column(j)) if v} for j in range(g.dim)]
    return [_delta_image(n, m, d, I, vec) for I in exterior_basis(n, s) for vec in columns]


def ambient_delta_matrix(n: int, m: int, d: int, s: int) -> RationalMatrix:
    """delta : Lambda^s (x) S_d (x) E -> Lambda^{s+1} (x) S_{d-1} (x) E on full spaces."""
    rows = comb(n, s + 1) * dim_symbol(n, m, d - 1) if d >= 1 else 0
    images = []
    for I in exterior_basis(n, s):
        for col in range(dim_symbol(n, m, d)):
            images.append(_delta_image(n, m, d, I, {col: Fraction(1)}))
    return RationalMatrix.from_sparse(images, rows).transpose() if images \
        else RationalMatrix(rows, 0)


def delta_matrix(g: SymbolSpace, s: int) -> RationalMatrix:
    """
    delta restricted to Lambda^s T* (x) g, one column per (exterior index, basis vector).

    Rows use the ambient codomain coordinates, so composing with
    ``ambient_delta_matrix(n, m, level - 1, s + 1)`` must give zero.
    """
    n, m, d = g.frame.n, g.frame.m, g.frame.q
    rows = comb(n, s + 1) * dim_symbol(n, m, d - 1) if d >= 1 else 0
    images = _domain_images(g, s)
    if not images:
        return RationalMatrix(rows, 0)
    return RationalMatrix.from_sparse(images, rows).transpose()


def delta_rank(g: SymbolSpace, s: int, settings: EngineSettings | None = None) -> int:
    """Rank of delta on Lambda^s (x) g."""
    if g.dim == 0 or s < 0 or s > g.frame.n:
        return 0
    n, m, d = g.frame.n, g.frame.m, g.frame.q
    cols = comb(n, s + 1) * dim_symbol(n, m, d - 1) if d >= 1 else 0
    if cols == 0:
        return 0
    return rank_of_rows(_domain_images(g, s), cols, settings or default_settings())


# ============================================================================
# COHOMOLOGY
# ============================================================================

class _SymbolCache:
    """Symbols of one system by level, computed on demand."""

    def __init__(self, S: LinearJetSystem):
        self.S = S
        self._spaces: dict[int, SymbolSpace] = {}

    def at(self, level: int) -> SymbolSpace:
        if level not in self._spaces:
            self._spaces[level] = symbol_at(self.S, level)
        return self._spaces[level]


def _slot(cache: _SymbolCache, level: int, s: int, settings: EngineSettings) -> DeltaSlot:
    g = cache.at(level)
    n = cache.S.n
    dim = comb(n, s) * g.dim if 0 <= s <= n else 0
    rank_out = delta_rank(g, s, settings)
    rank_in = delta_rank(cache.at(level + 1), s - 1, settings) if s >= 1 else 0
    return DeltaSlot(level, s, dim, rank_out, rank_in)


def cohomology(S: LinearJetSystem, r: int, s: int, settings: EngineSettings | None = None) -> int:
    """
    dim H^s_{q+r}(g_q): cohomology at Lambda^s T* (x) g_{q+r}.

    At r = 0 the outgoing map lands in the full S_{q-1} T* (x) E.
    """
    if r < 0 or s < 0:
        raise ValueError("r and s must be non-negative")
    settings = settings or default_settings()
    return _slot(_SymbolCache(S), S.order + r, s, settings).cohomology


def delta_complex_report(S: LinearJetSystem, r_max: int, settings: EngineSettings | None = None) -> DeltaComplexReport:
    settings = settings or default_settings()
    cache = _SymbolCache(S)
    slots = [
        _slot(cache, S.order + r, s, settings)
        for r in range(r_max + 1)
        for s in range(S.n + 1)
    ]
    return DeltaComplexReport(S.order, tuple(slots))


def is_s_acyclic(S: LinearJetSystem, s: int, bound: int = ACYCLICITY_BOUND,
                 start_level: int | None = None,
                 settings: EngineSettings | None = None) -> AcyclicityVerdict:
    """
    Check H^1..H^s vanish at levels start..start+bound.

    Args:
        S: Parent system; its symbol is prolonged as needed.
        s: Highest cohomology degree checked (s <= n).
        bound: Number of prolongation levels beyond ``start_level``.
        start_level: First level checked, default the order of S.

    Returns:
        The verdict; it is certified when a vanishing symbol level is reached,
        since every slot above it is zero.
    """
    if s > S.n:
        raise ValueError(f"s={s} exceeds n={S.n}")
    settings = settings or default_settings()
    start = S.order if start_level is None else start_level
    cache = _SymbolCache(S)
    level = start
    while level <= start + bound:
        if cache.at(level).dim == 0:
            return AcyclicityVerdict(True, s, start, bound, True, zero_level=level)
        for degree in range(1, s + 1):
            if _slot(cache, level, degree, settings).cohomology:
                return AcyclicityVerdict(False, s, start, bound, True, failing=(level, degree))
        level += 1
    zero = level if cache.at(level).dim == 0 else None
    return AcyclicityVerdict(True, s, start, bound, zero is not None, zero_level=zero)


def is_involutive(S: LinearJetSystem, bound: int = ACYCLICITY_BOUND,
                  settings: EngineSettings | None = None) -> AcyclicityVerdict:
    """Involutive symbol means n-acyclic at the order of S."""
    return is_s_acyclic(S, S.n, bound, settings=settings)


# ============================================================================
# CARTAN TEST
# ============================================================================

def characters(S: LinearJetSystem) -> tuple[int, ...]:
    """alpha^(1..n): parametric top-order jets counted by class."""
    top = S.frame.degree_block(S.order)
    pivots = set(S.pivots)
    counts = [0] * S.n
    if S.order == 0:
        return tuple(counts)
    for col in top:
        if col not in pivots:
            counts[class_of(S.frame.coordinates[col].index) - 1] += 1
    return tuple(counts)


def _cartan_equality(S: LinearJetSystem, settings: EngineSettings) -> tuple[tuple[int, ...], int, int]:
    alpha = characters(S)
    cartan_sum = sum((i + 1) * a for i, a in enumerate(alpha))
    return alpha, symbol_dimension(S, S.order + 1, settings), cartan_sum


def _random_unimodular(rng: random.Random, n: int, bound: int) -> RationalMatrix:
    while True:
        entries = [rng.randint(-bound, bound) for _ in range(n * n)]
        A = RationalMatrix(n, n, entries)
        if abs(determinant(A)) == 1:
            return A


@dataclass(frozen=True)
class RegularizationResult:
    change: RationalMatrix
    system: LinearJetSystem
    attempts: int
    success: bool


def random_regularizing_change(S: LinearJetSystem, seed: int = 0,
                               retries: int = REGULARITY_RETRIES,
                               settings: EngineSettings | None = None) -> RegularizationResult:
    """
    Search unimodular changes until Cartan's equality agrees with the delta verdict.

    The identity is tried first, so delta-regular input comes back unchanged.
    """
    settings = settings or default_settings()
    involutive = is_involutive(S, settings=settings).holds
    identity = RationalMatrix.identity(S.n)
    _, dim_next, cartan_sum = _cartan_equality(S, settings)
    if (dim_next == cartan_sum) == involutive:
        return RegularizationResult(identity, S, 0, True)
    rng = random.Random(seed)
    for attempt in range(1, retries + 1):
        A = _random_unimodular(rng, S.n, REGULARITY_ENTRY_BOUND)
        candidate = change_coordinates(S, A)
        _, dim_next, cartan_sum = _cartan_equality(candidate, settings)
        if (dim_next == cartan_sum) == involutive:
            logger.debug(f"Delta-regular coordinates found after {attempt} attempt(s)")
            return RegularizationResult(A, candidate, attempt, True)
    logger.warning(f"No delta-regular coordinates found in {retries} attempts")
    return RegularizationResult(identity, S, retries, False)


def cartan_test(S: LinearJetSystem, seed: int = 0, retries: int = REGULARITY_RETRIES,
                settings: EngineSettings | None = None) -> CartanReport:
    """
    Cartan's test dim g_{q+1} = sum_i i * alpha^(i), cross-checked by the delta route.

    Returns:
        A report whose verdict is indeterminate when the equality fails but the
        delta route says involutive and no regularizing change is found.
    """
    settings = settings or default_settings()
    alpha, dim_next, cartan_sum = _cartan_equality(S, settings)
    if dim_next == cartan_sum:
        return CartanReport(alpha, INVOLUTIVE, dim_next, cartan_sum, None, S)
    if not is_involutive(S, settings=settings).holds:
        return CartanReport(alpha, NOT_INVOLUTIVE, dim_next, cartan_sum, None, S)
    result = random_regularizing_change(S, seed, retries, settings)
    if not result.success:
        return CartanReport(alpha, INDETERMINATE, dim_next, cartan_sum, None, S)
    alpha, dim_next, cartan_sum = _cartan_equality(result.system, settings)
    return CartanReport(alpha, INVOLUTIVE, dim_next, cartan_sum, result.change, result.system)


def character_counts_match(S: LinearJetSystem) -> bool:
    """Sum of characters equals dim g_q."""
    top = dim_symbol(S.n, S.m, S.order)
    top_pivots = sum(1 for i in range(S.rank) if S.row_order(i) == S.order)
    return sum(characters(S)) == top - top_pivots


__all__ = [
    "INVOLUTIVE",
    "NOT_INVOLUTIVE",
    "INDETERMINATE",
    "DeltaSlot",
    "DeltaComplexReport",
    "AcyclicityVerdict",
    "CartanReport",
    "RegularizationResult",
    "ambient_delta_matrix",
    "delta_matrix",
    "delta_rank",
    "cohomology",
    "delta_complex_report",
    "is_s_acyclic",
    "is_involutive",
    "characters",
    "cartan_test",
    "random_regularizing_change",
    "character_counts_match",
]
