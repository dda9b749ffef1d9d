"""
Exact rational linear algebra for the JetKit engine.

Matrices are dense and immutable. Elimination runs fraction-free on
integer-scaled rows (Bareiss for plain ranks, a gcd-normalized sparse
echelon for rref and kernels). Large ranks can take a modular fast path
over word-size primes, certified by confirming primes.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

import numpy as np
from sympy import prevprime

from config import (
    DEFAULT_SEED,
    MODULAR_PRIME,
    MODULAR_RETRIES,
    EngineSettings,
    default_settings,
)
from core.errors import DimensionOverflowError
from utils.logger import logger

Rational = Fraction
SparseRow = dict[int, Fraction]

MAX_MATRIX_ENTRIES = 40_000_000
ZERO = Fraction(0)
ONE = Fraction(1)

EXACT = "exact"


@dataclass(frozen=True)
class Modular:
    """Rank over a prime field, confirmed by ``retries`` fresh primes."""
    prime: int = MODULAR_PRIME
    retries: int = MODULAR_RETRIES
    seed: int = DEFAULT_SEED


def _as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


# ============================================================================
# MATRIX TYPE
# ============================================================================

class RationalMatrix:
    """Dense row-major matrix over the rationals."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if rows * cols > MAX_MATRIX_ENTRIES:
            raise DimensionOverflowError(
                f"{rows}x{cols} matrix exceeds {MAX_MATRIX_ENTRIES} entries"
            )
        if entries is None:
            data = (ZERO,) * (rows * cols)
        else:
            data = tuple(_as_rational(x) for x in entries)
        if len(data) != rows * cols:
            raise ValueError(
                f"expected {rows * cols} entries for a {rows}x{cols} matrix, got {len(data)}"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", data)

    def __setattr__(self, name, value):
        raise AttributeError("RationalMatrix is immutable")

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RationalMatrix":
        rows = list(rows)
        width = cols if cols is not None else (len(rows[0]) if rows else 0)
        flat = []
        for row in rows:
            if len(row) != width:
                raise ValueError("ragged rows")
            flat.extend(row)
        return cls(len(rows), width, flat)

    @classmethod
    def from_sparse(cls, rows: Sequence[Mapping[int, object]], cols: int) -> "RationalMatrix":
        flat = [ZERO] * (len(rows) * cols)
        for i, row in enumerate(rows):
            base = i * cols
            for j, value in row.items():
                if not 0 <= j < cols:
                    raise IndexError(f"column {j} outside 0..{cols - 1}")
                flat[base + j] = _as_rational(value)
        return cls(len(rows), cols, flat)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.from_sparse([{i: ONE} for i in range(n)], n)

    # ------------------------------------------------------------------
    # Access
    # ------------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"({i}, {j}) outside {self.rows}x{self.cols}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[tuple[Fraction, ...]]:
        return [self.row(i) for i in range(self.rows)]

    def sparse_rows(self) -> list[SparseRow]:
        out = []
        for i in range(self.rows):
            out.append({j: v for j, v in enumerate(self.row(i)) if v})
        return out

    def is_zero(self) -> bool:
        return not any(self.entries)

    # ------------------------------------------------------------------
    # Algebra
    # ------------------------------------------------------------------

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            self.cols, self.rows,
            [self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)],
        )

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        right = other.sparse_rows()
        out = []
        for row in self.sparse_rows():
            acc: dict[int, Fraction] = {}
            for k, a in row.items():
                for j, b in right[k].items():
                    acc[j] = acc.get(j, ZERO) + a * b
            out.append(acc)
        return RationalMatrix.from_sparse(out, other.cols)

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.rows and other.rows and self.cols != other.cols:
            raise ValueError("column counts differ")
        cols = self.cols if self.rows else other.cols
        return RationalMatrix(self.rows + other.rows, cols, self.entries + other.entries)

    def select_rows(self, indices: Sequence[int]) -> "RationalMatrix":
        flat = []
        for i in indices:
            flat.extend(self.row(i))
        return RationalMatrix(len(indices), self.cols, flat)

    def select_columns(self, indices: Sequence[int]) -> "RationalMatrix":
        flat = [self.entries[i * self.cols + j] for i in range(self.rows) for j in indices]
        return RationalMatrix(self.rows, len(indices), flat)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(v) for v in self.row(i)) for i in range(min(self.rows, 6)))
        more = " ..." if self.rows > 6 else ""
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}{more}])"


# ============================================================================
# FRACTION-FREE ELIMINATION
# ============================================================================

def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for value in row.values():
        g = gcd(g, value)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def integer_row(row: Mapping[int, Fraction]) -> dict[int, int]:
    """Scale a rational sparse row to a primitive integer row."""
    values = [_as_rational(v) for v in row.values() if v]
    if not values:
        return {}
    scale = lcm(*(v.denominator for v in values))
    out = {}
    for c, v in row.items():
        v = _as_rational(v)
        if v:
            out[c] = v.numerator * (scale // v.denominator)
    return _primitive(out)


def _combine(row: dict[int, int], pivot_row: dict[int, int], col: int) -> dict[int, int]:
    a = row[col]
    b = pivot_row[col]
    g = gcd(a, b)
    fa, fb = b // g, a // g
    out = {c: v * fa for c, v in row.items()}
    for c, v in pivot_row.items():
        w = out.get(c, 0) - fb * v
        if w:
            out[c] = w
        else:
            out.pop(c, None)
    return _primitive(out)


def _echelon(rows: Iterable[dict[int, int]], position: Sequence[int] | None = None) -> dict[int, dict[int, int]]:
    """Incremental echelon basis keyed by leading column.

    ``position[c]`` ranks column ``c``; the leading column of a row is the
    nonzero column of smallest rank, so the pivot set is the greedy earliest
    independent column set in that order.
    """
    basis: dict[int, dict[int, int]] = {}
    key = position.__getitem__ if position is not None else None
    for row in rows:
        row = dict(row)
        while row:
            lead = min(row, key=key) if key else min(row)
            pivot_row = basis.get(lead)
            if pivot_row is None:
                basis[lead] = _primitive(row)
                break
            row = _combine(row, pivot_row, lead)
    return basis


def _reduce_basis(basis: dict[int, dict[int, int]], position: Sequence[int] | None) -> list[tuple[int, SparseRow]]:
    key = position.__getitem__ if position is not None else (lambda c: c)
    pivots = sorted(basis, key=key)
    reduced: dict[int, SparseRow] = {}
    for p in reversed(pivots):
        raw = basis[p]
        lead = Fraction(raw[p])
        row = {c: Fraction(v) / lead for c, v in raw.items()}
        for q in [c for c in row if c != p and c in reduced]:
            factor = row[q]
            for c, v in reduced[q].items():
                w = row.get(c, ZERO) - factor * v
                if w:
                    row[c] = w
                else:
                    row.pop(c, None)
        reduced[p] = row
    return [(p, reduced[p]) for p in pivots]


def sparse_rref(rows: Iterable[Mapping[int, object]], position: Sequence[int] | None = None) -> list[tuple[int, SparseRow]]:
    """Reduced row echelon form of sparse rational rows as (pivot, row) pairs."""
    basis = _echelon((integer_row(r) for r in rows), position)
    return _reduce_basis(basis, position)


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of a dense integer matrix by Bareiss fraction-free elimination."""
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    prev = 1
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if a[i][c]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        top = a[r]
        for i in range(r + 1, m):
            row = a[i]
            lead = row[c]
            for j in range(c + 1, n):
                row[j] = (top[c] * row[j] - lead * top[j]) // prev
            row[c] = 0
        prev = top[c]
        r += 1
        if r == m:
            break
    return r


def determinant(M: RationalMatrix) -> Fraction:
    """Exact determinant via Bareiss on the integer-scaled rows."""
    if M.rows != M.cols:
        raise ValueError("determinant needs a square matrix")
    n = M.rows
    scale = Fraction(1)
    a = []
    for row in M.to_rows():
        den = lcm(*(v.denominator for v in row)) if row else 1
        scale /= den
        a.append([v.numerator * (den // v.denominator) for v in row])
    sign = 1
    prev = 1
    for c in range(n):
        pivot = next((i for i in range(c, n) if a[i][c]), None)
        if pivot is None:
            return ZERO
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                a[i][j] = (a[c][c] * a[i][j] - a[i][c] * a[c][j]) // prev
            a[i][c] = 0
        prev = a[c][c]
    return sign * Fraction(a[n - 1][n - 1] if n else 1) * scale


# ============================================================================
# MODULAR FAST PATH
# ============================================================================

def fresh_primes(seed: int, count: int) -> list[int]:
    """Deterministic primes in (2^30, 2^31) for confirming modular ranks."""
    rng = random.Random(seed)
    return [prevprime(rng.randrange(2 ** 30 + 2, 2 ** 31)) for _ in range(count)]


def _rank_mod_prime(rows: Sequence[dict[int, int]], cols: int, prime: int) -> int:
    live = [r for r in rows if r]
    if not live or not cols:
        return 0
    a = np.zeros((len(live), cols), dtype=np.int64)
    for i, row in enumerate(live):
        for c, v in row.items():
            a[i, c] = v % prime
    m = a.shape[0]
    r = 0
    for c in range(cols):
        nonzero = np.nonzero(a[r:, c])[0]
        if nonzero.size == 0:
            continue
        pivot = r + int(nonzero[0])
        if pivot != r:
            a[[r, pivot], c:] = a[[pivot, r], c:]
        inv = pow(int(a[r, c]), -1, prime)
        a[r, c:] = (a[r, c:] * inv) % prime
        below = r + 1 + np.nonzero(a[r + 1:, c])[0]
        if below.size:
            factors = a[below, c]
            a[below, c:] = (a[below, c:] - np.outer(factors, a[r, c:]) % prime) % prime
        r += 1
        if r == m:
            break
    return r


def _modular_rank(int_rows: list[dict[int, int]], cols: int, mode: Modular) -> int:
    primes = [mode.prime] + fresh_primes(mode.seed, mode.retries)
    ranks = [_rank_mod_prime(int_rows, cols, p) for p in primes]
    if len(set(ranks)) > 1:
        logger.warning(f"Modular ranks disagreed across primes {ranks}; falling back to exact elimination")
        return len(_echelon(int_rows))
    return ranks[0]


# ============================================================================
# PUBLIC OPERATIONS
# ============================================================================

def rank(M: RationalMatrix, mode: str | Modular = EXACT) -> int:
    """
    Rank of M over the rationals.

    Args:
        M: Matrix to rank.
        mode: ``EXACT`` for Bareiss elimination or a ``Modular`` policy.

    Returns:
        The rank; the modular policy never overshoots the exact value.
    """
    int_rows = [integer_row(r) for r in M.sparse_rows()]
    if mode == EXACT:
        return len(_echelon(int_rows))
    return _modular_rank(int_rows, M.cols, mode)


def rank_of_rows(rows: Iterable[Mapping[int, object]], cols: int,
                 settings: EngineSettings | None = None) -> int:
    """Rank of sparse rows under the engine's exact/modular policy."""
    settings = settings or default_settings()
    int_rows = [r for r in (integer_row(row) for row in rows) if r]
    if not int_rows:
        return 0
    small = len(int_rows) < settings.exact_threshold and cols < settings.exact_threshold
    if settings.exact or small:
        if small and len(int_rows) * cols <= 4096:
            dense = [[row.get(c, 0) for c in range(cols)] for row in int_rows]
            return bareiss_rank(dense)
        return len(_echelon(int_rows))
    return _modular_rank(int_rows, cols, Modular(retries=settings.retries, seed=settings.seed))


def rref(M: RationalMatrix, column_order: Sequence[int] | None = None) -> tuple[RationalMatrix, list[int]]:
    """
    Reduced row echelon form with pivots searched along ``column_order``.

    Returns:
        (R, pivots) where R has one nonzero row per pivot, in pivot order.
    """
    position = None
    if column_order is not None:
        if sorted(column_order) != list(range(M.cols)):
            raise ValueError("column_order must be a permutation of the columns")
        position = [0] * M.cols
        for rank_, col in enumerate(column_order):
            position[col] = rank_
    reduced = sparse_rref(M.sparse_rows(), position)
    pivots = [p for p, _ in reduced]
    return RationalMatrix.from_sparse([row for _, row in reduced], M.cols), pivots


def kernel_basis(M: RationalMatrix) -> RationalMatrix:
    """Columns spanning the right kernel, in reduced column echelon form."""
    reduced = sparse_rref(M.sparse_rows())
    pivots = {p for p, _ in reduced}
    free = [c for c in range(M.cols) if c not in pivots]
    vectors = []
    for f in free:
        vec: SparseRow = {f: ONE}
        for p, row in reduced:
            value = row.get(f)
            if value:
                vec[p] = -value
        vectors.append(vec)
    canonical = [row for _, row in sparse_rref(vectors)]
    return RationalMatrix.from_sparse(canonical, M.cols).transpose() if canonical \
        else RationalMatrix(M.cols, 0)


def cokernel_basis(M: RationalMatrix) -> RationalMatrix:
    """Rows spanning the left kernel {x : x·M = 0}, in rref."""
    return kernel_basis(M.transpose()).transpose() if M.rows else RationalMatrix(0, 0)


def left_kernel_rows(rows: Sequence[Mapping[int, object]]) -> list[SparseRow]:
    """Sparse rref basis of the relations among ``rows``."""
    transposed: dict[int, dict[int, object]] = {}
    for i, row in enumerate(rows):
        for c, v in row.items():
            if v:
                transposed.setdefault(c, {})[i] = v
    reduced = sparse_rref(transposed.values())
    pivots = {p for p, _ in reduced}
    vectors = []
    for f in range(len(rows)):
        if f in pivots:
            continue
        vec: SparseRow = {f: ONE}
        for p, row in reduced:
            value = row.get(f)
            if value:
                vec[p] = -value
        vectors.append(vec)
    return [row for _, row in sparse_rref(vectors)]


def solve_left(M: RationalMatrix, target: Sequence) -> tuple[Fraction, ...] | None:
    """Some x with x·M = target, or None when target is outside the row space."""
    stacked = M.vstack(RationalMatrix.from_rows([list(target)], M.cols))
    for relation in cokernel_basis(stacked).to_rows():
        last = relation[-1]
        if last:
            return tuple(-v / last for v in relation[:-1])
    return None
