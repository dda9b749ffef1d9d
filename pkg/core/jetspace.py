"""
Multi-indices, jet coordinates, and the fixed coordinate order.

Coordinates (k, mu) of J_q(E) are ordered by degree |mu| descending, then
class(mu) descending, then reverse-lexicographically on mu, then unknown k
ascending. Pivot and parametric-jet semantics everywhere depend on it, so
the order is versioned with ``FRAME_ORDER_VERSION``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import NamedTuple, Sequence

FRAME_ORDER_VERSION = 1
NO_CLASS = 0  # class of the zero multi-index


class MultiIndex(tuple):
    """Exponents (mu_1, ..., mu_n) of a derivative d_mu."""

    __slots__ = ()

    def __new__(cls, exponents: Sequence[int]):
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        return super().__new__(cls, exps)

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def from_variables(cls, n: int, variables: Sequence[int]) -> "MultiIndex":
        """Build from 1-based variable indices, repetition meaning higher order."""
        exps = [0] * n
        for v in variables:
            if not 1 <= v <= n:
                raise IndexError(f"variable index {v} outside 1..{n}")
            exps[v - 1] += 1
        return cls(exps)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def degree(self) -> int:
        return sum(self)

    @property
    def cls(self) -> int:
        return class_of(self)

    def add(self, i: int) -> "MultiIndex":
        return mult_index_add(self, i)

    def shift(self, other: Sequence[int]) -> "MultiIndex":
        return MultiIndex(a + b for a, b in zip(self, other))

    def variables(self) -> list[int]:
        """1-based variable indices with repetition, ascending."""
        out = []
        for i, e in enumerate(self):
            out.extend([i + 1] * e)
        return out

    def __repr__(self) -> str:
        return f"MultiIndex{tuple(self)}"


def class_of(mu: Sequence[int]) -> int:
    for i, e in enumerate(mu):
        if e:
            return i + 1
    return NO_CLASS


def mult_index_add(mu: MultiIndex, i: int) -> MultiIndex:
    """mu + 1_i with a 1-based variable index."""
    if not 1 <= i <= len(mu):
        raise IndexError(f"variable index {i} outside 1..{len(mu)}")
    exps = list(mu)
    exps[i - 1] += 1
    return MultiIndex(exps)


class JetCoordinate(NamedTuple):
    """The jet coordinate y^k_mu (k is 0-based)."""
    unknown: int
    index: MultiIndex


def order_key(coord: JetCoordinate) -> tuple:
    mu = coord.index
    return (-sum(mu), -class_of(mu), tuple(-e for e in reversed(mu)), coord.unknown)


@lru_cache(maxsize=None)
def multi_indices(n: int, degree: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of exact degree, in frame order."""
    def build(vars_left: int, total: int):
        if vars_left == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in build(vars_left - 1, total - first):
                yield (first,) + rest

    found = [MultiIndex(e) for e in build(n, degree)]
    found.sort(key=lambda mu: (-class_of(mu), tuple(-e for e in reversed(mu))))
    return tuple(found)


# ============================================================================
# DIMENSIONS
# ============================================================================

def dim_jet(n: int, m: int, q: int) -> int:
    if n < 1 or m < 1 or q < 0:
        raise ValueError(f"invalid jet frame (n={n}, m={m}, q={q})")
    return m * comb(n + q, n)


def dim_symbol(n: int, m: int, q: int) -> int:
    if n < 1 or m < 1 or q < 0:
        raise ValueError(f"invalid symbol frame (n={n}, m={m}, q={q})")
    return m * comb(n + q - 1, n - 1)


def class_count(n: int, q: int, i: int) -> int:
    """Number of degree-q multi-indices of class i."""
    if q == 0:
        return 0
    return comb(n - i + q - 1, q - 1)


def exterior_basis(n: int, s: int) -> list[tuple[int, ...]]:
    """Strictly increasing 0-based index tuples, lexicographic."""
    if s < 0 or s > n:
        return []
    return list(combinations(range(n), s))


# ============================================================================
# FRAMES
# ============================================================================

@lru_cache(maxsize=256)
def _frame_tables(n: int, m: int, q: int):
    coords = []
    for d in range(q, -1, -1):
        for mu in multi_indices(n, d):
            for k in range(m):
                coords.append(JetCoordinate(k, mu))
    index = {c: i for i, c in enumerate(coords)}
    return tuple(coords), index


@dataclass(frozen=True)
class JetFrame:
    """Coordinates of J_q(E) for n variables and m unknowns."""
    n: int
    m: int
    q: int

    def __post_init__(self):
        dim_jet(self.n, self.m, self.q)

    @property
    def dim(self) -> int:
        return dim_jet(self.n, self.m, self.q)

    @property
    def coordinates(self) -> tuple[JetCoordinate, ...]:
        return _frame_tables(self.n, self.m, self.q)[0]

    def index(self, coord: JetCoordinate) -> int:
        try:
            return _frame_tables(self.n, self.m, self.q)[1][coord]
        except KeyError:
            raise KeyError(f"{coord} is not a coordinate of {self}") from None

    def __contains__(self, coord) -> bool:
        return coord in _frame_tables(self.n, self.m, self.q)[1]

    def degree_start(self, d: int) -> int:
        """First column holding a coordinate of degree d (blocks are contiguous)."""
        return sum(dim_symbol(self.n, self.m, e) for e in range(self.q, d, -1))

    def degree_block(self, d: int) -> range:
        start = self.degree_start(d)
        return range(start, start + dim_symbol(self.n, self.m, d))

    def degree_of_column(self, col: int) -> int:
        return self.coordinates[col].index.degree

    def raised(self, q: int) -> "JetFrame":
        return JetFrame(self.n, self.m, q)

    def offset_into(self, other: "JetFrame") -> int:
        """Column shift carrying this frame's columns into a higher-order frame."""
        if (other.n, other.m) != (self.n, self.m) or other.q < self.q:
            raise ValueError(f"{self} does not embed into {other}")
        return other.dim - self.dim


@dataclass(frozen=True)
class SymbolFrame:
    """Coordinates (k, mu) with |mu| = q exactly."""
    n: int
    m: int
    q: int

    @property
    def dim(self) -> int:
        return dim_symbol(self.n, self.m, self.q)

    @property
    def coordinates(self) -> tuple[JetCoordinate, ...]:
        frame = JetFrame(self.n, self.m, self.q)
        return frame.coordinates[:self.dim]

    def index(self, coord: JetCoordinate) -> int:
        return JetFrame(self.n, self.m, self.q).index(coord)


def enumerate_frame(frame: JetFrame) -> list[JetCoordinate]:
    return list(frame.coordinates)


# ============================================================================
# LABELS
# ============================================================================

def jet_label(coord: JetCoordinate, unknowns: Sequence[str] | None = None) -> str:
    """DSL spelling: y(1,1,3) for y^1_{113}; a bare name at order 0."""
    name = unknowns[coord.unknown] if unknowns else f"y{coord.unknown + 1}"
    variables = coord.index.variables()
    if not variables:
        return name
    return f"{name}({','.join(str(v) for v in variables)})"


def default_unknown_names(m: int) -> list[str]:
    return ["y"] if m == 1 else [f"y{k + 1}" for k in range(m)]


def default_variable_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]
