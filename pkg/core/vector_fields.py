"""
Polynomial vector fields, jet sections and the Spencer operator.

Components are sympy expressions in x1..xn with rational coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

import sympy

from core.catalog import FlatMetric
from core.exactalg import RationalMatrix, kernel_basis
from core.jetspace import JetCoordinate, JetFrame, MultiIndex, multi_indices
from core.system import LinearJetSystem, is_formally_integrable, symbol_dimension


def coordinates(n: int) -> tuple[sympy.Symbol, ...]:
    return sympy.symbols(f"x1:{n + 1}")


def _rational(value) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def _derivative(expr: sympy.Expr, mu: Sequence[int], xs: Sequence[sympy.Symbol]) -> sympy.Expr:
    for x, e in zip(xs, mu):
        if e:
            expr = sympy.diff(expr, x, e)
    return expr


# ============================================================================
# VECTOR FIELDS
# ============================================================================

@dataclass(frozen=True)
class PolyVectorField:
    """sum_k components[k] d_k on R^n."""
    n: int
    components: tuple[sympy.Expr, ...]

    def __post_init__(self):
        if len(self.components) != self.n:
            raise ValueError(f"expected {self.n} components, got {len(self.components)}")
        object.__setattr__(self, "components", tuple(sympy.expand(c) for c in self.components))

    @classmethod
    def from_components(cls, components: Sequence) -> "PolyVectorField":
        return cls(len(components), tuple(sympy.sympify(c) for c in components))

    @classmethod
    def partial(cls, n: int, i: int) -> "PolyVectorField":
        """d_i with a 1-based index."""
        return cls(n, tuple(sympy.Integer(1 if k == i - 1 else 0) for k in range(n)))

    @property
    def variables(self) -> tuple[sympy.Symbol, ...]:
        return coordinates(self.n)

    def apply(self, f: sympy.Expr) -> sympy.Expr:
        """The derivation sum_k a^k d_k f."""
        return sympy.expand(sum(a * sympy.diff(f, x) for a, x in zip(self.components, self.variables)))

    def divergence(self) -> sympy.Expr:
        return sympy.expand(sum(sympy.diff(a, x) for a, x in zip(self.components, self.variables)))

    def degree(self) -> int:
        return max((sympy.Poly(c, *self.variables).total_degree() for c in self.components if c != 0),
                   default=0)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.components)

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField(self.n, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField(self.n, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "PolyVectorField":
        return PolyVectorField(self.n, tuple(-a for a in self.components))

    def scale(self, factor) -> "PolyVectorField":
        factor = _rational(factor) if isinstance(factor, (int, Fraction)) else factor
        return PolyVectorField(self.n, tuple(factor * a for a in self.components))

    def __str__(self) -> str:
        terms = [f"({c})*d{k + 1}" for k, c in enumerate(self.components) if c != 0]
        return " + ".join(terms) if terms else "0"


def lie_bracket(a: PolyVectorField, b: PolyVectorField) -> PolyVectorField:
    """[a, b]^k = a(b^k) - b(a^k)."""
    if a.n != b.n:
        raise ValueError("vector fields live on different spaces")
    return PolyVectorField(a.n, tuple(a.apply(bk) - b.apply(ak) for ak, bk in zip(a.components, b.components)))


def elations(metric: FlatMetric) -> list[PolyVectorField]:
    """theta_s = -1/2 x^2 d_s + omega_st x^t x^r d_r, with x^2 = omega_ij x^i x^j."""
    n = metric.n
    xs = coordinates(n)
    square = sum(metric.omega(i, i) * xs[i] ** 2 for i in range(n))
    fields = []
    for s in range(n):
        lowered = metric.omega(s, s) * xs[s]
        components = [lowered * xs[r] - (sympy.Rational(1, 2) * square if r == s else 0) for r in range(n)]
        fields.append(PolyVectorField(n, tuple(components)))
    return fields


def elation_second_jet(metric: FlatMetric, weights: Sequence) -> dict[JetCoordinate, Fraction]:
    """
    The constant second jet lambda^s d_ij theta^k_s as a vector on degree-2 coordinates.

    It equals delta^k_i A_j + delta^k_j A_i - omega_ij omega^kr A_r with A_i = omega_si lambda^s.
    """
    n = metric.n
    if len(weights) != n:
        raise ValueError(f"expected {n} weights")
    xs = coordinates(n)
    field = PolyVectorField(n, tuple(
        sum((_rational(w) * th.components[k] for w, th in zip(weights, elations(metric))), sympy.Integer(0))
        for k in range(n)
    ))
    out = {}
    for mu in multi_indices(n, 2):
        for k in range(n):
            value = _derivative(field.components[k], mu, xs)
            if value != 0:
                out[JetCoordinate(k, mu)] = Fraction(int(value.p), int(value.q))
    return out


# ============================================================================
# JET SECTIONS
# ============================================================================

@dataclass(frozen=True)
class JetSection:
    """Polynomial entries xi^k_mu(x) for every coordinate of J_q(E)."""
    frame: JetFrame
    entries: Mapping[JetCoordinate, sympy.Expr]

    def __post_init__(self):
        missing = [c for c in self.frame.coordinates if c not in self.entries]
        if missing:
            raise ValueError(f"section misses {len(missing)} coordinates of {self.frame}")

    def value(self, coord: JetCoordinate) -> sympy.Expr:
        return self.entries[coord]


def jet_section_from_field(field: PolyVectorField, q: int) -> JetSection:
    """The holonomic section j_q(field)."""
    frame = JetFrame(field.n, field.n, q)
    xs = field.variables
    entries = {c: sympy.expand(_derivative(field.components[c.unknown], c.index, xs)) for c in frame.coordinates}
    return JetSection(frame, entries)


@dataclass(frozen=True)
class SpencerImage:
    """T* (x) J_q(E)-valued section: component (i, coordinate)."""
    frame: JetFrame
    components: Mapping[tuple[int, JetCoordinate], sympy.Expr]

    def is_zero(self) -> bool:
        return all(sympy.expand(v) == 0 for v in self.components.values())

    def slice(self, i: int) -> JetSection:
        """The J_q(E) section paired with dx^i (1-based)."""
        return JetSection(self.frame, {c: self.components[(i, c)] for c in self.frame.coordinates})


def spencer_operator(section: JetSection) -> SpencerImage:
    """d xi_{q+1} = j_1(xi_q) - xi_{q+1}: components d_i xi^k_mu - xi^k_{mu+1_i}, |mu| <= q."""
    top = section.frame
    if top.q < 1:
        raise ValueError("the Spencer operator needs a section of order at least 1")
    frame = top.raised(top.q - 1)
    xs = coordinates(top.n)
    components = {}
    for coord in frame.coordinates:
        for i in range(1, top.n + 1):
            raised = JetCoordinate(coord.unknown, coord.index.add(i))
            components[(i, coord)] = sympy.expand(
                sympy.diff(section.value(coord), xs[i - 1]) - section.value(raised)
            )
    return SpencerImage(frame, components)


def section_satisfies(S: LinearJetSystem, section: JetSection) -> bool:
    """Every equation of S vanishes identically on the section."""
    if section.frame.q < S.order or (section.frame.n, section.frame.m) != (S.n, S.m):
        raise ValueError(f"section frame {section.frame} cannot be tested against {S!r}")
    coords = S.frame.coordinates
    for row in S.rows:
        total = sum((_rational(v) * section.value(coords[c]) for c, v in row.items()), sympy.Integer(0))
        if sympy.expand(total) != 0:
            return False
    return True


def field_satisfies(S: LinearJetSystem, field: PolyVectorField) -> bool:
    return section_satisfies(S, jet_section_from_field(field, S.order))


# ============================================================================
# POLYNOMIAL SOLUTIONS
# ============================================================================

@dataclass(frozen=True)
class PolynomialSolutions:
    degree: int
    dimension: int
    fields: tuple[PolyVectorField, ...]
    certified: bool


def polynomial_solutions(S: LinearJetSystem, degree: int) -> PolynomialSolutions:
    """
    Polynomial solutions of degree <= ``degree``.

    Unknown k is written sum_alpha c_{k, alpha} x^alpha / alpha!, so c is a jet at
    the origin and every derivative of every equation is a row on c. The result
    is certified complete when ``degree + 1`` reaches the system order, the
    symbol vanishes there and the system is formally integrable.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if S.n != S.m:
        raise ValueError("polynomial_solutions returns vector fields and needs m = n")
    frame = JetFrame(S.n, S.m, degree)
    coords = S.frame.coordinates
    shifts = [nu for d in range(degree + 1) for nu in multi_indices(S.n, d)]
    rows = []
    for row in S.rows:
        for nu in shifts:
            shifted = {}
            for c, v in row.items():
                k, mu = coords[c]
                moved = JetCoordinate(k, mu.shift(nu))
                if moved.index.degree <= degree:
                    shifted[frame.index(moved)] = v
            if shifted:
                rows.append(shifted)
    basis = kernel_basis(RationalMatrix.from_sparse(rows, frame.dim)) if rows \
        else RationalMatrix.identity(frame.dim)
    xs = coordinates(S.n)
    fields = []
    for j in range(basis.cols):
        components = [sympy.Integer(0)] * S.n
        for c, value in enumerate(basis.column(j)):
            if value:
                k, alpha = frame.coordinates[c]
                monomial = sympy.Integer(1)
                for x, e in zip(xs, alpha):
                    monomial *= x ** e
                weight = 1
                for e in alpha:
                    weight *= factorial(e)
                components[k] += _rational(value) / weight * monomial
        fields.append(PolyVectorField(S.n, tuple(components)))
    certified = (degree + 1 >= S.order and symbol_dimension(S, degree + 1) == 0
                 and is_formally_integrable(S).holds)
    return PolynomialSolutions(degree, len(fields), tuple(fields), certified)


__all__ = [
    "coordinates",
    "PolyVectorField",
    "lie_bracket",
    "elations",
    "elation_second_jet",
    "JetSection",
    "jet_section_from_field",
    "SpencerImage",
    "spencer_operator",
    "section_satisfies",
    "field_satisfies",
    "PolynomialSolutions",
    "polynomial_solutions",
]
