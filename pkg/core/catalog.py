"""
Built-in systems: Killing and conformal Killing equations of flat metrics,
Macaulay's systems and the small second-order examples.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from core.errors import JetKitError
from core.jetspace import JetCoordinate, JetFrame, MultiIndex
from core.sequence import OperatorHandle, operator_from_rows
from core.system import LinearJetSystem, make_system, prolong


@dataclass(frozen=True)
class FlatMetric:
    """Constant diagonal metric omega = diag(signature)."""
    signature: tuple[int, ...]

    def __post_init__(self):
        if not self.signature:
            raise ValueError("metric needs at least one variable")
        if any(s not in (1, -1) for s in self.signature):
            raise ValueError(f"signature entries must be +1 or -1, got {self.signature}")

    @classmethod
    def euclidean(cls, n: int) -> "FlatMetric":
        return cls((1,) * n)

    @classmethod
    def minkowski(cls, n: int) -> "FlatMetric":
        return cls((-1,) + (1,) * (n - 1))

    @property
    def n(self) -> int:
        return len(self.signature)

    def omega(self, i: int, j: int) -> int:
        """omega_ij with 0-based indices."""
        return self.signature[i] if i == j else 0

    def inverse(self, i: int, j: int) -> int:
        """omega^ij; a diagonal +-1 metric is its own inverse."""
        return self.signature[i] if i == j else 0


def _first(n: int, k: int, i: int) -> JetCoordinate:
    """xi^k_i, 0-based unknown and variable."""
    return JetCoordinate(k, MultiIndex.zero(n).add(i + 1))


def _jet(n: int, k: int, *variables: int) -> JetCoordinate:
    """xi^k with 1-based derivative variables."""
    return JetCoordinate(k, MultiIndex.from_variables(n, variables))


def _add(eq: dict, coord: JetCoordinate, value):
    eq[coord] = eq.get(coord, Fraction(0)) + Fraction(value)


# ============================================================================
# KILLING SYSTEMS
# ============================================================================

def killing_flat(metric: FlatMetric) -> LinearJetSystem:
    """omega_rj xi^r_i + omega_ir xi^r_j = 0 for i <= j."""
    n = metric.n
    equations = []
    for i in range(n):
        for j in range(i, n):
            eq: dict = {}
            _add(eq, _first(n, j, i), metric.omega(j, j))
            _add(eq, _first(n, i, j), metric.omega(i, i))
            equations.append(eq)
    return make_system(JetFrame(n, n, 1), equations, f"killing(n={n})")


def conformal_killing_flat(metric: FlatMetric) -> LinearJetSystem:
    """
    omega_rj xi^r_i + omega_ir xi^r_j - (2/n) omega_ij xi^r_r = 0 for i <= j, n >= 3.

    The trace-free factor 2/n makes one of the n(n+1)/2 equations redundant.
    """
    n = metric.n
    if n < 3:
        raise ValueError("conformal_killing_flat needs n >= 3; use conformal_n1 or conformal_n2")
    trace = Fraction(2, n)
    equations = []
    for i in range(n):
        for j in range(i, n):
            eq: dict = {}
            _add(eq, _first(n, j, i), metric.omega(j, j))
            _add(eq, _first(n, i, j), metric.omega(i, i))
            if i == j:
                for r in range(n):
                    _add(eq, _first(n, r, r), -trace * metric.omega(i, j))
            equations.append(eq)
    return make_system(JetFrame(n, n, 1), equations, f"conformal(n={n})")


def conformal_n1() -> LinearJetSystem:
    """xi_xxx = 0."""
    return make_system(JetFrame(1, 1, 3), [{_jet(1, 0, 1, 1, 1): 1}], "conformal(n=1)")


def _cauchy_riemann_equations() -> list[dict]:
    return [
        {_jet(2, 1, 2): 1, _jet(2, 0, 1): -1},
        {_jet(2, 0, 2): 1, _jet(2, 1, 1): 1},
    ]


def cauchy_riemann() -> LinearJetSystem:
    """xi^2_2 - xi^1_1 = 0, xi^1_2 + xi^2_1 = 0 (infinite type)."""
    return make_system(JetFrame(2, 2, 1), _cauchy_riemann_equations(), "cauchy-riemann")


def conformal_n2() -> LinearJetSystem:
    """
    Cauchy-Riemann, its first prolongation, and all third-order jets set to zero.

    2 + 4 + 8 = 14 equations on J_3 with 6 solution parameters.
    """
    frame = JetFrame(2, 2, 3)
    equations = _cauchy_riemann_equations()
    for eq in _cauchy_riemann_equations():
        for i in (1, 2):
            equations.append({
                JetCoordinate(c.unknown, c.index.add(i)): v for c, v in eq.items()
            })
    for k in range(2):
        for mu in ((3, 0), (2, 1), (1, 2), (0, 3)):
            equations.append({JetCoordinate(k, MultiIndex(mu)): 1})
    return make_system(frame, equations, "conformal(n=2)")


def killing_cc_dims(n: int) -> tuple[int, int]:
    """Closed forms n^2(n^2-1)/12 and n^2(n^2-1)(n-2)/24 of the first two CC bundles."""
    return n * n * (n * n - 1) // 12, n * n * (n * n - 1) * (n - 2) // 24


# ============================================================================
# SECOND-ORDER EXAMPLES
# ============================================================================

def macaulay() -> LinearJetSystem:
    """y_33 = 0, y_23 - y_11 = 0, y_22 = 0."""
    frame = JetFrame(3, 1, 2)
    return make_system(frame, [
        {_jet(3, 0, 3, 3): 1},
        {_jet(3, 0, 2, 3): 1, _jet(3, 0, 1, 1): -1},
        {_jet(3, 0, 2, 2): 1},
    ], "macaulay")


def macaulay_variant() -> LinearJetSystem:
    """y_33 - y_11 = 0, y_23 = 0, y_22 - y_11 = 0."""
    frame = JetFrame(3, 1, 2)
    return make_system(frame, [
        {_jet(3, 0, 3, 3): 1, _jet(3, 0, 1, 1): -1},
        {_jet(3, 0, 2, 3): 1},
        {_jet(3, 0, 2, 2): 1, _jet(3, 0, 1, 1): -1},
    ], "macaulay-variant")


def macaulay_plane() -> LinearJetSystem:
    """y_22 = 0, y_12 - y_11 = 0: finite type with dim R_3 = dim R_2 = 4."""
    frame = JetFrame(2, 1, 2)
    return make_system(frame, [
        {_jet(2, 0, 2, 2): 1},
        {_jet(2, 0, 1, 2): 1, _jet(2, 0, 1, 1): -1},
    ], "macaulay-plane")


def _vanishing_pair_equations() -> list[dict]:
    return [
        {_jet(2, 0, 2, 2): 1},
        {_jet(2, 0, 1, 2): 1, _jet(2, 0): -1},
    ]


def vanishing_pair() -> LinearJetSystem:
    """d_22 y = 0, d_12 y - y = 0: formally integrable only after four projections."""
    return make_system(JetFrame(2, 1, 2), _vanishing_pair_equations(), "vanishing-pair")


def vanishing_pair_operator() -> OperatorHandle:
    """(P, Q) with P y = d_22 y and Q y = d_12 y - y, in that target order."""
    frame = JetFrame(2, 1, 2)
    rows = [{frame.index(c): v for c, v in eq.items()} for eq in _vanishing_pair_equations()]
    return operator_from_rows(frame, rows, "vanishing-pair")


def homogeneous_pair() -> LinearJetSystem:
    """y_22 = 0, y_12 = 0."""
    frame = JetFrame(2, 1, 2)
    return make_system(frame, [{_jet(2, 0, 2, 2): 1}, {_jet(2, 0, 1, 2): 1}], "homogeneous-pair")


# ============================================================================
# REGISTRY
# ============================================================================

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    build: Callable[[], LinearJetSystem]
    description: str
    unknown_prefix: str = "y"


def _entries() -> list[CatalogEntry]:
    return [
        CatalogEntry("killing3", lambda: killing_flat(FlatMetric.euclidean(3)),
                     "Killing equations, Euclidean n=3", "xi"),
        CatalogEntry("killing4", lambda: killing_flat(FlatMetric.euclidean(4)),
                     "Killing equations, Euclidean n=4", "xi"),
        CatalogEntry("minkowski4", lambda: killing_flat(FlatMetric.minkowski(4)),
                     "Killing equations, Minkowski n=4", "xi"),
        CatalogEntry("conformal1", conformal_n1, "conformal system n=1: xi_xxx = 0", "xi"),
        CatalogEntry("conformal2", conformal_n2, "conformal system n=2, third order", "xi"),
        CatalogEntry("conformal3", lambda: conformal_killing_flat(FlatMetric.euclidean(3)),
                     "conformal Killing equations, Euclidean n=3", "xi"),
        CatalogEntry("conformal4", lambda: conformal_killing_flat(FlatMetric.euclidean(4)),
                     "conformal Killing equations, Euclidean n=4", "xi"),
        CatalogEntry("conformal5", lambda: conformal_killing_flat(FlatMetric.euclidean(5)),
                     "conformal Killing equations, Euclidean n=5", "xi"),
        CatalogEntry("cauchy-riemann", cauchy_riemann, "Cauchy-Riemann equations", "xi"),
        CatalogEntry("macaulay", macaulay, "Macaulay's system R_2"),
        CatalogEntry("macaulay3", lambda: prolong(macaulay(), 1).relabel("macaulay3"),
                     "Macaulay's system prolonged to order 3"),
        CatalogEntry("macaulay4", lambda: prolong(macaulay(), 2).relabel("macaulay4"),
                     "Macaulay's system prolonged to order 4"),
        CatalogEntry("macaulay-variant", macaulay_variant, "variant of Macaulay's system"),
        CatalogEntry("macaulay-plane", macaulay_plane, "two-variable analogue of Macaulay's system"),
        CatalogEntry("vanishing-pair", vanishing_pair, "d_22 y = 0, d_12 y - y = 0"),
        CatalogEntry("homogeneous-pair", homogeneous_pair, "d_22 y = 0, d_12 y = 0"),
    ]


CATALOG: dict[str, CatalogEntry] = {entry.name: entry for entry in _entries()}


def catalog_names() -> list[str]:
    return list(CATALOG)


def catalog_entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise JetKitError(f"unknown catalog system '{name}'; try one of: {', '.join(CATALOG)}",
                          code="unknown_system") from None


def catalog_system(name: str) -> LinearJetSystem:
    return catalog_entry(name).build()


__all__ = [
    "FlatMetric",
    "killing_flat",
    "conformal_killing_flat",
    "conformal_n1",
    "conformal_n2",
    "cauchy_riemann",
    "killing_cc_dims",
    "macaulay",
    "macaulay_variant",
    "macaulay_plane",
    "vanishing_pair",
    "vanishing_pair_operator",
    "homogeneous_pair",
    "CatalogEntry",
    "CATALOG",
    "catalog_names",
    "catalog_entry",
    "catalog_system",
]
