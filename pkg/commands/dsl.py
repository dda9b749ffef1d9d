"""
System description language

    system mac {
      vars x1 x2 x3;
      unknowns y;
      eq: y(3,3) = 0;
      eq phi2: y(2,3) - y(1,1) = 0;
      eq: y(2,2) = 0;
    }

Jets are written with 1-based variable indices, repeated for higher
derivatives; a bare unknown is the order-0 jet. An optional ``order Q;``
clause raises the frame above the highest derivative that appears.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from parglare import Grammar, Parser
from parglare.exceptions import SyntaxError as ParseError

from core.errors import DocumentError
from core.jetspace import JetCoordinate, JetFrame, MultiIndex, default_unknown_names, default_variable_names, jet_label
from core.system import LinearJetSystem, make_system
from utils.logger import logger

GRAMMAR = r"""
document: "system" NAME "{" vars_decl unknowns_decl order_decl? equation* "}";
vars_decl: "vars" IDENT+ ";";
unknowns_decl: "unknowns" IDENT+ ";";
order_decl: "order" INT ";";
equation: "eq" IDENT? ":" expression "=" "0" ";";
expression: first_term signed_term*;
first_term: sign? term;
signed_term: sign term;
sign: "+" | "-";
term: coefficient? jet;
coefficient: rational "*";
rational: INT denominator?;
denominator: "/" INT;
jet: IDENT index_list?;
index_list: "(" INT+[COMMA] ")";

terminals
NAME: /[A-Za-z_][A-Za-z0-9_.\-]*/;
IDENT: /[A-Za-z_][A-Za-z0-9_]*/;
INT: /\d+/;
COMMA: ",";
KEYWORD: /\w+/;
"""


# ============================================================================
# DOCUMENT TYPES
# ============================================================================

@dataclass(frozen=True)
class Equation:
    """One linear combination; terms are sorted in frame order with no zero coefficients."""
    terms: tuple[tuple[JetCoordinate, Fraction], ...]
    name: Optional[str] = None


@dataclass(frozen=True)
class SystemDocument:
    name: str
    variables: tuple[str, ...]
    unknowns: tuple[str, ...]
    order: int
    equations: tuple[Equation, ...]

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def m(self) -> int:
        return len(self.unknowns)

    @property
    def frame(self) -> JetFrame:
        return JetFrame(self.n, self.m, self.order)

    def to_system(self) -> LinearJetSystem:
        return make_system(self.frame, [dict(eq.terms) for eq in self.equations], self.name)


# ============================================================================
# PARSING
# ============================================================================

_grammar = None


def get_grammar() -> Grammar:
    global _grammar
    if _grammar is None:
        _grammar = Grammar.from_string(GRAMMAR)
    return _grammar


def _line_col(text: str, position: int) -> tuple[int, int]:
    line = text.count("\n", 0, position) + 1
    column = position - (text.rfind("\n", 0, position) + 1) + 1
    return line, column


def _actions() -> dict:
    return {
        "NAME": lambda ctx, value: (value, ctx.start_position),
        "IDENT": lambda ctx, value: (value, ctx.start_position),
        "INT": lambda ctx, value: (int(value), ctx.start_position),
        "document": lambda _, n: {
            "name": n[1], "variables": n[3], "unknowns": n[4], "order": n[5], "equations": n[6] or [],
        },
        "vars_decl": lambda _, n: n[1],
        "unknowns_decl": lambda _, n: n[1],
        "order_decl": lambda _, n: n[1],
        "equation": lambda ctx, n: (n[1], n[3], ctx.start_position),
        "expression": lambda _, n: [n[0]] + list(n[1] or []),
        "first_term": lambda _, n: (n[0] or "+", n[1]),
        "signed_term": lambda _, n: (n[0], n[1]),
        "sign": lambda _, n: n[0],
        "term": lambda _, n: (n[0], n[1]),
        "coefficient": lambda _, n: n[0],
        "rational": lambda _, n: (n[0], n[1]),
        "denominator": lambda _, n: n[1],
        "jet": lambda _, n: (n[0], n[1] or []),
        "index_list": lambda _, n: n[1],
    }


def _check_names(text: str, names: Sequence[tuple[str, int]], kind: str) -> tuple[str, ...]:
    seen: set[str] = set()
    for name, pos in names:
        if name in seen:
            line, column = _line_col(text, pos)
            raise DocumentError(f"{kind} '{name}' declared twice", "duplicate_identifier", line, column)
        seen.add(name)
    return tuple(name for name, _ in names)


def _coefficient(text: str, sign: str, rational) -> Fraction:
    if rational is None:
        value = Fraction(1)
    else:
        (num, _), den = rational
        if den is not None:
            den_value, den_pos = den
            if den_value == 0:
                line, column = _line_col(text, den_pos)
                raise DocumentError("zero denominator in coefficient", "zero_denominator", line, column)
            value = Fraction(num, den_value)
        else:
            value = Fraction(num)
    return -value if sign == "-" else value


def _jet(text: str, jet, unknowns: tuple[str, ...], n: int) -> JetCoordinate:
    (name, pos), indices = jet
    if name not in unknowns:
        line, column = _line_col(text, pos)
        raise DocumentError(f"unknown identifier '{name}'", "unknown_identifier", line, column)
    for value, index_pos in indices:
        if not 1 <= value <= n:
            line, column = _line_col(text, index_pos)
            raise DocumentError(f"variable index {value} out of range 1..{n}", "index_out_of_range", line, column)
    return JetCoordinate(unknowns.index(name), MultiIndex.from_variables(n, [v for v, _ in indices]))


def _sorted_terms(frame: JetFrame, terms: dict[JetCoordinate, Fraction]) -> tuple[tuple[JetCoordinate, Fraction], ...]:
    return tuple(sorted(((c, v) for c, v in terms.items() if v), key=lambda item: frame.index(item[0])))


def parse(text: str) -> SystemDocument:
    """
    Parse a system document

    Args:
        text: Document source

    Returns:
        The parsed document with like terms combined

    Raises:
        DocumentError: With code syntax, unknown_identifier, index_out_of_range,
            zero_denominator or duplicate_identifier, and the offending line/column
    """
    parser = Parser(get_grammar(), actions=_actions())
    try:
        raw = parser.parse(text)
    except ParseError as e:
        position = getattr(e.location, "start_position", None)
        line, column = _line_col(text, position) if position is not None else (None, None)
        raise DocumentError(f"syntax error: {e}", "syntax", line, column) from None

    name, _ = raw["name"]
    variables = _check_names(text, raw["variables"], "variable")
    unknowns = _check_names(text, raw["unknowns"], "unknown")
    n = len(variables)

    parsed: list[tuple[Optional[str], dict[JetCoordinate, Fraction]]] = []
    top = 0
    for eq_name, expression, _ in raw["equations"]:
        terms: dict[JetCoordinate, Fraction] = {}
        for sign, (rational, jet) in expression:
            coord = _jet(text, jet, unknowns, n)
            terms[coord] = terms.get(coord, Fraction(0)) + _coefficient(text, sign, rational)
            top = max(top, coord.index.degree)
        parsed.append((eq_name[0] if eq_name else None, terms))

    order = max(top, raw["order"][0] if raw["order"] else 0)
    frame = JetFrame(n, len(unknowns), order)
    equations = []
    for eq_name, terms in parsed:
        sorted_terms = _sorted_terms(frame, terms)
        if not sorted_terms:
            logger.debug(f"Dropping equation {eq_name or '(unnamed)'}: all terms cancel")
            continue
        equations.append(Equation(sorted_terms, eq_name))
    return SystemDocument(name, variables, unknowns, order, tuple(equations))


# ============================================================================
# PRINTING
# ============================================================================

def _format_term(coord: JetCoordinate, value: Fraction, unknowns: Sequence[str], first: bool) -> str:
    magnitude = abs(value)
    jet = jet_label(coord, unknowns)
    body = jet if magnitude == 1 else f"{magnitude}*{jet}"
    if first:
        return f"-{body}" if value < 0 else body
    return f"- {body}" if value < 0 else f"+ {body}"


def print_document(doc: SystemDocument) -> str:
    """Render a document so that ``parse(print_document(doc)) == doc``"""
    lines = [f"system {doc.name} {{", f"  vars {' '.join(doc.variables)};", f"  unknowns {' '.join(doc.unknowns)};"]
    top = max((c.index.degree for eq in doc.equations for c, _ in eq.terms), default=0)
    if doc.order > top:
        lines.append(f"  order {doc.order};")
    for eq in doc.equations:
        body = " ".join(_format_term(c, v, doc.unknowns, i == 0) for i, (c, v) in enumerate(eq.terms))
        head = f"eq {eq.name}:" if eq.name else "eq:"
        lines.append(f"  {head} {body} = 0;")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _document_name(label: str) -> str:
    cleaned = "".join(ch if ch.isalnum() or ch in "_.-" else "_" for ch in label)
    if not cleaned or not (cleaned[0].isalpha() or cleaned[0] == "_"):
        cleaned = f"s_{cleaned}" if cleaned else "system"
    return cleaned


def unknown_names(m: int, prefix: str = "y") -> list[str]:
    if prefix == "y":
        return default_unknown_names(m)
    return [prefix] if m == 1 else [f"{prefix}{k + 1}" for k in range(m)]


def document_from_system(
    S: LinearJetSystem,
    name: Optional[str] = None,
    unknown_prefix: str = "y",
    unknowns: Optional[Sequence[str]] = None,
    variables: Optional[Sequence[str]] = None
) -> SystemDocument:
    """
    The rref equations of ``S`` as a document

    Args:
        S: The system
        name: Document name (default: the system label)
        unknown_prefix: Prefix for generated unknown names
        unknowns: Explicit unknown names, overriding the prefix
        variables: Explicit variable names (default: x1..xn)
    """
    frame = S.frame
    equations = tuple(Equation(_sorted_terms(frame, combination)) for combination in S.combinations())
    return SystemDocument(
        _document_name(name or S.label or "system"),
        tuple(variables or default_variable_names(S.n)),
        tuple(unknowns or unknown_names(S.m, unknown_prefix)),
        S.order,
        equations,
    )


__all__ = [
    "GRAMMAR",
    "Equation",
    "SystemDocument",
    "get_grammar",
    "parse",
    "print_document",
    "document_from_system",
    "unknown_names",
]
