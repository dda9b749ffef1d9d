"""
Check command group: the built-in acceptance suite
"""
import time
from dataclasses import dataclass
from typing import Any, Callable

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
from core.deltacohomology import is_s_acyclic
from core.errors import JetKitError
from core.sequence import (
    fundamental_diagram,
    generating_conditions,
    hybrid_first_slot,
    operator_from_system,
    resolution,
)
from core.system import involutive_completion, is_formally_integrable, prolong, prolonged_dimension, symbol_dimension
from core.vector_fields import polynomial_solutions
from commands.base import CommandContext, CommandGroup, Report, argument, command
from utils.logger import logger


@dataclass(frozen=True)
class CheckItem:
    name: str
    run: Callable[[Any], tuple[Any, Any]]  # settings -> (expected, actual)
    slow: bool = False


# ============================================================================
# ACCEPTANCE ITEMS
# ============================================================================

def _killing3(settings):
    S = killing_flat(FlatMetric.euclidean(3))
    scan = generating_conditions(operator_from_system(S), settings=settings)
    actual = (symbol_dimension(S, 1, settings), symbol_dimension(S, 2, settings),
              is_formally_integrable(S, 4, settings).holds, scan.order, scan.count)
    return (3, 0, True, 2, killing_cc_dims(3)[0]), actual


def _killing4(settings):
    report = resolution(operator_from_system(killing_flat(FlatMetric.euclidean(4))), max_steps=2, settings=settings)
    return ((4, 10, 20, 20), (1, 2, 1)), (report.bundles[:4], report.orders[:3])


def _conformal_symbols(settings):
    actual = []
    for n, s, expected in ((3, 2, False), (4, 2, True), (5, 3, True)):
        S = conformal_killing_flat(FlatMetric.euclidean(n))
        actual.append((symbol_dimension(S, 3, settings),
                       is_s_acyclic(S, s, start_level=2, settings=settings).holds))
    return [(0, False), (0, True), (0, True)], actual


def _conformal3_resolution(settings):
    report = resolution(operator_from_system(conformal_killing_flat(FlatMetric.euclidean(3))), settings=settings)
    return ((3, 5, 5, 3), (1, 3, 1)), (report.bundles, report.orders)


def _conformal4_resolution(settings):
    report = resolution(operator_from_system(conformal_killing_flat(FlatMetric.euclidean(4))), settings=settings)
    return ((4, 9, 10, 9, 4), (1, 2, 2, 1)), (report.bundles, report.orders)


def _macaulay(settings):
    S = macaulay()
    dims = tuple(prolonged_dimension(S, r, settings) for r in range(3))
    acyclic = (is_s_acyclic(S, 2, start_level=3, settings=settings).holds,
               is_s_acyclic(S, 3, start_level=3, settings=settings).holds)
    diagram = fundamental_diagram(prolong(S, 2), settings.seed, settings)
    slot = hybrid_first_slot(3, 1, 4, settings)
    actual = (dims, acyclic, diagram.spencer, diagram.hybrid, diagram.janet,
              (slot.next_jets, slot.first_jets, slot.quotient))
    expected = ((7, 8, 8), (True, False), (8, 24, 24, 8), (35, 84, 70, 20), (27, 60, 46, 12), (56, 140, 84))
    return expected, actual


def _macaulay_chain(settings):
    report = resolution(operator_from_system(prolong(macaulay(), 1)), settings=settings)
    return ((1, 12, 21, 46, 72, 48, 12), (3, 1, 2, 1, 1, 1), 0), \
        (report.bundles, report.orders, report.euler_poincare)


def _vanishing_pair(settings):
    S = vanishing_pair()
    dims = tuple(prolonged_dimension(S, r, settings) for r in range(6))
    scan = generating_conditions(vanishing_pair_operator(), settings=settings)
    trace = involutive_completion(S, settings=settings)
    return ((4,) * 6, (2,), 1, 0), (dims, tuple(cc.order for cc in scan.conditions), scan.count,
                                     trace.final.solution_dim)


def _diagrams(settings):
    actual = []
    for S in (conformal_n1(), conformal_n2(), conformal_killing_flat(FlatMetric.euclidean(3))):
        trace = involutive_completion(S, settings=settings)
        d = fundamental_diagram(trace.final, settings.seed, settings)
        actual.append((d.spencer, d.hybrid, d.janet))
    expected = [
        ((3, 3), (4, 3), (1, 0)),
        ((6, 12, 6), (20, 30, 12), (14, 18, 6)),
        ((10, 30, 30, 10), (60, 135, 108, 30), (50, 105, 78, 20)),
    ]
    return expected, actual


def _solutions(settings):
    systems = [conformal_n1(), conformal_n2(), conformal_killing_flat(FlatMetric.euclidean(3))]
    return [3, 6, 10], [polynomial_solutions(S, 2).dimension for S in systems]


def _solutions_n4(settings):
    return 15, polynomial_solutions(conformal_killing_flat(FlatMetric.euclidean(4)), 2).dimension


CHECKS = [
    CheckItem("killing n=3: symbol, FI, CC", _killing3),
    CheckItem("killing n=4: resolution prefix", _killing4, slow=True),
    CheckItem("conformal symbols n=3,4,5", _conformal_symbols),
    CheckItem("conformal n=3 resolution", _conformal3_resolution, slow=True),
    CheckItem("conformal n=4 resolution", _conformal4_resolution, slow=True),
    CheckItem("macaulay: dims, acyclicity, diagram, hybrid slot", _macaulay),
    CheckItem("macaulay order-3 chain", _macaulay_chain, slow=True),
    CheckItem("vanishing pair: dims, CC, completion", _vanishing_pair),
    CheckItem("fundamental diagrams n=1,2,3", _diagrams),
    CheckItem("polynomial solutions n=1,2,3", _solutions),
    CheckItem("polynomial solutions n=4", _solutions_n4, slow=True),
]


def _normalize(value):
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    return value


class CheckGroup(CommandGroup):
    """Acceptance suite"""

    name = "check"
    description = "Run the built-in acceptance suite"

    @command("check", "Run the acceptance suite; exits nonzero on any mismatch", reads_system=False)
    @argument("--quick", action="store_true", help="skip the slow items")
    def check(self, ctx: CommandContext, args) -> Report:
        lines = []
        failed = skipped = 0
        for item in CHECKS:
            if args.quick and item.slow:
                skipped += 1
                lines.append(f"⏭️ {item.name} (slow, skipped)")
                continue
            started = time.monotonic()
            try:
                expected, actual = item.run(ctx.settings)
                passed = _normalize(expected) == _normalize(actual)
                detail = "" if passed else f": expected {expected}, got {actual}"
            except JetKitError as e:
                passed, detail = False, f": {e.code}: {e}"
            elapsed = time.monotonic() - started
            logger.info(f"Check '{item.name}' {'passed' if passed else 'failed'} in {elapsed:.1f}s")
            if not passed:
                failed += 1
            lines.append(f"{'✅' if passed else '❌'} {item.name}{detail}")
        ran = len(CHECKS) - skipped
        return Report({
            "items": lines,
            "passed": ran - failed,
            "failed": failed,
            "skipped": skipped,
        }, ok=failed == 0)
