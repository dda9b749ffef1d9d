"""
Sequence command group: Janet tabulars, bundle rows, compatibility conditions and resolutions
"""
import threading
from typing import Optional, Sequence

from core.deltacohomology import is_involutive
from core.errors import NotInvolutiveError
from core.jetspace import JetFrame, jet_label
from core.sequence import (
    OperatorHandle,
    alternating_sum,
    cc_at_order,
    cc_by_substitution,
    fundamental_diagram,
    generating_conditions,
    janet_bundles_by_dots,
    janet_tabular,
    left_inverse,
    operator_from_rows,
    operator_from_system,
    resolution,
    spencer_bundles,
    spencer_form,
)
from core.system import LinearJetSystem, involutive_completion, prolong
from commands.base import CommandContext, CommandGroup, Report, argument, command
from commands.dsl import print_document, document_from_system
from config import RESOLUTION_BUDGET, RESOLUTION_MAX_STEPS
from utils.logger import logger

ROW_PRINT_LIMIT = 24


def component_names(count: int) -> list[str]:
    """u, v, w for small bundles, f1..fk otherwise"""
    return list("uvw"[:count]) if count <= 3 else [f"f{k + 1}" for k in range(count)]


def format_row(frame: JetFrame, row: dict, names: Sequence[str]) -> str:
    """A sparse row over ``frame`` written as a DSL expression"""
    coords = frame.coordinates
    parts = []
    for i, col in enumerate(sorted(row)):
        value = row[col]
        jet = jet_label(coords[col], names)
        magnitude = abs(value)
        body = jet if magnitude == 1 else f"{magnitude}*{jet}"
        if i == 0:
            parts.append(f"-{body}" if value < 0 else body)
        else:
            parts.append(f"- {body}" if value < 0 else f"+ {body}")
    return " ".join(parts) if parts else "0"


def format_operator(D: OperatorHandle, names: Sequence[str], limit: int = ROW_PRINT_LIMIT) -> Optional[list[str]]:
    if len(D.rows) > limit:
        return None
    return [format_row(D.source, row, names) for row in D.rows]


def document_operator(ctx: CommandContext) -> OperatorHandle:
    """The operator whose rows are the document equations, in document order"""
    doc = ctx.document()
    frame = doc.frame
    rows = [{frame.index(c): v for c, v in eq.terms} for eq in doc.equations]
    return operator_from_rows(frame, rows, doc.name)


def involutive_system(ctx: CommandContext, complete: bool) -> tuple[LinearJetSystem, list[str]]:
    """The input system, completed first when asked and needed"""
    S = ctx.system()
    if is_involutive(S, settings=ctx.settings).holds:
        return S, []
    if not complete:
        raise NotInvolutiveError(f"{S!r} is not involutive; pass --complete or run `complete` first")
    trace = involutive_completion(S, settings=ctx.settings)
    if not trace.completed:
        raise NotInvolutiveError(f"completion of {S!r} stopped: {trace.message}")
    logger.info(f"Completed to order {trace.final.order} before building the diagram")
    return trace.final, [f"completed to order {trace.final.order} "
                         f"({trace.prolongations} prolongations, {trace.projections} projections)"]


class SequenceGroup(CommandGroup):
    """Differential sequences attached to a system"""

    name = "sequence"
    description = "Janet, Spencer and hybrid rows, compatibility conditions, resolutions"

    @command("tabular", "Janet tabular of an involutive system")
    @argument("--complete", action="store_true", help="complete the system first when needed")
    def tabular(self, ctx: CommandContext, args) -> Report:
        S, notes = involutive_system(ctx, args.complete)
        table = janet_tabular(S, ctx.settings.seed, ctx.settings)
        return Report({
            "order": table.order,
            "rows": [f"order {row.order} class {row.cls if row.cls else '-'}: {row.count} x [{row.board()}]"
                     for row in table.rows],
            "counts": list(table.counts),
            "total": table.total,
            "bundles_by_dots": [table.total] + janet_bundles_by_dots(table),
            "notes": notes,
        })

    @command("janet", "Janet row F0..Fn of an involutive system")
    @argument("--complete", action="store_true", help="complete the system first when needed")
    def janet(self, ctx: CommandContext, args) -> Report:
        S, notes = involutive_system(ctx, args.complete)
        diagram = fundamental_diagram(S, ctx.settings.seed, ctx.settings)
        return Report({
            "source_dim": diagram.source_dim,
            "janet": list(diagram.janet),
            "janet_by_dots": list(diagram.janet_by_dots),
            "euler_poincare": diagram.janet_euler_poincare,
            "notes": notes,
        })

    @command("spencer", "Spencer row C0..Cn of an involutive system")
    @argument("--complete", action="store_true", help="complete the system first when needed")
    @argument("--form", action="store_true", help="print the first-order Spencer form instead")
    def spencer(self, ctx: CommandContext, args) -> Report:
        S, notes = involutive_system(ctx, args.complete)
        if args.form:
            form = spencer_form(S)
            text = print_document(document_from_system(form, f"{ctx.document().name}_spencer", unknown_prefix="z"))
            return Report({"unknowns": form.m, "equations": form.rank, "solution_dim": form.solution_dim,
                           "document": text}, document=text)
        row = spencer_bundles(S, ctx.settings)
        return Report({
            "solution_dim": S.solution_dim,
            "spencer": row,
            "euler_poincare": alternating_sum(row, 1),
            "notes": notes,
        })

    @command("diagram", "Spencer, hybrid and Janet rows of the fundamental diagram")
    def diagram(self, ctx: CommandContext, args) -> Report:
        S, notes = involutive_system(ctx, True)
        diagram = fundamental_diagram(S, ctx.settings.seed, ctx.settings)
        return Report({
            "order": S.order,
            "source_dim": diagram.source_dim,
            "solution_dim": diagram.solution_dim,
            "spencer": list(diagram.spencer),
            "hybrid": list(diagram.hybrid),
            "janet": list(diagram.janet),
            "janet_by_dots": list(diagram.janet_by_dots),
            "euler_poincare": {
                "spencer": diagram.spencer_euler_poincare,
                "hybrid": diagram.hybrid_euler_poincare,
                "janet": diagram.janet_euler_poincare,
            },
            "notes": notes,
        })

    @command("cc", "Compatibility conditions of the operator given by the equations")
    @argument("--order", type=int, default=None, help="report the CC space at this order only")
    @argument("--budget", type=int, default=RESOLUTION_BUDGET, help="highest CC order scanned")
    @argument("--substitute", action="store_true", help="derive CC from a left inverse instead")
    def cc(self, ctx: CommandContext, args) -> Report:
        D = document_operator(ctx)
        names = component_names(D.target_dim)
        if args.substitute:
            inverse = left_inverse(D)
            if inverse is None:
                return Report({"left_inverse": None, "message": "no left inverse within budget"}, ok=False)
            substituted = cc_by_substitution(D, inverse)
            return Report({
                "left_inverse_order": inverse.order,
                "left_inverse": format_operator(inverse.operator, names),
                "cc_order": substituted.order,
                "cc": format_operator(substituted, names),
            })
        if args.order is not None:
            known = generating_conditions(D, args.order - 1, limit=args.order - 1,
                                          settings=ctx.settings).conditions if args.order > 1 else ()
            found = cc_at_order(D, args.order, known, ctx.settings)
            return Report({
                "order": found.order,
                "relations": found.cokernel_dim,
                "from_lower_orders": found.known_rank,
                "new": found.count,
                "cc": [format_row(found.frame, row, names) for row in found.rows[:ROW_PRINT_LIMIT]],
            })
        scan = generating_conditions(D, args.budget, settings=ctx.settings)
        return Report({
            "orders": [cc.order for cc in scan.conditions],
            "counts": [cc.count for cc in scan.conditions],
            "total": scan.count,
            "scanned_to": scan.scanned_to,
            "cc": [format_row(cc.frame, row, names) for cc in scan.conditions for row in cc.rows][:ROW_PRINT_LIMIT],
        })

    @command("resolve", "Chain generating compatibility conditions into a resolution")
    @argument("--budget", type=int, default=RESOLUTION_BUDGET, help="highest CC order scanned per step")
    @argument("--max-steps", type=int, default=RESOLUTION_MAX_STEPS, help="most operators after the first")
    @argument("--from-order", type=int, default=None, help="prolong the system to this order first")
    @argument("--timeout", type=float, default=None, help="cancel after this many seconds")
    def resolve(self, ctx: CommandContext, args) -> Report:
        if args.from_order is not None:
            S = ctx.system()
            if args.from_order < S.order:
                raise ValueError(f"--from-order {args.from_order} is below the system order {S.order}")
            D = operator_from_system(prolong(S, args.from_order - S.order), ctx.document().name)
        else:
            D = document_operator(ctx)
        cancel_event = threading.Event()
        timer = threading.Timer(args.timeout, cancel_event.set) if args.timeout else None
        if timer:
            timer.start()
        try:
            report = resolution(D, args.budget, args.max_steps, cancel_event, ctx.settings)
        finally:
            if timer:
                timer.cancel()
        return Report({
            "bundles": list(report.bundles),
            "orders": list(report.orders),
            "chain": report.chain(),
            "raw_targets": [step.raw_dim for step in report.steps],
            "completed_targets": [step.target_dim for step in report.steps],
            "euler_poincare": report.euler_poincare,
            "complete": report.complete,
            "message": report.message,
            "notes": list(report.notes),
        }, ok=report.complete)
