"""
System command group: dimensions, prolongation, projection, symbols, completion, solutions
"""
from core.jetspace import dim_jet, dim_symbol, jet_label
from core.system import (
    involutive_completion,
    parametric_jets,
    project,
    projected_dimension,
    prolong,
    prolonged_dimension,
    symbol_at,
    symbol_dimension,
)
from core.vector_fields import polynomial_solutions
from commands.base import CommandContext, CommandGroup, Report, argument, command
from config import COMPLETION_MAX_STEPS
from utils.logger import logger

PARAMETRIC_LIST_LIMIT = 64


class SystemGroup(CommandGroup):
    """Commands that inspect or transform a single system"""

    name = "system"
    description = "Dimensions, prolongations, projections and symbols"

    @command("dims", "Jet, solution and symbol dimensions at successive orders")
    @argument("--levels", type=int, default=3, help="prolongation levels to report (default: 3)")
    def dims(self, ctx: CommandContext, args) -> Report:
        doc = ctx.document()
        S = doc.to_system()
        levels = range(args.levels + 1)
        payload = {
            "system": doc.name,
            "n": S.n,
            "m": S.m,
            "q": S.order,
            "equations": S.rank,
            "orders": [S.order + r for r in levels],
            "jet_dims": [dim_jet(S.n, S.m, S.order + r) for r in levels],
            "solution_dims": [prolonged_dimension(S, r, ctx.settings) for r in levels],
            "projected_dims": [projected_dimension(S, r, ctx.settings) for r in levels],
            "symbol_dims": [symbol_dimension(S, S.order + r, ctx.settings) for r in levels],
        }
        params = parametric_jets(S)
        if len(params) <= PARAMETRIC_LIST_LIMIT:
            payload["parametric_jets"] = [jet_label(c, doc.unknowns) for c in params]
        return Report(payload)

    @command("prolong", "Prolong the system and print it")
    @argument("--by", type=int, default=1, help="number of prolongations (default: 1)")
    def prolong(self, ctx: CommandContext, args) -> Report:
        doc = ctx.document()
        P = prolong(doc.to_system(), args.by)
        text = ctx.render(P, f"{doc.name}_prolonged{args.by}")
        return Report({"order": P.order, "equations": P.rank, "solution_dim": P.solution_dim,
                       "document": text}, document=text)

    @command("project", "Project the system to a lower order and print it")
    @argument("--to", dest="target", type=int, required=True, help="target order")
    def project(self, ctx: CommandContext, args) -> Report:
        doc = ctx.document()
        P = project(doc.to_system(), args.target)
        text = ctx.render(P, f"{doc.name}_projected{args.target}")
        return Report({"order": P.order, "equations": P.rank, "solution_dim": P.solution_dim,
                       "document": text}, document=text)

    @command("symbol", "Dimension of the symbol at a level")
    @argument("--level", type=int, default=None, help="symbol level (default: the system order)")
    @argument("--levels", type=int, default=3, help="further levels listed after it (default: 3)")
    def symbol(self, ctx: CommandContext, args) -> Report:
        S = ctx.system()
        level = S.order if args.level is None else args.level
        g = symbol_at(S, level)
        following = [symbol_dimension(S, level + r, ctx.settings) for r in range(args.levels + 1)]
        zero_at = next((level + r for r, d in enumerate(following) if d == 0), None)
        return Report({
            "level": level,
            "dim": g.dim,
            "ambient_dim": dim_symbol(S.n, S.m, level),
            "levels": [level + r for r in range(args.levels + 1)],
            "dims": following,
            "finite_type_at": zero_at,
        })

    @command("complete", "Prolong and project until involutive")
    @argument("--max-steps", type=int, default=COMPLETION_MAX_STEPS, help="step budget")
    @argument("--emit-system", action="store_true", help="print the completed system instead of the trace")
    def complete(self, ctx: CommandContext, args) -> Report:
        doc = ctx.document()
        trace = involutive_completion(doc.to_system(), args.max_steps, ctx.settings)
        final = trace.final
        text = ctx.render(final, f"{doc.name}_completed")
        payload = {
            "completed": trace.completed,
            "message": trace.message,
            "prolongations": trace.prolongations,
            "projections": trace.projections,
            "steps": [f"{s.operation} -> order {s.order}: dim R = {s.solution_dim}, dim g = {s.symbol_dim}"
                      for s in trace.steps],
            "final_order": final.order,
            "final_solution_dim": final.solution_dim,
        }
        if args.emit_system:
            payload["document"] = text
            return Report(payload, document=text, ok=trace.completed)
        if not trace.completed:
            logger.warning(f"Completion of {doc.name} stopped: {trace.message}")
        return Report(payload, ok=trace.completed)

    @command("solve", "Polynomial solutions up to a degree")
    @argument("--degree", type=int, default=2, help="degree bound (default: 2)")
    def solve(self, ctx: CommandContext, args) -> Report:
        solutions = polynomial_solutions(ctx.system(), args.degree)
        return Report({
            "degree": solutions.degree,
            "dimension": solutions.dimension,
            "certified": solutions.certified,
            "fields": [str(f) for f in solutions.fields],
        })
