"""
Cohomology command group: delta complexes, acyclicity and involution tests
"""
from core.deltacohomology import cartan_test, delta_complex_report, is_involutive, is_s_acyclic
from commands.base import CommandContext, CommandGroup, Report, argument, command
from config import ACYCLICITY_BOUND


class CohomologyGroup(CommandGroup):
    """Spencer delta-cohomology of the symbol"""

    name = "cohomology"
    description = "Delta cohomology, s-acyclicity and involutivity"

    @command("delta", "Dimensions and cohomology of the delta complexes of the symbol")
    @argument("--levels", type=int, default=1, help="prolongation levels above the order (default: 1)")
    def delta(self, ctx: CommandContext, args) -> Report:
        S = ctx.system()
        report = delta_complex_report(S, args.levels, ctx.settings)
        slots = {}
        for slot in report.slots:
            slots[f"H^{slot.s}(g_{slot.level})"] = slot.cohomology
        return Report({
            "order": report.order,
            "dims": {f"L^{slot.s} x g_{slot.level}": slot.dim for slot in report.slots},
            "cohomology": slots,
        })

    @command("acyclic", "Check that H^1..H^s of the symbol vanish")
    @argument("--degree", "-s", dest="degree", type=int, default=2, help="highest degree s (default: 2)")
    @argument("--bound", type=int, default=ACYCLICITY_BOUND, help="levels checked above the start")
    @argument("--start", type=int, default=None, help="first level (default: the system order)")
    def acyclic(self, ctx: CommandContext, args) -> Report:
        S = ctx.system()
        verdict = is_s_acyclic(S, args.degree, args.bound, args.start, ctx.settings)
        return Report({
            "s": verdict.s,
            "start_level": verdict.start_level,
            "acyclic": verdict.holds,
            "certified": verdict.certified,
            "failing_level": verdict.failing[0] if verdict.failing else None,
            "zero_level": verdict.zero_level,
            "verdict": verdict.describe(),
        })

    @command("involution", "Involutivity by the delta route and by Cartan's test")
    @argument("--bound", type=int, default=ACYCLICITY_BOUND, help="levels checked above the order")
    def involution(self, ctx: CommandContext, args) -> Report:
        S = ctx.system()
        verdict = is_involutive(S, args.bound, ctx.settings)
        report = cartan_test(S, seed=ctx.settings.seed, settings=ctx.settings)
        change = report.coordinate_change.to_rows() if report.coordinate_change is not None else None
        return Report({
            "involutive": verdict.holds,
            "delta": verdict.describe(),
            "cartan": report.verdict,
            "characters": list(report.characters),
            "next_symbol_dim": report.next_symbol_dim,
            "cartan_sum": report.cartan_sum,
            "coordinate_change": change,
        })
