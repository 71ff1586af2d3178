import typer

from dirreg.models.results import Property, Status
from dirreg.router.options import (
    GridScaleOption,
    InstanceOption,
    OutOption,
    SeedOption,
    TolOption,
    execute,
)
from dirreg.router.wellposed.schemas import EquivalenceRow, ModulusRow, VerdictRow
from dirreg.services.runner import Command, Outcome, Overrides, RunContext
from dirreg.services.wellposed import (
    check_continuity,
    check_openness,
    check_regularity,
    equivalence_harness,
    estimate_modulus,
)

router = typer.Typer()


def check_open(ctx: RunContext) -> Outcome:
    verdict = check_openness(ctx.F, ctx.base, ctx.L, ctx.M, ctx.rate, ctx.neighborhood, ctx.retries)
    return Outcome(VerdictRow, [VerdictRow.of(verdict)], verdict.status, f"open with {verdict.rate}")


def check_reg(ctx: RunContext) -> Outcome:
    verdict = check_regularity(ctx.F, ctx.base, ctx.L, ctx.M, ctx.rate, ctx.neighborhood, ctx.retries)
    return Outcome(VerdictRow, [VerdictRow.of(verdict)], verdict.status, f"regular with {verdict.rate}")


def check_cont(ctx: RunContext) -> Outcome:
    verdict = check_continuity(ctx.F, ctx.base, ctx.L, ctx.M, ctx.rate, ctx.neighborhood, ctx.retries)
    return Outcome(VerdictRow, [VerdictRow.of(verdict)], verdict.status, f"continuous with {verdict.rate}")


def equivalence(ctx: RunContext) -> Outcome:
    report = equivalence_harness(ctx.F, ctx.base, ctx.L, ctx.M, ctx.rate, ctx.neighborhood, ctx.retries)
    rows = [
        EquivalenceRow(
            **VerdictRow.of(v).model_dump(),
            agree=report.agree,
            conclusive=report.conclusive,
            rate_note=report.rate_note,
        )
        for v in report.verdicts()
    ]
    if not report.agree:
        status = Status.fails
    elif not report.conclusive:
        status = Status.inconclusive
    else:
        status = Status.holds
    summary = "verdicts " + "/".join(v.status.value for v in report.verdicts())
    return Outcome(EquivalenceRow, rows, status, summary)


def modulus(ctx: RunContext) -> Outcome:
    spec = ctx.instance.modulus
    prop = Property(ctx.overrides.property or (spec.property if spec else "open"))
    if spec is not None and spec.r is not None:
        r = spec.r
    elif ctx.instance.rate is not None:
        r = ctx.instance.rate.r
    else:
        r = 1.0
    estimate = estimate_modulus(
        prop, ctx.F, ctx.base, ctx.L, ctx.M, r, ctx.neighborhood, tolerance=ctx.bisection_tol, retries=ctx.retries
    )
    summary = f"{prop.value} modulus at rate {r:g} in [{estimate.c_lo:.6g}, {estimate.c_hi:.6g}]"
    return Outcome(ModulusRow, ModulusRow.trace(estimate), Status.holds, summary)


HANDLERS = {
    Command.check_open: check_open,
    Command.check_reg: check_reg,
    Command.check_cont: check_cont,
    Command.equivalence: equivalence,
    Command.estimate_modulus: modulus,
}


def _overrides(tol, grid_scale, seed_override, prop=None) -> Overrides:
    return Overrides(tol=tol, grid_scale=grid_scale, seed_override=seed_override, property=prop)


@router.command("check-open")
def check_open_command(
    instance: InstanceOption,
    out: OutOption,
    tol: TolOption = None,
    grid_scale: GridScaleOption = 1,
    seed_override: SeedOption = None,
):
    """Directional phi-openness on the instance grid."""
    execute(Command.check_open, check_open, instance, out, _overrides(tol, grid_scale, seed_override))


@router.command("check-reg")
def check_reg_command(
    instance: InstanceOption,
    out: OutOption,
    tol: TolOption = None,
    grid_scale: GridScaleOption = 1,
    seed_override: SeedOption = None,
):
    """Directional regularity, with the instance rate read as psi."""
    execute(Command.check_reg, check_reg, instance, out, _overrides(tol, grid_scale, seed_override))


@router.command("check-cont")
def check_cont_command(
    instance: InstanceOption,
    out: OutOption,
    tol: TolOption = None,
    grid_scale: GridScaleOption = 1,
    seed_override: SeedOption = None,
):
    """Directional continuity, with the instance rate read as psi."""
    execute(Command.check_cont, check_cont, instance, out, _overrides(tol, grid_scale, seed_override))


@router.command("equivalence")
def equivalence_command(
    instance: InstanceOption,
    out: OutOption,
    tol: TolOption = None,
    grid_scale: GridScaleOption = 1,
    seed_override: SeedOption = None,
):
    """Openness, regularity and inverse continuity side by side."""
    execute(Command.equivalence, equivalence, instance, out, _overrides(tol, grid_scale, seed_override))


@router.command("estimate-modulus")
def estimate_modulus_command(
    instance: InstanceOption,
    out: OutOption,
    tol: TolOption = None,
    grid_scale: GridScaleOption = 1,
    seed_override: SeedOption = None,
    prop: str = typer.Option(None, "--property", help="open, regular or continuous"),
):
    """Bracket the modulus c of phi(t) = c t^r by bisection."""
    if prop is not None and prop not in {p.value for p in Property}:
        raise typer.BadParameter(f"unknown property {prop!r}", param_hint="--property")
    execute(Command.estimate_modulus, modulus, instance, out, _overrides(tol, grid_scale, seed_override, prop))
