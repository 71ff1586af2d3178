import typer

from dirreg.models.results import Status
from dirreg.router.coderiv.schemas import CriterionRow
from dirreg.router.options import (
    GridScaleOption,
    InstanceOption,
    OutOption,
    SeedOption,
    TolOption,
    execute,
)
from dirreg.schemas import CriterionSpec
from dirreg.services.coderiv import check_criterion, criterion_bracket
from dirreg.services.runner import Command, Outcome, Overrides, RunContext

router = typer.Typer()


def criterion(ctx: RunContext) -> Outcome:
    spec = ctx.instance.criterion or CriterionSpec()
    if spec.c is None:
        bracket = criterion_bracket(ctx.F, ctx.base, ctx.L, ctx.M, ctx.neighborhood)
        rows = CriterionRow.records("below", bracket.below)
        if bracket.above is not None:
            rows += CriterionRow.records("above", bracket.above)
        estimate = bracket.estimate
        summary = (
            f"openness bracket [{estimate.c_lo:.6g}, {estimate.c_hi:.6g}], "
            f"criterion {'consistent' if bracket.consistent else 'inconsistent'} with it"
        )
        return Outcome(CriterionRow, rows, Status.holds if bracket.consistent else Status.fails, summary)

    rho = spec.rho or ctx.neighborhood.rho_x
    report = check_criterion(
        ctx.F,
        ctx.base,
        ctx.L,
        ctx.M,
        spec.c,
        rho,
        density=spec.density,
        y_count=spec.y_count,
        tolerance=ctx.tolerance("criterion"),
    )
    status = Status.holds if report.passed else Status.fails
    summary = f"c={spec.c:g}: min slack {report.min_slack:.6g} over {len(report.records)} records"
    return Outcome(CriterionRow, CriterionRow.records("at", report), status, summary)


HANDLERS = {Command.criterion: criterion}


@router.command("criterion")
def criterion_command(
    instance: InstanceOption,
    out: OutOption,
    tol: TolOption = None,
    grid_scale: GridScaleOption = 1,
    seed_override: SeedOption = None,
):
    """Coderivative criterion for directional openness of a polyhedral map."""
    overrides = Overrides(tol=tol, grid_scale=grid_scale, seed_override=seed_override)
    execute(Command.criterion, criterion, instance, out, overrides)
