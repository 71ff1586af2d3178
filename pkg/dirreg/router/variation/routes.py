import typer

from dirreg.exceptions import InstanceError
from dirreg.models.results import Status
from dirreg.router.options import (
    GridScaleOption,
    InstanceOption,
    OutOption,
    SeedOption,
    TolOption,
    execute,
)
from dirreg.router.variation.schemas import DirectionRow, ProbeRow, VariationModulusRow
from dirreg.schemas import VariationSpec
from dirreg.services.runner import Command, Outcome, Overrides, RunContext
from dirreg.services.variation import (
    criterion_probes,
    summarize_probes,
    variation_membership,
    variation_modulus,
)

router = typer.Typer()


def variation(ctx: RunContext) -> Outcome:
    spec = ctx.instance.variation or VariationSpec()
    if spec.v is not None:
        probe = variation_membership(ctx.F, ctx.base, ctx.L, ctx.M, spec.r, spec.v, ctx.probe)
        status = Status.holds if probe.member else Status.fails
        summary = f"v={probe.v} {'is' if probe.member else 'is not'} a member (max residual {probe.max_residual:.3g})"
        return Outcome(ProbeRow, ProbeRow.records(probe), status, summary)
    if spec.c is None:
        raise InstanceError("the variation command needs 'variation.v' or 'variation.c'")

    probes = criterion_probes(ctx.F, ctx.base, ctx.L, ctx.M, spec.r, spec.c, ctx.probe)
    verdict = summarize_probes(ctx.base, spec.r, spec.c, probes)
    rows = [
        DirectionRow(
            v=p.v,
            r=p.r,
            c=spec.c,
            max_residual=p.max_residual,
            tolerance=p.tolerance,
            member=p.member,
        )
        for p in probes
    ]
    summary = f"{sum(p.member for p in probes)}/{len(probes)} directions of {verdict.rate} are members"
    return Outcome(DirectionRow, rows, verdict.status, summary)


def modulus(ctx: RunContext) -> Outcome:
    r = (ctx.instance.variation or VariationSpec()).r
    estimate = variation_modulus(ctx.F, ctx.base, ctx.L, ctx.M, r, ctx.probe, tolerance=ctx.bisection_tol)
    summary = f"variation modulus at rate {r:g} in [{estimate.c_bar_lo:.6g}, {estimate.c_bar_hi:.6g}]"
    return Outcome(VariationModulusRow, VariationModulusRow.trace(estimate), Status.holds, summary)


HANDLERS = {Command.variation: variation, Command.variation_modulus: modulus}


@router.command("variation")
def variation_command(
    instance: InstanceOption,
    out: OutOption,
    tol: TolOption = None,
    grid_scale: GridScaleOption = 1,
    seed_override: SeedOption = None,
):
    """Membership of one direction, or of the scaled unit directions of M, in the r-th variation."""
    overrides = Overrides(tol=tol, grid_scale=grid_scale, seed_override=seed_override)
    execute(Command.variation, variation, instance, out, overrides)


@router.command("variation-modulus")
def variation_modulus_command(
    instance: InstanceOption,
    out: OutOption,
    tol: TolOption = None,
    grid_scale: GridScaleOption = 1,
    seed_override: SeedOption = None,
):
    """Bracket the largest c with c u in the r-th variation for every sampled u."""
    overrides = Overrides(tol=tol, grid_scale=grid_scale, seed_override=seed_override)
    execute(Command.variation_modulus, modulus, instance, out, overrides)
