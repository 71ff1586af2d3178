import typer

from dirreg.exceptions import InstanceError
from dirreg.models.cones import PolyhedralCone
from dirreg.models.results import RefinementStatus, Status
from dirreg.router.ekeland.schemas import PathRow, RefineRow
from dirreg.router.options import (
    GridScaleOption,
    InstanceOption,
    OutOption,
    SeedOption,
    TolOption,
    execute,
)
from dirreg.schemas import ekeland_points
from dirreg.services.ekeland import EkelandInstance, directional_ekeland, refine_preimage
from dirreg.services.runner import Command, Outcome, Overrides, RunContext

router = typer.Typer()

REFINE_STATUS = {
    RefinementStatus.converged: Status.holds,
    RefinementStatus.extrapolated: Status.inconclusive,
    RefinementStatus.failed: Status.fails,
}


def ekeland(ctx: RunContext) -> Outcome:
    spec = ctx.instance.ekeland
    points, values = ekeland_points(ctx.instance, ctx.base_dir)
    assert spec is not None
    inst = EkelandInstance.of(points, values, ctx.instance.dimensions.n, spec.start, spec.epsilon, ctx.L, ctx.M)
    result = directional_ekeland(inst)
    rows = []
    for step, index in enumerate(result.path):
        point = inst.points[index]
        rows.append(
            PathRow(
                step=step,
                index=index,
                x=point[: inst.n].tolist(),
                y=point[inst.n:].tolist(),
                value=float(inst.values[index]),
                epsilon=inst.epsilon,
                final=index == result.index,
            )
        )
    summary = f"point {result.index} (f={result.value:.6g}) after {len(result.path) - 1} moves"
    return Outcome(PathRow, rows, Status.holds, summary)


def refine(ctx: RunContext) -> Outcome:
    spec = ctx.instance.refine
    if spec is None:
        raise InstanceError("this command needs a 'refine' section")
    n = ctx.instance.dimensions.n
    C = spec.cone.cone(n) if spec.cone is not None else PolyhedralCone.full(n)
    x = spec.x if spec.x is not None else ctx.base.x
    y = spec.y if spec.y is not None else ctx.base.y
    trace = refine_preimage(
        ctx.F,
        x,
        y,
        spec.y_target,
        C,
        spec.K.build(),
        spec.r,
        spec.alpha,
        spec.t,
        tol=ctx.tolerance("refine"),
        max_iterations=spec.max_iterations,
    )
    summary = f"{trace.status.value} after {len(trace.steps)} steps, path length {trace.total_length:.6g}"
    return Outcome(RefineRow, RefineRow.trace(trace), REFINE_STATUS[trace.status], summary)


HANDLERS = {Command.ekeland: ekeland, Command.refine: refine}


@router.command("ekeland")
def ekeland_command(
    instance: InstanceOption,
    out: OutOption,
    tol: TolOption = None,
    grid_scale: GridScaleOption = 1,
    seed_override: SeedOption = None,
):
    """Directional Ekeland point of a finite set, with its descent path."""
    overrides = Overrides(tol=tol, grid_scale=grid_scale, seed_override=seed_override)
    execute(Command.ekeland, ekeland, instance, out, overrides)


@router.command("refine")
def refine_command(
    instance: InstanceOption,
    out: OutOption,
    tol: TolOption = None,
    grid_scale: GridScaleOption = 1,
    seed_override: SeedOption = None,
):
    """Iterative preimage refinement towards y_target."""
    overrides = Overrides(tol=tol, grid_scale=grid_scale, seed_override=seed_override)
    execute(Command.refine, refine, instance, out, overrides)
