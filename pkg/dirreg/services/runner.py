import enum
import logging
import time
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

from pydantic import BaseModel

from dirreg.config import BISECTION_TOL
from dirreg.exceptions import InstanceError
from dirreg.models.cones import DirectionSet
from dirreg.models.maps import BasePoint, SetValuedMap
from dirreg.models.neighborhood import NeighborhoodSpec, ProbeSpec
from dirreg.models.rates import RateFunction
from dirreg.models.results import Status
from dirreg.schemas import (
    InstanceFile,
    build_base,
    build_directions,
    build_map,
    build_neighborhood,
    build_probe,
    build_rate,
    parse_text,
)
from dirreg.services.utils.csv_writer import rows_to_csv
from dirreg.services.utils.file_storage import save_text_atomically
from dirreg.services.utils.hashing import instance_digest, seed_from_digest
from dirreg.services.utils.limiter import check_instance_file

logger = logging.getLogger(__name__)


class Command(str, enum.Enum):
    check_open = "check-open"
    check_reg = "check-reg"
    check_cont = "check-cont"
    equivalence = "equivalence"
    estimate_modulus = "estimate-modulus"
    criterion = "criterion"
    variation = "variation"
    variation_modulus = "variation-modulus"
    ekeland = "ekeland"
    refine = "refine"


EXIT_CODES = {Status.holds: 0, Status.fails: 1, Status.inconclusive: 2}


class Overrides(BaseModel):
    tol: float | None = None
    grid_scale: int = 1
    seed_override: int | None = None
    property: str | None = None


@dataclass
class RunContext:
    """A parsed instance plus everything derived from it once."""

    command: Command
    instance: InstanceFile
    digest: str
    base_dir: Path
    overrides: Overrides = field(default_factory=Overrides)

    @property
    def seed(self) -> int:
        if self.overrides.seed_override is not None:
            return self.overrides.seed_override
        return seed_from_digest(self.digest)

    @cached_property
    def F(self) -> SetValuedMap:
        return build_map(self.instance, self.base_dir)

    @cached_property
    def directions(self) -> tuple[DirectionSet, DirectionSet]:
        return build_directions(self.instance)

    @property
    def L(self) -> DirectionSet:
        return self.directions[0]

    @property
    def M(self) -> DirectionSet:
        return self.directions[1]

    @cached_property
    def base(self) -> BasePoint:
        return build_base(self.instance)

    @cached_property
    def rate(self) -> RateFunction:
        return build_rate(self.instance)

    @cached_property
    def neighborhood(self) -> NeighborhoodSpec:
        return build_neighborhood(self.instance, self.seed, self.overrides.tol, self.overrides.grid_scale)

    @cached_property
    def probe(self) -> ProbeSpec:
        probe = build_probe(self.instance, self.overrides.tol)
        for _ in range(self.overrides.grid_scale - 1):
            probe = probe.refined()
        return probe

    @property
    def retries(self) -> int:
        hood = self.instance.neighborhood
        return 0 if hood is None else hood.shrink_retries

    @property
    def bisection_tol(self) -> float:
        return self.instance.tolerances.bisection or BISECTION_TOL

    def tolerance(self, name: str) -> float:
        """`--tol` when given, else the instance's tolerance of that name."""
        if self.overrides.tol is not None:
            return self.overrides.tol
        return float(getattr(self.instance.tolerances, name))


@dataclass
class Outcome:
    row_model: type[BaseModel]
    rows: Sequence[BaseModel]
    status: Status
    summary: str

    @property
    def fieldnames(self) -> list[str]:
        return list(self.row_model.model_fields)


Handler = Callable[[RunContext], Outcome]


class Report(BaseModel):
    command: str
    digest: str
    seed: int
    status: Status
    exit_code: int
    rows: int
    out_path: str
    summary: str
    wall_time: float


class Runner:
    def __init__(self, instance_path: str | Path, out_path: str | Path, overrides: Overrides | None = None):
        self.instance_path = Path(instance_path)
        self.out_path = Path(out_path)
        self.overrides = overrides or Overrides()

    def load(self, command: Command) -> RunContext:
        content = check_instance_file(self.instance_path)
        instance = parse_text(content.decode("utf-8"))
        return RunContext(
            command=command,
            instance=instance,
            digest=instance_digest(content),
            base_dir=self.instance_path.parent,
            overrides=self.overrides,
        )

    def run(self, command: Command, handler: Handler) -> Report:
        if self.overrides.grid_scale < 1:
            raise InstanceError("--grid-scale must be a positive integer")
        started = time.perf_counter()
        context = self.load(command)
        logger.info("%s on %s (digest %s, seed %d)", command.value, self.instance_path, context.digest[:12], context.seed)

        outcome = handler(context)
        # written only once the whole report exists
        save_text_atomically(rows_to_csv(outcome.fieldnames, outcome.rows), self.out_path)

        return Report(
            command=command.value,
            digest=context.digest,
            seed=context.seed,
            status=outcome.status,
            exit_code=EXIT_CODES[outcome.status],
            rows=len(outcome.rows),
            out_path=str(self.out_path),
            summary=outcome.summary,
            wall_time=time.perf_counter() - started,
        )
