"""Experiment configuration: one JSON document describing the system and every subcommand."""

import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveInt
from pydantic import ValidationError as PydanticValidationError

from .engine.ifs import IFS
from .engine.observables import Harmonic, Observable, PiecewiseLinearFn
from .errors import ParseError, ValidationError
from .geometry.homeo import Arnold, Homeo, PiecewiseLinear, Rotation, validate_homeo

logger = logging.getLogger(__name__)


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


# -- maps and observables ------------------------------------------------------


class RotationSpec(_Model):
    type: Literal["rotation"] = "rotation"
    theta: float

    def build(self) -> Homeo:
        return Rotation(self.theta)


class ArnoldSpec(_Model):
    type: Literal["arnold"] = "arnold"
    theta: float
    eps: float

    def build(self) -> Homeo:
        return Arnold(self.theta, self.eps)


class PwlMapSpec(_Model):
    type: Literal["pwl"] = "pwl"
    points: list[tuple[float, float]] = Field(min_length=1)

    def build(self) -> Homeo:
        return PiecewiseLinear(tuple(self.points))


MapSpec = Annotated[Union[RotationSpec, ArnoldSpec, PwlMapSpec], Field(discriminator="type")]


class HarmonicSpec(_Model):
    type: Literal["harmonic"] = "harmonic"
    constant: float = 0.0
    a: list[float] = Field(default_factory=list)
    b: list[float] = Field(default_factory=list)
    lipschitz: Optional[float] = None

    def build(self) -> Observable:
        return Harmonic(self.constant, tuple(self.a), tuple(self.b), self.lipschitz)


class PwlObservableSpec(_Model):
    type: Literal["pwl"] = "pwl"
    points: list[tuple[float, float]] = Field(min_length=1)
    lipschitz: Optional[float] = None

    def build(self) -> Observable:
        return PiecewiseLinearFn(tuple(self.points), self.lipschitz)


ObservableSpec = Annotated[Union[HarmonicSpec, PwlObservableSpec], Field(discriminator="type")]


# -- sections ------------------------------------------------------------------


class Budgets(_Model):
    node_budget: int = 2**24
    atom_cap: int = 10**6
    chi_slack_c: float = 3.0
    validation_grid: int = 1000


class SimulateConfig(_Model):
    x0: float = 0.0
    n: int = Field(1000, ge=0)


class StationaryConfig(_Model):
    x0: float = 0.0
    burn_in: int = Field(1000, ge=0)
    count: PositiveInt = 100000
    thinning: PositiveInt = 1
    atom_window: float = Field(1e-4, gt=0)
    atom_threshold: float = 1e-2


class DualConfig(_Model):
    x: float = 0.0
    n: int = Field(12, ge=0)
    samples: int = Field(10000, ge=2)
    observable: int = Field(0, ge=0)


class EpropConfig(_Model):
    x: float = 0.0
    deltas: list[float] = Field(default_factory=lambda: [0.1, 0.01, 0.001, 0.0001], min_length=1)
    n_max: PositiveInt = 12
    mode: Literal["exact", "mc"] = "exact"
    samples: PositiveInt = 10000
    observable: int = Field(0, ge=0)


class SyncConfig(_Model):
    arc_count: PositiveInt = 16
    arc_length: float = Field(0.1, gt=0, lt=1)
    depth: int = Field(32, ge=8)
    trials: int = Field(2000, ge=100)
    m_max: int = Field(12, ge=0)
    x_grid: PositiveInt = 64
    mc_samples: PositiveInt = 4096
    stationary_count: PositiveInt = 20000
    minimality_x0: float = 0.0
    minimality_depth: int = Field(14, ge=0)
    minimality_eps: float = Field(0.01, gt=0)


class StabilityConfig(_Model):
    x: float = 0.0
    y: float = 0.5
    n_list: list[int] = Field(default_factory=lambda: [0, 1, 2, 5, 10, 20, 50, 100, 200], min_length=1)
    samples: int = Field(4000, ge=1000)


class UniqueConfig(_Model):
    starts: list[float] = Field(default_factory=lambda: [0.0, 0.2, 0.4, 0.6, 0.8], min_length=2)
    n: int = Field(100000, ge=10)
    cesaro_x: float = 0.0
    cesaro_n_list: list[int] = Field(default_factory=lambda: [1, 10, 50, 200], min_length=1)
    cesaro_samples: PositiveInt = 2000
    stationary_count: PositiveInt = 20000


class MWConfig(_Model):
    n_list: list[int] = Field(default_factory=lambda: list(range(1, 19)), min_length=1)
    x_count: PositiveInt = 64
    mode: Literal["exact", "mc"] = "exact"
    mc_samples: PositiveInt = 2000
    stationary_count: PositiveInt = 20000
    x: float = 0.0
    y: float = 0.5
    observable: int = Field(0, ge=0)


class CLTConfig(_Model):
    n_list: list[int] = Field(default_factory=lambda: [1000, 4000], min_length=1)
    replicates: int = Field(2000, ge=100)
    burn_in: int = Field(1000, ge=0)
    x: float = 0.0
    t_list: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0], min_length=1)
    stationary_count: PositiveInt = 20000
    observable: int = Field(0, ge=0)


class CoupleConfig(_Model):
    x: float = 0.0
    y: float = 0.5
    n: PositiveInt = 200
    replicates: PositiveInt = 1000
    tail_horizon: PositiveInt = 64
    denominator: Optional[PositiveInt] = None
    n_list: list[int] = Field(default_factory=lambda: [10, 50, 100, 200], min_length=1)
    beta: float = Field(0.25, gt=0, lt=1)
    l_max: PositiveInt = 20
    observable: int = Field(0, ge=0)


class ChiConfig(_Model):
    inverse_count: PositiveInt = 100000
    burn_in: int = Field(1000, ge=0)
    pairs: PositiveInt = 100
    probes: PositiveInt = 10


class SystemSpec(_Model):
    """A validated system plus the parameters of every subcommand."""

    maps: list[MapSpec] = Field(min_length=1)
    probs: list[float] = Field(min_length=1)
    observables: list[ObservableSpec] = Field(default_factory=lambda: [HarmonicSpec(a=[1.0])], min_length=1)
    budgets: Budgets = Field(default_factory=Budgets)
    simulate: SimulateConfig = Field(default_factory=SimulateConfig)
    stationary: StationaryConfig = Field(default_factory=StationaryConfig)
    dual: DualConfig = Field(default_factory=DualConfig)
    eprop: EpropConfig = Field(default_factory=EpropConfig)
    sync: SyncConfig = Field(default_factory=SyncConfig)
    stability: StabilityConfig = Field(default_factory=StabilityConfig)
    unique: UniqueConfig = Field(default_factory=UniqueConfig)
    mw: MWConfig = Field(default_factory=MWConfig)
    clt: CLTConfig = Field(default_factory=CLTConfig)
    couple: CoupleConfig = Field(default_factory=CoupleConfig)
    chi: ChiConfig = Field(default_factory=ChiConfig)

    def build_ifs(self) -> IFS:
        return IFS(tuple(m.build() for m in self.maps), tuple(self.probs))

    def build_observables(self) -> list[Observable]:
        return [o.build() for o in self.observables]

    def observable(self, index: int) -> Observable:
        if index >= len(self.observables):
            raise ValidationError(f"observable index {index} out of range", invariant="observable_index")
        return self.observables[index].build()


# -- loading and emitting ----------------------------------------------------------


def check_invariants(spec: SystemSpec) -> SystemSpec:
    """Raise ValidationError naming the first invariant the spec breaks."""
    b = spec.budgets
    if min(b.node_budget, b.atom_cap, b.validation_grid) <= 0 or b.chi_slack_c <= 0:
        raise ValidationError("all budgets must be positive", invariant="budget_positive")
    if b.validation_grid < 2:
        raise ValidationError("validation_grid must be at least 2", invariant="budget_positive")
    if len(spec.probs) != len(spec.maps):
        raise ValidationError(f"{len(spec.maps)} maps but {len(spec.probs)} probabilities", invariant="probs_length")
    if any(p <= 0 for p in spec.probs):
        raise ValidationError("probabilities must be strictly positive", invariant="probs_positive")
    total = math.fsum(spec.probs)
    if abs(total - 1.0) > 1e-12:
        raise ValidationError(f"probabilities sum to {total!r}", invariant="probs_sum")
    for i, m in enumerate(spec.maps):
        report = validate_homeo(m.build(), b.validation_grid)
        if not report.passed:
            raise ValidationError(f"map {i} ({m.type}): {report.message}", invariant=f"homeo_valid[{i}]")
    for j, o in enumerate(spec.observables):
        passed, observed = o.build().validate(b.validation_grid)
        if not passed:
            raise ValidationError(
                f"observable {j} changes by slope {observed:.6g} on the grid", invariant=f"observable_lipschitz[{j}]"
            )
    return spec


def parse_config(text: str) -> SystemSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    try:
        spec = SystemSpec.model_validate(data)
    except PydanticValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ParseError(first["msg"], field=field) from exc
    return check_invariants(spec)


def load_config(path: Union[str, Path]) -> SystemSpec:
    """Parse, default and validate a config file."""
    path = Path(path)
    spec = parse_config(path.read_text())
    logger.debug("loaded %s: k=%d, %d observables", path, len(spec.maps), len(spec.observables))
    return spec


def canonical_json(spec: SystemSpec) -> str:
    return json.dumps(spec.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def emit_config(spec: SystemSpec) -> str:
    """The fully defaulted document; ``parse_config`` reads it back to an equal spec."""
    return json.dumps(spec.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def spec_hash(spec: SystemSpec) -> str:
    return hashlib.sha256(canonical_json(spec).encode("utf-8")).hexdigest()
