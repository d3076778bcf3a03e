"""Lipschitz observables on the circle."""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import ClassVar, Optional

import numpy as np

from ..geometry.circle import wrap

logger = logging.getLogger(__name__)


class Observable(ABC):
    """A function phi on the circle evaluated as phi(x) - offset.

    Subclasses are frozen dataclasses that carry ``offset``, ``lipschitz`` and
    ``centering_error`` fields.
    """

    kind: ClassVar[str] = "observable"

    @abstractmethod
    def raw(self, x) -> np.ndarray:
        """phi before the centering offset, on an array of circle coordinates."""

    @abstractmethod
    def raw_sup(self) -> float:
        """Upper bound on |phi - offset| computed from the parameters."""

    @abstractmethod
    def describe(self) -> dict:
        """Tagged record as it appears in config files."""

    def evaluate(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = self.raw(np.atleast_1d(x_arr)) - self.offset
        return out if x_arr.ndim else float(out[0])

    def __call__(self, x):
        return self.evaluate(x)

    def sup_norm(self) -> float:
        return self.raw_sup()

    def centered(self, offset: float, centering_error: float = 0.0) -> "Observable":
        return replace(self, offset=float(offset), centering_error=float(centering_error))

    @abstractmethod
    def scaled(self, factor: float) -> "Observable":
        """factor * (phi - offset), with the Lipschitz constant scaled to match."""

    def validate(self, grid_n: int = 1000) -> tuple[bool, float]:
        """Check |phi(x) - phi(y)| <= L d(x, y) on neighbouring grid points.

        Returns (passed, observed slope).
        """
        t = np.arange(grid_n + 1) / grid_n
        values = self.raw(t)
        observed = float(np.max(np.abs(np.diff(values)))) * grid_n
        passed = observed <= self.lipschitz * (1.0 + 1e-9) + 1e-12
        return passed, observed


@dataclass(frozen=True)
class Harmonic(Observable):
    """constant + sum_j a_j cos(2 pi j x) + b_j sin(2 pi j x), j = 1..J."""

    constant: float = 0.0
    a: tuple[float, ...] = ()
    b: tuple[float, ...] = ()
    lipschitz: Optional[float] = None
    offset: float = 0.0
    centering_error: float = 0.0
    kind: ClassVar[str] = "harmonic"

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        width = max(len(a), len(b))
        a = a + (0.0,) * (width - len(a))
        b = b + (0.0,) * (width - len(b))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.lipschitz is None:
            bound = 2 * math.pi * sum(j * math.hypot(aj, bj) for j, (aj, bj) in enumerate(zip(a, b), start=1))
            object.__setattr__(self, "lipschitz", bound)

    def raw(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.constant, dtype=float)
        for j, (aj, bj) in enumerate(zip(self.a, self.b), start=1):
            if aj:
                out = out + aj * np.cos(2 * np.pi * j * x)
            if bj:
                out = out + bj * np.sin(2 * np.pi * j * x)
        return out

    def raw_sup(self) -> float:
        return abs(self.constant - self.offset) + sum(math.hypot(aj, bj) for aj, bj in zip(self.a, self.b))

    def scaled(self, factor: float) -> "Harmonic":
        return replace(
            self,
            constant=self.constant * factor,
            a=tuple(v * factor for v in self.a),
            b=tuple(v * factor for v in self.b),
            lipschitz=self.lipschitz * abs(factor),
            offset=self.offset * factor,
            centering_error=self.centering_error * abs(factor),
        )

    def describe(self) -> dict:
        return {
            "type": "harmonic",
            "constant": self.constant,
            "a": list(self.a),
            "b": list(self.b),
            "lipschitz": self.lipschitz,
        }


@dataclass(frozen=True)
class PiecewiseLinearFn(Observable):
    """Periodic linear interpolation through (x, value) breakpoints."""

    points: tuple[tuple[float, float], ...] = ((0.0, 0.0),)
    lipschitz: Optional[float] = None
    offset: float = 0.0
    centering_error: float = 0.0
    kind: ClassVar[str] = "pwl"

    def __post_init__(self):
        if not self.points:
            raise ValueError("PiecewiseLinearFn needs at least one breakpoint")
        pts = tuple(sorted((wrap(float(x)), float(v)) for x, v in self.points))
        object.__setattr__(self, "points", pts)
        if self.lipschitz is None:
            xs, ys = self._nodes()
            dx = np.diff(xs)
            slopes = np.abs(np.diff(ys))[dx > 0] / dx[dx > 0]
            object.__setattr__(self, "lipschitz", float(slopes.max()) if slopes.size else 0.0)

    def _nodes(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.array([p[0] for p in self.points])
        v = np.array([p[1] for p in self.points])
        return np.concatenate([[x[-1] - 1.0], x, [x[0] + 1.0]]), np.concatenate([[v[-1]], v, [v[0]]])

    def raw(self, x):
        xs, ys = self._nodes()
        return np.interp(wrap(np.atleast_1d(np.asarray(x, dtype=float))), xs, ys)

    def raw_sup(self) -> float:
        return max(abs(v - self.offset) for _, v in self.points)

    def scaled(self, factor: float) -> "PiecewiseLinearFn":
        return replace(
            self,
            points=tuple((x, v * factor) for x, v in self.points),
            lipschitz=self.lipschitz * abs(factor),
            offset=self.offset * factor,
            centering_error=self.centering_error * abs(factor),
        )

    def describe(self) -> dict:
        return {"type": "pwl", "points": [list(p) for p in self.points], "lipschitz": self.lipschitz}


def observable_from_record(record: dict) -> Observable:
    kind = record.get("type")
    lipschitz = record.get("lipschitz")
    if kind == "harmonic":
        return Harmonic(
            constant=float(record.get("constant", 0.0)),
            a=tuple(record.get("a", ())),
            b=tuple(record.get("b", ())),
            lipschitz=None if lipschitz is None else float(lipschitz),
        )
    if kind == "pwl":
        return PiecewiseLinearFn(
            points=tuple((float(x), float(v)) for x, v in record["points"]),
            lipschitz=None if lipschitz is None else float(lipschitz),
        )
    raise ValueError(f"unknown observable type: {kind!r}")
