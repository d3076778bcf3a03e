"""Orientation-preserving circle homeomorphisms represented by degree-1 lifts.

A map is given by its lift F: R -> R, strictly increasing with
F(t + 1) = F(t) + 1. Words compose in the order they are written: the first
symbol is applied first, so ``(i_1, ..., i_n)`` acts as g_{i_n} o ... o g_{i_1}.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar, Optional, Sequence

import numpy as np

from ..errors import ConvergenceFailure, SymbolOutOfRange
from .circle import Arc, CirclePoint, PointLike, _value, wrap

logger = logging.getLogger(__name__)

BISECTION_TOL = 1e-13
BISECTION_BUDGET = 200


class Homeo(ABC):
    """Circle homeomorphism; subclasses supply the lift."""

    family: ClassVar[str] = "homeo"

    @abstractmethod
    def lift(self, t):
        """Evaluate the lift on a scalar or array of reals."""

    def lift_inverse(self, s):
        """Invert the lift by vectorized monotone bisection."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        if s_arr.size == 0:
            return s_arr.copy()
        c = float(np.asarray(self.lift(0.0)))
        # F(t) - t lies in (c - 1, c + 1], so the preimage sits in a width-2 bracket
        lo = s_arr - c - 1.0
        hi = s_arr - c + 1.0
        if np.any(self.lift(lo) > s_arr) or np.any(self.lift(hi) < s_arr):
            raise ConvergenceFailure(f"{self!r}: bisection bracket does not contain the preimage")

        for _ in range(BISECTION_BUDGET):
            if np.max(hi - lo) <= BISECTION_TOL:
                break
            mid = 0.5 * (lo + hi)
            below = self.lift(mid) < s_arr
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        else:
            raise ConvergenceFailure(f"{self!r}: bisection did not reach tolerance {BISECTION_TOL}")

        t = 0.5 * (lo + hi)
        residual = np.max(np.abs(self.lift(t) - s_arr))
        if residual > 1e-9:
            raise ConvergenceFailure(f"{self!r}: lift jumps near the preimage (residual {residual:.3g})")
        return t if np.ndim(s) else float(t[0])

    def apply(self, x):
        """Image of circle coordinates (scalar, array or CirclePoint)."""
        if isinstance(x, CirclePoint):
            return CirclePoint(wrap(self.lift(x.value)))
        return wrap(self.lift(x))

    def apply_inverse(self, y):
        if isinstance(y, CirclePoint):
            return CirclePoint(wrap(self.lift_inverse(y.value)))
        return wrap(self.lift_inverse(wrap(y)))

    def inverse(self) -> "Homeo":
        return InverseHomeo(self)

    @abstractmethod
    def describe(self) -> dict:
        """Tagged record as it appears in config files."""


@dataclass(frozen=True)
class Rotation(Homeo):
    theta: float
    family: ClassVar[str] = "rotation"

    def lift(self, t):
        return np.asarray(t, dtype=float) + self.theta if np.ndim(t) else float(t) + self.theta

    def lift_inverse(self, s):
        return np.asarray(s, dtype=float) - self.theta if np.ndim(s) else float(s) - self.theta

    def inverse(self) -> "Rotation":
        return Rotation(wrap(-self.theta))

    def describe(self) -> dict:
        return {"type": "rotation", "theta": self.theta}


@dataclass(frozen=True)
class Arnold(Homeo):
    """F(t) = t + theta + (eps / 2 pi) sin(2 pi t); a diffeomorphism for |eps| < 1."""

    theta: float
    eps: float
    family: ClassVar[str] = "arnold"

    def lift(self, t):
        if np.ndim(t):
            t = np.asarray(t, dtype=float)
            return t + self.theta + (self.eps / (2 * np.pi)) * np.sin(2 * np.pi * t)
        t = float(t)
        return t + self.theta + (self.eps / (2 * math.pi)) * math.sin(2 * math.pi * t)

    def derivative(self, t):
        return 1.0 + self.eps * np.cos(2 * np.pi * np.asarray(t, dtype=float))

    def describe(self) -> dict:
        return {"type": "arnold", "theta": self.theta, "eps": self.eps}


@dataclass(frozen=True)
class PiecewiseLinear(Homeo):
    """Lift interpolating (input, output) circle pairs, extended with period 1.

    Outputs are unwrapped counterclockwise in input order; the data describe a
    homeomorphism when every increment is positive and the total stays below 1
    (``validate_homeo`` checks this on a grid).
    """

    points: tuple[tuple[float, float], ...]
    family: ClassVar[str] = "pwl"

    def __post_init__(self):
        if not self.points:
            raise ValueError("PiecewiseLinear needs at least one breakpoint")
        pts = tuple(sorted((wrap(a), wrap(b)) for a, b in self.points))
        object.__setattr__(self, "points", pts)

    def _nodes(self) -> tuple[np.ndarray, np.ndarray]:
        a = np.array([p[0] for p in self.points])
        b = np.array([p[1] for p in self.points])
        unwrapped = b[0] + np.concatenate([[0.0], np.cumsum(wrap(np.diff(b)))]) if len(b) > 1 else b.copy()
        xs = np.concatenate([[a[-1] - 1.0], a, [a[0] + 1.0]])
        ys = np.concatenate([[unwrapped[-1] - 1.0], unwrapped, [unwrapped[0] + 1.0]])
        return xs, ys

    def lift(self, t):
        xs, ys = self._nodes()
        t_arr = np.asarray(t, dtype=float)
        k = np.floor(t_arr)
        out = np.interp(t_arr - k, xs, ys) + k
        return out if np.ndim(t) else float(out)

    def lift_inverse(self, s):
        xs, ys = self._nodes()
        s_arr = np.asarray(s, dtype=float)
        k = np.floor(s_arr - ys[1])
        out = np.interp(s_arr - k, ys, xs) + k
        return out if np.ndim(s) else float(out)

    def inverse(self) -> "PiecewiseLinear":
        return PiecewiseLinear(tuple((b, a) for a, b in self.points))

    def describe(self) -> dict:
        return {"type": "pwl", "points": [list(p) for p in self.points]}


@dataclass(frozen=True)
class InverseHomeo(Homeo):
    """g^{-1} for maps without a closed-form inverse; evaluated by bisection."""

    base: Homeo
    family: ClassVar[str] = "inverse"

    def lift(self, t):
        return self.base.lift_inverse(t)

    def lift_inverse(self, s):
        return self.base.lift(s)

    def inverse(self) -> Homeo:
        return self.base

    def describe(self) -> dict:
        return {"type": "inverse", "of": self.base.describe()}


@dataclass(frozen=True)
class Word:
    """Finite word over {1, ..., k}; the empty word acts as the identity."""

    symbols: tuple[int, ...] = ()

    def __post_init__(self):
        symbols = tuple(int(s) for s in self.symbols)
        if any(s < 1 for s in symbols):
            raise SymbolOutOfRange(f"word symbols are 1-based, got {symbols}")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.symbols + other.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def zero_based(self) -> np.ndarray:
        return np.asarray(self.symbols, dtype=np.int64) - 1


def apply(h: Homeo, x: PointLike) -> CirclePoint:
    return CirclePoint(wrap(h.lift(_value(x))))


def apply_inverse(h: Homeo, y: PointLike) -> CirclePoint:
    return CirclePoint(wrap(h.lift_inverse(_value(y))))


def compose_word(ifs, w: Word, x: PointLike) -> CirclePoint:
    """g_w(x) for an object exposing ``maps``; g_{i_1} is applied first."""
    k = len(ifs.maps)
    if any(s > k for s in w.symbols):
        raise SymbolOutOfRange(f"word {w.symbols} uses symbols outside 1..{k}")
    value = _value(x)
    for s in w.symbols:
        value = wrap(ifs.maps[s - 1].lift(value))
    return CirclePoint(value)


def image_arc(h: Homeo, a: Arc) -> Arc:
    """[h(start), h(end)]; orientation preservation makes this the image of the arc."""
    if a.full:
        return Arc.whole(apply(h, a.start))
    return Arc(apply(h, a.start), apply(h, a.end))


@dataclass
class ValidationReport:
    """Grid check of a lift."""

    family: str
    grid_n: int
    passed: bool
    monotonicity_margin: float
    degree_error: float
    message: Optional[str] = None


def validate_homeo(h: Homeo, grid_n: int = 1000) -> ValidationReport:
    """Check strict monotonicity and F(t + 1) = F(t) + 1 on ``grid_n`` steps."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")

    t = np.arange(grid_n + 1) / grid_n
    try:
        values = np.asarray(h.lift(t), dtype=float)
        shifted = np.asarray(h.lift(t + 1.0), dtype=float)
    except ConvergenceFailure as exc:
        return ValidationReport(h.family, grid_n, False, float("-inf"), float("inf"), str(exc))

    margin = float(np.min(np.diff(values)))
    degree_error = float(np.max(np.abs(shifted - values - 1.0)))
    passed = margin > 0.0 and degree_error <= 1e-12
    message = None
    if margin <= 0.0:
        message = "lift is not strictly increasing"
    elif degree_error > 1e-12:
        message = "lift is not of degree 1"
    return ValidationReport(h.family, grid_n, passed, margin, degree_error, message)


def homeo_from_record(record: dict) -> Homeo:
    """Build a map from its tagged config record."""
    kind = record.get("type")
    if kind == "rotation":
        return Rotation(float(record["theta"]))
    if kind == "arnold":
        return Arnold(float(record["theta"]), float(record["eps"]))
    if kind == "pwl":
        return PiecewiseLinear(tuple((float(a), float(b)) for a, b in record["points"]))
    if kind == "inverse":
        return homeo_from_record(record["of"]).inverse()
    raise ValueError(f"unknown map type: {kind!r}")


def orientation_preserved(h: Homeo, triples: Sequence[tuple[float, float, float]]) -> bool:
    """True if every counterclockwise triple keeps its cyclic order under h."""
    for x, y, z in triples:
        before = wrap(y - x) < wrap(z - x)
        hx, hy, hz = (h.apply(v) for v in (x, y, z))
        if (wrap(hy - hx) < wrap(hz - hx)) != before:
            return False
    return True
