"""Geometry of the unit circle R/Z: points, closed counterclockwise arcs, distance."""

from dataclasses import dataclass
from typing import Union

import numpy as np

PointLike = Union["CirclePoint", float]


def wrap(t):
    """Reduce reals (scalar or array) into [0, 1).

    ``t % 1.0`` can return exactly 1.0 for tiny negative inputs; those are
    folded back to 0.0.
    """
    if np.ndim(t) == 0:
        r = float(t) % 1.0
        return 0.0 if r >= 1.0 else r
    r = np.mod(np.asarray(t, dtype=float), 1.0)
    r[r >= 1.0] = 0.0
    return r


def _value(x: PointLike) -> float:
    return x.value if isinstance(x, CirclePoint) else wrap(x)


@dataclass(frozen=True, order=True)
class CirclePoint:
    """A point of the circle; any real is accepted and stored mod 1."""

    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", wrap(self.value))

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class Arc:
    """Closed counterclockwise interval [start, end].

    ``full=True`` marks the whole circle (length 1), anchored at ``start``.
    """

    start: CirclePoint
    end: CirclePoint
    full: bool = False

    def __post_init__(self):
        if not isinstance(self.start, CirclePoint):
            object.__setattr__(self, "start", CirclePoint(self.start))
        if not isinstance(self.end, CirclePoint):
            object.__setattr__(self, "end", CirclePoint(self.end))
        if self.full:
            object.__setattr__(self, "end", self.start)

    @classmethod
    def whole(cls, anchor: PointLike = 0.0) -> "Arc":
        return cls(CirclePoint(_value(anchor)), CirclePoint(_value(anchor)), full=True)

    @classmethod
    def centered(cls, center: PointLike, length: float) -> "Arc":
        c = _value(center)
        return cls(CirclePoint(c - length / 2), CirclePoint(c + length / 2))

    @property
    def length(self) -> float:
        return arc_length(self)

    def contains(self, z: PointLike) -> bool:
        return arc_contains(self, z)

    def reversed(self) -> "Arc":
        """The closed arc [end, start] (the complement plus both endpoints)."""
        return Arc(self.end, self.start)

    def as_tuple(self) -> tuple[float, float]:
        return (self.start.value, self.end.value)


def circ_dist(x: PointLike, y: PointLike) -> float:
    """Shorter of the lengths of [x, y] and [y, x]; always in [0, 1/2]."""
    d = wrap(_value(y) - _value(x))
    return min(d, 1.0 - d) if d > 0.0 else 0.0


def circ_dist_array(x, y) -> np.ndarray:
    """Vectorized ``circ_dist`` on arrays of raw circle coordinates."""
    d = wrap(np.asarray(y, dtype=float) - np.asarray(x, dtype=float))
    return np.minimum(d, 1.0 - d)


def arc_length(a: Arc) -> float:
    if a.full:
        return 1.0
    return wrap(a.end.value - a.start.value)


def arc_contains(a: Arc, z: PointLike) -> bool:
    """True iff z lies on the counterclockwise path start -> end, endpoints included."""
    if a.full:
        return True
    return wrap(_value(z) - a.start.value) <= arc_length(a)


def arc_contains_array(a: Arc, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if a.full:
        return np.ones(z.shape, dtype=bool)
    return wrap(z - a.start.value) <= arc_length(a)
