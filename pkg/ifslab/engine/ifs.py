"""Iterated function systems of circle homeomorphisms and their Markov operator."""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from ..errors import AtomBudgetExceeded, NotRational
from ..geometry.circle import CirclePoint, PointLike, _value, wrap
from ..geometry.homeo import Homeo, homeo_from_record
from .measure import EmpiricalMeasure
from .streams import symbol_draws

logger = logging.getLogger(__name__)

PROB_TOL = 1e-12
DEFAULT_ATOM_CAP = 10**6


@dataclass(frozen=True)
class IFS:
    """Maps g_1..g_k chosen independently with probabilities p_1..p_k."""

    maps: tuple[Homeo, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        maps = tuple(self.maps)
        probs = tuple(float(p) for p in self.probs)
        if not maps:
            raise ValueError("an IFS needs at least one map")
        if len(maps) != len(probs):
            raise ValueError(f"{len(maps)} maps but {len(probs)} probabilities")
        if any(p <= 0.0 for p in probs):
            raise ValueError("probabilities must be strictly positive")
        if abs(math.fsum(probs) - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {math.fsum(probs)!r}, expected 1")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_records(cls, maps: Sequence[dict], probs: Sequence[float]) -> "IFS":
        return cls(tuple(homeo_from_record(m) for m in maps), tuple(probs))

    @property
    def k(self) -> int:
        return len(self.maps)

    @property
    def prob_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    @property
    def cum_probs(self) -> np.ndarray:
        return np.cumsum(self.prob_array)

    @property
    def is_uniform(self) -> bool:
        return all(abs(p - 1.0 / self.k) <= PROB_TOL for p in self.probs)

    def draw(self, rng: np.random.Generator, shape) -> np.ndarray:
        """Zero-based symbols drawn from p."""
        return symbol_draws(rng, self.cum_probs, shape)

    def lift_step(self, t: np.ndarray, symbols: np.ndarray) -> np.ndarray:
        """Apply g_{s} to each lift coordinate; ``symbols`` is zero-based and broadcast to ``t``."""
        t = np.asarray(t, dtype=float)
        symbols = np.broadcast_to(symbols, t.shape)
        out = np.empty_like(t)
        for i, g in enumerate(self.maps):
            sel = symbols == i
            if np.any(sel):
                out[sel] = g.lift(t[sel])
        return out

    def step(self, x: np.ndarray, symbols: np.ndarray) -> np.ndarray:
        return wrap(self.lift_step(x, symbols))

    def apply_all(self, x) -> np.ndarray:
        """Images g_1(x), ..., g_k(x) stacked on a new leading axis."""
        x = np.asarray(x, dtype=float)
        return np.stack([wrap(np.asarray(g.lift(x), dtype=float)) for g in self.maps])

    def describe(self) -> dict:
        return {"maps": [g.describe() for g in self.maps], "probs": list(self.probs)}


def markov_push(ifs: IFS, mu: EmpiricalMeasure, atom_cap: int = DEFAULT_ATOM_CAP) -> EmpiricalMeasure:
    """P mu = sum_i p_i mu o g_i^{-1}; every atom splits into k atoms."""
    size = len(mu) * ifs.k
    if size > atom_cap:
        raise AtomBudgetExceeded(f"push-forward needs {size} atoms, cap is {atom_cap}")
    positions = ifs.apply_all(mu.positions).ravel()
    weights = np.outer(ifs.prob_array, mu.weights).ravel()
    return EmpiricalMeasure(positions, weights / weights.sum())


def inverse_system(ifs: IFS) -> IFS:
    return IFS(tuple(g.inverse() for g in ifs.maps), ifs.probs)


def common_denominator(probs: Sequence[float], max_denominator: int = 10**6) -> int:
    """Smallest n with every p_i within 1e-12 of a multiple of 1/n."""
    n = 1
    for p in probs:
        n = math.lcm(n, Fraction(p).limit_denominator(max_denominator).denominator)
    for p in probs:
        if abs(p - round(p * n) / n) >= PROB_TOL:
            raise NotRational(f"probability {p!r} is not a fraction with denominator <= {max_denominator}")
    return n


def uniformize(ifs: IFS, denominators: Union[int, Iterable[int]]) -> IFS:
    """Equal-weight system with map g_i repeated m_i times where p_i = m_i / n.

    ``denominators`` is the common denominator n, or a list whose least common
    multiple is used.
    """
    if isinstance(denominators, int):
        n = denominators
    else:
        n = math.lcm(*[int(d) for d in denominators])
    if n < 1:
        raise ValueError("denominator must be positive")

    counts = []
    for p in ifs.probs:
        m = round(p * n)
        if m < 1 or abs(p - m / n) >= PROB_TOL:
            raise NotRational(f"probability {p!r} is not a multiple of 1/{n}")
        counts.append(m)

    maps = tuple(g for g, m in zip(ifs.maps, counts) for _ in range(m))
    total = len(maps)
    logger.debug("uniformized %d maps into %d equal-weight symbols", ifs.k, total)
    return IFS(maps, tuple([1.0 / total] * total))


def dedupe_points(values, tol: float = 1e-12) -> np.ndarray:
    """Sorted circle coordinates with near-coincident points (wraparound included) merged."""
    v = np.sort(wrap(np.asarray(values, dtype=float)))
    if v.size <= 1:
        return v
    keep = np.concatenate([[True], np.diff(v) > tol])
    v = v[keep]
    if v.size > 1 and v[0] + 1.0 - v[-1] <= tol:
        v = v[:-1]
    return v


def support_step(ifs: IFS, points: Iterable[PointLike]) -> list[CirclePoint]:
    """The image set {g_i(x) : x in A, i = 1..k}, deduplicated."""
    values = np.array([_value(p) for p in points], dtype=float)
    if values.size == 0:
        return []
    return [CirclePoint(v) for v in dedupe_points(ifs.apply_all(values).ravel())]
