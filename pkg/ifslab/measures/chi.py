"""The metric chi(x, y) = min(m([x, y]), m([y, x])) built from a reference measure m."""

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..engine.ifs import IFS
from ..engine.measure import EmpiricalMeasure
from ..geometry.circle import CirclePoint, PointLike, _value, circ_dist

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ChiMetric:
    """chi over an empirical reference measure, normally the invariant law of the inverse system."""

    base: EmpiricalMeasure

    def pairwise(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        forward = self.base.arc_masses(x.ravel(), y.ravel())
        backward = self.base.arc_masses(y.ravel(), x.ravel())
        out = np.minimum(forward, backward)
        out[x.ravel() == y.ravel()] = 0.0
        return out.reshape(x.shape)

    @property
    def sample_count(self) -> int:
        return len(self.base)


def chi_eval(chi: ChiMetric, x: PointLike, y: PointLike) -> float:
    """Smaller of the reference masses of the two closed arcs joining x and y."""
    xv, yv = _value(x), _value(y)
    if xv == yv:
        return 0.0
    return float(chi.pairwise(xv, yv))


@dataclass(frozen=True, eq=False)
class ChiProbe:
    """f(z) = chi(z, z0); 1-Lipschitz for chi."""

    chi: ChiMetric
    anchor: float

    def evaluate(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = self.chi.pairwise(x_arr, self.anchor)
        return out if x_arr.ndim else float(out)

    def __call__(self, x):
        return self.evaluate(x)


def chi_lipschitz_probe(chi: ChiMetric, z0: PointLike) -> ChiProbe:
    return ChiProbe(chi, _value(z0))


def chi_table(chi: ChiMetric, pairs: Iterable[tuple[PointLike, PointLike]]) -> list[dict]:
    """Rows (x, y, circ_dist, chi) side by side."""
    rows = []
    for x, y in pairs:
        rows.append({
            "x": _value(x),
            "y": _value(y),
            "circ_dist": circ_dist(x, y),
            "chi": chi_eval(chi, x, y),
        })
    return rows


def chi_nonexpansiveness(ifs: IFS, chi: ChiMetric, probes: Sequence[PointLike],
                         pairs: Sequence[tuple[PointLike, PointLike]], slack: float) -> tuple[bool, float]:
    """Check |Uf(x) - Uf(y)| <= chi(x, y) + slack for each probe anchor and pair.

    Returns (ok, worst excess of |Uf(x) - Uf(y)| - chi(x, y)).
    """
    xs = np.array([_value(x) for x, _ in pairs], dtype=float)
    ys = np.array([_value(y) for _, y in pairs], dtype=float)
    probs = ifs.prob_array[:, None]
    gx, gy = ifs.apply_all(xs), ifs.apply_all(ys)
    distances = chi.pairwise(xs, ys)
    worst = -np.inf
    for z0 in probes:
        f = chi_lipschitz_probe(chi, z0)
        uf_x = (probs * f.evaluate(gx)).sum(axis=0)
        uf_y = (probs * f.evaluate(gy)).sum(axis=0)
        worst = max(worst, float(np.max(np.abs(uf_x - uf_y) - distances)))
    logger.debug("chi nonexpansiveness: worst excess %.3g (slack %.3g)", worst, slack)
    return worst <= slack, worst
