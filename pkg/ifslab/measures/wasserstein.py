"""Exact Wasserstein-1 distance between finitely supported measures on the circle.

With F the difference of the two distribution functions on [0, 1),
W1 = min_s integral |F(t) - s| dt, and the minimizing s is a weighted median
of the piecewise-constant F.
"""

import logging
from typing import Optional

import numpy as np

from ..engine.ifs import DEFAULT_ATOM_CAP, IFS, markov_push
from ..engine.measure import EmpiricalMeasure

logger = logging.getLogger(__name__)


def _weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    idx = int(np.searchsorted(cum, 0.5 * cum[-1], side="left"))
    return float(values[order][min(idx, values.size - 1)])


def w1_circle(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """W1(mu, nu) with cost circ_dist."""
    pos = np.concatenate([mu.positions, nu.positions])
    mass = np.concatenate([mu.weights, -nu.weights])
    order = np.argsort(pos, kind="stable")
    pos = pos[order]
    diff = np.cumsum(mass[order])
    lengths = np.diff(np.append(pos, pos[0] + 1.0))
    if not np.any(lengths > 0):
        return 0.0
    shift = _weighted_median(diff, lengths)
    return float(max(0.0, np.dot(lengths, np.abs(diff - shift))))


def invariance_residual(ifs: IFS, mu: EmpiricalMeasure, atom_cap: int = DEFAULT_ATOM_CAP) -> float:
    """W1(mu, P mu); the push runs on a quantile subsample when mu is too large."""
    limit = max(1, atom_cap // ifs.k)
    if len(mu) > limit:
        logger.debug("invariance residual: thinning %d atoms to %d", len(mu), limit)
        mu = mu.thin(limit)
    return w1_circle(mu, markov_push(ifs, mu, atom_cap))


def nonexpansiveness_probe(ifs: IFS, mu: EmpiricalMeasure, nu: EmpiricalMeasure,
                           atom_cap: Optional[int] = None) -> tuple[float, float]:
    """(W1(mu, nu), W1(P mu, P nu))."""
    cap = DEFAULT_ATOM_CAP if atom_cap is None else atom_cap
    before = w1_circle(mu, nu)
    after = w1_circle(markov_push(ifs, mu, cap), markov_push(ifs, nu, cap))
    return before, after
