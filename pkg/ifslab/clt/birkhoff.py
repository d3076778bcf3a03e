"""Birkhoff sums S_n = sum_{l=1..n} f(X_l) and their normalizations."""

import logging
import math
from typing import Optional, Union

import numpy as np

from ..engine.chain import simulate_path
from ..engine.dual import mc_values
from ..engine.ifs import IFS
from ..engine.measure import EmpiricalMeasure
from ..engine.observables import Observable
from ..engine.streams import chunk_layout, run_chunks, stream
from ..geometry.circle import PointLike, _value

logger = logging.getLogger(__name__)

REPLICATE_CHUNK = 256

Start = Union[str, float]


def center_observable(f: Observable, mu_star_hat: EmpiricalMeasure,
                      second_estimate: Optional[EmpiricalMeasure] = None) -> Observable:
    """f shifted by its mean under the stationary estimate.

    With a second, independent estimate the drift between the two means is
    recorded as ``centering_error``.
    """
    c = mu_star_hat.expect(f.raw)
    error = 0.0
    if second_estimate is not None:
        error = abs(second_estimate.expect(f.raw) - c)
    return f.centered(c, error)


def birkhoff_sum(ifs: IFS, f: Observable, x: PointLike, n: int, seed: int) -> float:
    """One replicate of S_n f(omega, x) along a seeded path."""
    if n < 1:
        raise ValueError("n must be at least 1")
    path = simulate_path(ifs, x, n, seed, purpose="birkhoff")
    return float(np.sum(f.evaluate(path[1:])))


def birkhoff_sums(ifs: IFS, f: Observable, x: PointLike, n: int, replicates: int, seed: int) -> np.ndarray:
    """Partial sums S_1..S_n for many paths from x; shape (replicates, n)."""
    values = mc_values(ifs, f, [_value(x)], n, replicates, seed, purpose="birkhoff_batch")[:, 1:, 0]
    return np.cumsum(values, axis=1)


def _sn_chunk(args) -> np.ndarray:
    ifs, f, n, burn_in, start, seed, index, size = args
    rng = stream(seed, "sn_star", index)
    if start == "stationary":
        pos = np.zeros(size)
        for _ in range(burn_in):
            pos = ifs.step(pos, ifs.draw(rng, size))
    else:
        pos = np.full(size, float(start))
    total = np.zeros(size)
    for _ in range(n):
        pos = ifs.step(pos, ifs.draw(rng, size))
        total += f.evaluate(pos)
    return total / math.sqrt(n)


def sn_star_samples(ifs: IFS, f: Observable, n: int, replicates: int, burn_in: int, start: Start,
                    seed: int) -> np.ndarray:
    """Independent replicates of S_n / sqrt(n).

    ``start="stationary"`` begins each replicate after its own burn-in segment
    from 0; a circle coordinate starts every replicate there.
    """
    if replicates < 100:
        raise ValueError("sn_star_samples needs at least 100 replicates")
    if n < 1:
        raise ValueError("n must be at least 1")
    if start != "stationary":
        start = _value(start)
    tasks = [(ifs, f, n, burn_in, start, seed, i, size) for i, size in chunk_layout(replicates, REPLICATE_CHUNK)]
    return np.concatenate(run_chunks(_sn_chunk, tasks))
