"""Sample paths of the Markov chain X_{t+1} = g_{i_t}(X_t)."""

import logging
import math
from typing import Sequence

import numpy as np

from ..geometry.circle import CirclePoint, PointLike, _value, wrap
from .ifs import IFS
from .measure import EmpiricalMeasure
from .streams import CHUNK_SIZE, chunk_layout, run_chunks, stream

logger = logging.getLogger(__name__)

MAX_ENSEMBLE = 1024


def orbit(ifs: IFS, x0: float, symbols: np.ndarray) -> np.ndarray:
    """Positions x0, g_{s_0}(x0), ... along a zero-based symbol sequence."""
    lifts = [g.lift for g in ifs.maps]
    out = np.empty(len(symbols) + 1)
    x = wrap(float(x0))
    out[0] = x
    for t, s in enumerate(symbols.tolist()):
        x = lifts[s](x) % 1.0
        if x >= 1.0:
            x = 0.0
        out[t + 1] = x
    return out


def simulate_path(ifs: IFS, x0: PointLike, n: int, seed: int, purpose: str = "chain",
                  index: int = 0) -> np.ndarray:
    if n < 0:
        raise ValueError("n must be non-negative")
    symbols = ifs.draw(stream(seed, purpose, index), n)
    return orbit(ifs, _value(x0), symbols)


def simulate_chain(ifs: IFS, x0: PointLike, n: int, seed: int) -> list[CirclePoint]:
    """Trajectory X_0 = x0, ..., X_n driven by the seeded symbol stream."""
    return [CirclePoint(v) for v in simulate_path(ifs, x0, n, seed)]


def _positions_chunk(args) -> np.ndarray:
    ifs, starts, record, seed, purpose, index, size = args
    rng = stream(seed, purpose, index)
    horizon = record[-1] if record else 0
    symbols = ifs.draw(rng, (horizon, size))
    pos = np.broadcast_to(starts, (size, starts.size)).copy()
    out = np.empty((size, len(record), starts.size))
    wanted = {t: j for j, t in enumerate(record)}
    if 0 in wanted:
        out[:, wanted[0], :] = pos
    for t in range(horizon):
        pos = ifs.step(pos, symbols[t][:, None])
        if t + 1 in wanted:
            out[:, wanted[t + 1], :] = pos
    return out


def endpoint_positions(ifs: IFS, starts: Sequence[float], steps: Sequence[int], samples: int,
                       seed: int, purpose: str = "endpoints") -> dict[int, np.ndarray]:
    """X_n^x for each n in ``steps`` and each start, driven by shared words.

    Returns {n: array of shape (samples, len(starts))}.
    """
    starts = np.atleast_1d(np.asarray([_value(s) for s in starts], dtype=float))
    record = sorted(set(int(n) for n in steps))
    if record and record[0] < 0:
        raise ValueError("steps must be non-negative")
    tasks = [(ifs, starts, record, seed, purpose, i, size) for i, size in chunk_layout(samples, CHUNK_SIZE)]
    stacked = np.concatenate(run_chunks(_positions_chunk, tasks), axis=0)
    return {n: stacked[:, j, :] for j, n in enumerate(record)}


def stationary_positions(ifs: IFS, burn_in: int, count: int, thinning: int, seed: int,
                         x0: PointLike = 0.0) -> np.ndarray:
    """Raw states behind ``stationary_sample``, in collection order."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if burn_in < 0 or thinning < 1:
        raise ValueError("burn_in must be >= 0 and thinning >= 1")
    chains = min(count, MAX_ENSEMBLE)
    per_chain = math.ceil(count / chains)
    rng = stream(seed, "stationary")
    pos = np.full(chains, _value(x0))
    for _ in range(burn_in):
        pos = ifs.step(pos, ifs.draw(rng, chains))
    collected = np.empty((per_chain, chains))
    for j in range(per_chain):
        for _ in range(thinning):
            pos = ifs.step(pos, ifs.draw(rng, chains))
        collected[j] = pos
    logger.debug("stationary sample: %d chains x %d states after %d burn-in steps", chains, per_chain, burn_in)
    return collected.ravel()[:count]


def stationary_sample(ifs: IFS, burn_in: int, count: int, thinning: int, seed: int,
                      x0: PointLike = 0.0) -> EmpiricalMeasure:
    """Equal-weight empirical estimate of the invariant measure.

    An ensemble of chains started at ``x0`` runs ``burn_in`` steps, then each
    chain contributes every ``thinning``-th state until ``count`` states exist.
    """
    return EmpiricalMeasure.from_samples(stationary_positions(ifs, burn_in, count, thinning, seed, x0))
