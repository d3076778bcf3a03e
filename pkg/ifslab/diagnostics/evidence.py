"""Empirical evidence for minimality, asymptotic stability and uniqueness."""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..engine.chain import endpoint_positions, simulate_path
from ..engine.dual import DEFAULT_NODE_BUDGET
from ..engine.ifs import IFS, dedupe_points
from ..engine.measure import EmpiricalMeasure
from ..engine.streams import stream
from ..geometry.circle import PointLike, _value, circ_dist_array
from ..measures.support import max_gap_points
from ..measures.wasserstein import w1_circle

logger = logging.getLogger(__name__)


@dataclass
class MinimalityEvidence:
    max_gap: float
    verdict: bool
    eps: float
    depth: int
    orbit_size: int
    exact: bool


def minimality_evidence(ifs: IFS, x0: PointLike, depth: int, eps: float,
                        node_budget: int = DEFAULT_NODE_BUDGET, samples: int = 4096,
                        seed: int = 0) -> MinimalityEvidence:
    """Largest gap of the orbit {g_w(x0) : |w| <= depth}.

    Levels are enumerated (with coincident points merged) while they fit the
    node budget; deeper levels are reached along ``samples`` random words.
    """
    level = np.array([_value(x0)])
    found = [level]
    exact = True
    for d in range(depth):
        if level.size * ifs.k > node_budget:
            exact = False
            break
        level = dedupe_points(ifs.apply_all(level).ravel())
        found.append(level)
    if not exact:
        remaining = depth - d
        logger.info("minimality: sampling %d random words for the last %d levels", samples, remaining)
        rng = stream(seed, "minimality")
        pos = rng.choice(level, size=samples)
        for _ in range(remaining):
            pos = ifs.step(pos, ifs.draw(rng, samples))
            found.append(pos)
    points = dedupe_points(np.concatenate(found))
    gap, _ = max_gap_points(points)
    return MinimalityEvidence(gap, gap < eps, eps, depth, int(points.size), exact)


@dataclass
class StabilityRow:
    n: int
    w1: float
    coupled_distance: float
    noise_floor: float


def stability_gap(ifs: IFS, x: PointLike, y: PointLike, n_list: Sequence[int], samples: int,
                  seed: int) -> list[StabilityRow]:
    """W1 between the laws of X_n^x and X_n^y, with the pathwise distance and a noise floor.

    Both chains are driven by the same words; the noise floor compares the
    x-chain with an independent copy of itself.
    """
    if samples < 1000:
        raise ValueError("stability_gap needs at least 1000 samples")
    xv, yv = _value(x), _value(y)
    shared = endpoint_positions(ifs, [xv, yv], n_list, samples, seed, purpose="stability")
    independent = endpoint_positions(ifs, [xv], n_list, samples, seed, purpose="stability_noise")
    rows = []
    for n in sorted(set(int(v) for v in n_list)):
        px, py = shared[n][:, 0], shared[n][:, 1]
        law_x = EmpiricalMeasure.from_samples(px)
        rows.append(StabilityRow(
            n=n,
            w1=w1_circle(law_x, EmpiricalMeasure.from_samples(py)),
            coupled_distance=float(circ_dist_array(px, py).mean()),
            noise_floor=w1_circle(law_x, EmpiricalMeasure.from_samples(independent[n][:, 0])),
        ))
    return rows


@dataclass
class UniquenessEvidence:
    max_w1: float
    pairs: list[dict]
    n: int
    burn_in: int


def uniqueness_evidence(ifs: IFS, starts: Sequence[PointLike], n: int, seed: int) -> UniquenessEvidence:
    """Max pairwise W1 between occupation measures of one trajectory per start.

    Start i reads its own symbol stream (index i), so the runs are independent;
    the first n // 10 states are discarded.
    """
    if len(starts) < 2:
        raise ValueError("uniqueness_evidence needs at least two starts")
    if n < 10:
        raise ValueError("n must be at least 10")
    burn_in = n // 10
    values = [_value(s) for s in starts]
    occupation = [EmpiricalMeasure.from_samples(simulate_path(ifs, v, n, seed, "unique", i)[burn_in + 1:])
                  for i, v in enumerate(values)]
    pairs = []
    for (i, mu), (j, nu) in itertools.combinations(enumerate(occupation), 2):
        pairs.append({"x": values[i], "y": values[j], "w1": w1_circle(mu, nu)})
    max_w1 = max(p["w1"] for p in pairs)
    return UniquenessEvidence(max_w1, pairs, n, burn_in)


@dataclass
class CesaroRow:
    n: int
    w1: float


def cesaro_convergence(ifs: IFS, x: PointLike, n_list: Sequence[int], samples: int, seed: int,
                       reference: EmpiricalMeasure) -> list[CesaroRow]:
    """W1 between (1/n) sum_{k=1..n} P^k delta_x (sampled) and a reference measure."""
    ns = sorted(set(int(v) for v in n_list))
    if not ns or ns[0] < 1:
        raise ValueError("n_list must contain positive integers")
    positions = endpoint_positions(ifs, [_value(x)], range(1, ns[-1] + 1), samples, seed, purpose="cesaro")
    rows = []
    for n in ns:
        pooled = np.concatenate([positions[k][:, 0] for k in range(1, n + 1)])
        rows.append(CesaroRow(n, w1_circle(EmpiricalMeasure.from_samples(pooled), reference)))
    return rows
