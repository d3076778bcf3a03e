"""Growth of ||sum_{k<=n} U^k f||_{L2(mu*)} and the summability of n^{-3/2} times it."""

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from ..engine.chain import stationary_positions
from ..engine.dual import DEFAULT_NODE_BUDGET, dual_gap_levels, dual_sum_batch, mc_values
from ..engine.ifs import IFS
from ..engine.measure import EmpiricalMeasure
from ..engine.observables import Observable
from ..engine.streams import derive_seed, stream
from ..geometry.circle import PointLike, _value

logger = logging.getLogger(__name__)

Mode = Literal["exact", "mc"]


@dataclass
class MWReport:
    n_values: list[int]
    a_n: list[float]
    beta_growth_hat: Optional[float]
    partial_series: list[float]
    cauchy_ratio: Optional[float]
    x_sample_count: int
    mode: str


def loglog_slope(ns: Sequence[float], values: Sequence[float]) -> Optional[float]:
    """Least-squares slope of log(value) on log(n); None when a value is not positive."""
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if ns.size < 2 or np.any(values <= 0) or np.any(ns <= 0):
        return None
    slope, _ = np.polyfit(np.log(ns), np.log(values), 1)
    return float(slope)


def upper_half_slope(ns: Sequence[int], values: Sequence[float]) -> Optional[float]:
    half = len(ns) // 2
    return loglog_slope(ns[half:], values[half:])


def cauchy_ratio(ns: Sequence[int], partial: Sequence[float]) -> Optional[float]:
    """Share of the final partial sum contributed by terms with n above 3/4 of the largest n."""
    if not partial or partial[-1] <= 0:
        return None
    cutoff = 0.75 * ns[-1]
    before = [s for n, s in zip(ns, partial) if n <= cutoff]
    base = before[-1] if before else 0.0
    return float((partial[-1] - base) / partial[-1])


def _stationary_points(ifs: IFS, count: int, seed: int, burn_in: int,
                       mu_star: Optional[EmpiricalMeasure]) -> np.ndarray:
    if mu_star is None:
        return stationary_positions(ifs, burn_in, count, 1, derive_seed(seed, "mw-x"))
    rng = stream(seed, "mw-x")
    return rng.choice(mu_star.positions, size=count, p=mu_star.weights)


def mw_statistic(ifs: IFS, f: Observable, n_list: Sequence[int], x_count: int, seed: int,
                 mode: Mode = "exact", mu_star: Optional[EmpiricalMeasure] = None,
                 mc_samples: int = 2000, burn_in: int = 1000,
                 node_budget: int = DEFAULT_NODE_BUDGET) -> MWReport:
    """a_n = sqrt(mean over stationary x of h_n(x)^2) with h_n = sum_{k<=n} U^k f.

    In mc mode h_n(x) is estimated from ``mc_samples`` paths per point, which
    adds Monte Carlo variance to every a_n.
    """
    ns = sorted(set(int(n) for n in n_list))
    if not ns or ns[0] < 1:
        raise ValueError("n_list must contain positive integers")
    xs = _stationary_points(ifs, x_count, seed, burn_in, mu_star)
    n_max = ns[-1]

    if mode == "exact":
        h = dual_sum_batch(ifs, f, xs, n_max, node_budget)
    elif mode == "mc":
        values = mc_values(ifs, f, xs, n_max, mc_samples, derive_seed(seed, "mw-paths"), purpose="mw")
        h = np.cumsum(values[:, 1:, :].mean(axis=0), axis=0)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    a_n = [float(math.sqrt(np.mean(h[n - 1] ** 2))) for n in ns]
    partial = np.cumsum([n**-1.5 * a for n, a in zip(ns, a_n)]).tolist()
    beta = upper_half_slope(ns, a_n)
    logger.info("MW statistic (%s): beta_growth_hat %s", mode, "n/a" if beta is None else f"{beta:.3f}")
    return MWReport(ns, a_n, beta, partial, cauchy_ratio(ns, partial), int(xs.size), mode)


def uniform_sum_gap(ifs: IFS, f: Observable, x: PointLike, y: PointLike, n_list: Sequence[int],
                    node_budget: int = DEFAULT_NODE_BUDGET) -> list[dict]:
    """|sum_{k<=n} (U^k f(x) - U^k f(y))| per n, from node-wise differences on one tree."""
    ns = sorted(set(int(n) for n in n_list))
    if not ns or ns[0] < 1:
        raise ValueError("n_list must contain positive integers")
    gaps = dual_gap_levels(ifs, f, _value(x), [_value(y)], ns[-1], node_budget)[1:, 0]
    cumulative = np.cumsum(gaps)
    return [{"n": n, "gap": float(abs(cumulative[n - 1])), "signed_gap": float(-cumulative[n - 1])} for n in ns]
