"""Equicontinuity profiles of the iterates U^n f near a point."""

import logging
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from ..engine.dual import DEFAULT_NODE_BUDGET, dual_gap_levels, mc_values
from ..engine.ifs import IFS
from ..engine.observables import Observable
from ..geometry.circle import PointLike, _value, wrap

logger = logging.getLogger(__name__)

Mode = Literal["exact", "mc"]


@dataclass
class ProfileRow:
    delta: float
    value: float
    worst_n: int


def _gap_levels(ifs: IFS, f: Observable, x: float, deltas: Sequence[float], n_max: int,
                mode: Mode, samples: int, seed: int, node_budget: int) -> np.ndarray:
    """U^n f(y) - U^n f(x) for y = x - delta, x + delta; shape (n_max + 1, 2 * len(deltas))."""
    for d in deltas:
        if not 0 < d <= 0.25:
            raise ValueError(f"delta must lie in (0, 1/4], got {d}")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    ys = wrap(np.array([x + s * d for d in deltas for s in (-1.0, 1.0)]))
    if mode == "exact":
        return dual_gap_levels(ifs, f, x, ys, n_max, node_budget)
    if mode == "mc":
        values = mc_values(ifs, f, np.concatenate([[x], ys]), n_max, samples, seed, purpose="eprop")
        return (values[:, :, 1:] - values[:, :, :1]).mean(axis=0)
    raise ValueError(f"unknown mode {mode!r}")


def _rows(deltas: Sequence[float], table: np.ndarray, first_n: int) -> list[ProfileRow]:
    rows = []
    for j, d in enumerate(deltas):
        pair = np.abs(table[:, 2 * j:2 * j + 2]).max(axis=1)
        worst = int(np.argmax(pair))
        rows.append(ProfileRow(delta=float(d), value=float(pair[worst]), worst_n=worst + first_n))
    return rows


def e_property_profile(ifs: IFS, f: Observable, x: PointLike, deltas: Sequence[float], n_max: int,
                       mode: Mode = "exact", samples: int = 10000, seed: int = 0,
                       node_budget: int = DEFAULT_NODE_BUDGET) -> list[ProfileRow]:
    """sup over n <= n_max of |U^n f(y) - U^n f(x)|, maximized over y = x +- delta."""
    table = _gap_levels(ifs, f, _value(x), deltas, n_max, mode, samples, seed, node_budget)
    return _rows(deltas, table, first_n=0)


def cesaro_profile(ifs: IFS, f: Observable, x: PointLike, deltas: Sequence[float], n_max: int,
                   mode: Mode = "exact", samples: int = 10000, seed: int = 0,
                   node_budget: int = DEFAULT_NODE_BUDGET) -> list[ProfileRow]:
    """The same profile for the averages (1/n) sum_{k<=n} U^k f, n = 1..n_max."""
    table = _gap_levels(ifs, f, _value(x), deltas, n_max, mode, samples, seed, node_budget)
    n = np.arange(1, n_max + 1)[:, None]
    averages = np.cumsum(table[1:], axis=0) / n
    return _rows(deltas, averages, first_n=1)
