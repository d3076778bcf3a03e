"""The dual operator U f(x) = sum_i p_i f(g_i(x)), exact and Monte Carlo.

Exact evaluation walks the full depth-n word tree one level at a time. Level
d holds k^d nodes per root; the node of word (i_1, ..., i_d) sits at index
i_d * k^(d-1) + index(i_1, ..., i_{d-1}) so that each level is the
concatenation of g_1, ..., g_k applied to the previous one.
"""

import logging
from typing import Iterator, Sequence

import numpy as np

from ..errors import NodeBudgetExceeded
from ..geometry.circle import PointLike, _value
from .ifs import IFS
from .observables import Observable
from .streams import CHUNK_SIZE, chunk_layout, run_chunks, stream

logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 2**24
WORKING_NODES = 2**22


def _batch_size(ifs: IFS, n: int, node_budget: int, minimum: int = 1) -> int:
    leaves = ifs.k**n
    if leaves * minimum > node_budget:
        raise NodeBudgetExceeded(
            f"depth {n} needs {leaves * minimum} tree nodes, budget is {node_budget}"
        )
    # roots per pass; the node budget bounds feasibility, WORKING_NODES bounds memory
    return max(minimum, min(node_budget, WORKING_NODES) // leaves)


def tree_levels(ifs: IFS, roots: np.ndarray, n: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (positions, path weights) for depth 0..n of the word tree over ``roots``.

    Both arrays have length k^d * len(roots); node j belongs to root j mod len(roots).
    """
    positions = np.asarray(roots, dtype=float)
    weights = np.ones_like(positions)
    probs = ifs.prob_array
    yield positions, weights
    for _ in range(n):
        positions = ifs.apply_all(positions).ravel()
        weights = np.outer(probs, weights).ravel()
        yield positions, weights


def dual_levels(ifs: IFS, f: Observable, xs: Sequence[float], n: int,
                node_budget: int = DEFAULT_NODE_BUDGET) -> np.ndarray:
    """U^d f(x) for d = 0..n and every x; shape (n + 1, len(xs))."""
    if n < 0:
        raise ValueError("n must be non-negative")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    batch = _batch_size(ifs, n, node_budget)
    out = np.empty((n + 1, xs.size))
    for start in range(0, xs.size, batch):
        roots = xs[start:start + batch]
        for d, (pos, w) in enumerate(tree_levels(ifs, roots, n)):
            out[d, start:start + roots.size] = (w * f.evaluate(pos)).reshape(-1, roots.size).sum(axis=0)
    return out


def dual_gap_levels(ifs: IFS, f: Observable, x: float, ys: Sequence[float], n: int,
                    node_budget: int = DEFAULT_NODE_BUDGET) -> np.ndarray:
    """U^d f(y) - U^d f(x) from node-wise differences over shared words; shape (n + 1, len(ys))."""
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    batch = _batch_size(ifs, n, node_budget, minimum=2) - 1
    out = np.empty((n + 1, ys.size))
    for start in range(0, ys.size, batch):
        roots = np.concatenate([[x], ys[start:start + batch]])
        width = roots.size
        for d, (pos, w) in enumerate(tree_levels(ifs, roots, n)):
            vals = f.evaluate(pos).reshape(-1, width)
            diffs = vals[:, 1:] - vals[:, :1]
            out[d, start:start + width - 1] = (w.reshape(-1, width)[:, 1:] * diffs).sum(axis=0)
    return out


def dual_exact(ifs: IFS, f: Observable, x: PointLike, n: int,
               node_budget: int = DEFAULT_NODE_BUDGET) -> float:
    """U^n f(x) by full traversal of the depth-n word tree."""
    return float(dual_levels(ifs, f, [_value(x)], n, node_budget)[n, 0])


def dual_sum_exact(ifs: IFS, f: Observable, x: PointLike, n: int,
                   node_budget: int = DEFAULT_NODE_BUDGET) -> list[float]:
    """Partial sums sum_{j=1..m} U^j f(x) for m = 1..n from a single traversal."""
    levels = dual_levels(ifs, f, [_value(x)], n, node_budget)[1:, 0]
    return [float(v) for v in np.cumsum(levels)]


def dual_sum_batch(ifs: IFS, f: Observable, xs: Sequence[float], n: int,
                   node_budget: int = DEFAULT_NODE_BUDGET) -> np.ndarray:
    """Partial sums h_m(x) = sum_{j<=m} U^j f(x); shape (n, len(xs))."""
    return np.cumsum(dual_levels(ifs, f, xs, n, node_budget)[1:], axis=0)


def _mc_chunk(args) -> np.ndarray:
    ifs, f, starts, n, seed, purpose, index, size = args
    rng = stream(seed, purpose, index)
    symbols = ifs.draw(rng, (n, size))
    pos = np.broadcast_to(starts, (size, starts.size)).copy()
    values = np.empty((size, n + 1, starts.size))
    values[:, 0, :] = f.evaluate(pos)
    for t in range(n):
        pos = ifs.step(pos, symbols[t][:, None])
        values[:, t + 1, :] = f.evaluate(pos)
    return values


def mc_values(ifs: IFS, f: Observable, starts: Sequence[float], n: int, samples: int,
              seed: int, purpose: str = "dual_mc") -> np.ndarray:
    """f(X_d^x) along shared symbol paths; shape (samples, n + 1, len(starts)).

    Every start is driven by the same words (common random numbers).
    """
    starts = np.atleast_1d(np.asarray(starts, dtype=float))
    tasks = [(ifs, f, starts, n, seed, purpose, i, size) for i, size in chunk_layout(samples, CHUNK_SIZE)]
    return np.concatenate(run_chunks(_mc_chunk, tasks), axis=0)


def dual_mc(ifs: IFS, f: Observable, x: PointLike, n: int, samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of U^n f(x) with its standard error."""
    if samples < 2:
        raise ValueError("dual_mc needs at least 2 samples")
    if n < 0:
        raise ValueError("n must be non-negative")
    values = mc_values(ifs, f, [_value(x)], n, samples, seed)[:, n, 0]
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(samples))
