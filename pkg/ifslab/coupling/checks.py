"""Checks of the pairing construction against its partial-sum and survival bounds."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..diagnostics.contraction import clopper_pearson
from ..engine.chain import orbit
from ..engine.ifs import IFS
from ..engine.observables import Observable
from ..geometry.circle import Arc, PointLike
from .pairing import CouplingTranscript, pairing_batch

logger = logging.getLogger(__name__)

LIPSCHITZ_TOL = 1e-12


def birkhoff_gaps(t: CouplingTranscript, ifs: IFS, f: Observable) -> np.ndarray:
    """S_{n'} f(omega, x) - S_{n'} f(omega', y) for n' = 1..n."""
    path_x = orbit(ifs, t.x, np.asarray(t.omega.zero_based()))
    path_y = orbit(ifs, t.y, np.asarray(t.omega_prime.zero_based()))
    return np.cumsum(f.evaluate(path_x[1:])) - np.cumsum(f.evaluate(path_y[1:]))


def verify_p3(t: CouplingTranscript, ifs: IFS, f: Observable) -> tuple[bool, float]:
    """Check |S_{n'}(omega, x) - S_{n'}(omega', y)| <= j(n') (2(m + 1) ||f|| + gamma) at every prefix.

    j(n') counts the blocks started before n'. Returns (ok, worst gap / bound).
    """
    if f.lipschitz > 1.0 + LIPSCHITZ_TOL:
        raise ValueError(f"observable has Lipschitz constant {f.lipschitz}; rescale it to at most 1")
    if t.n == 0:
        return True, 0.0
    gaps = np.abs(birkhoff_gaps(t, ifs, f))
    starts = np.array([b.start for b in t.blocks])
    prefixes = np.arange(1, t.n + 1)
    levels = np.searchsorted(np.sort(starts), prefixes, side="left")
    bound = levels * (2 * (t.m + 1) * f.sup_norm() + t.gamma)
    ratios = np.divide(gaps, bound, out=np.zeros_like(gaps), where=bound > 0)
    worst = float(ratios.max())
    return worst <= 1.0 + 1e-9, worst


@dataclass
class SurvivalRow:
    blocks: int
    survival: float
    ci_low: float
    ci_high: float
    envelope: Optional[float]


def survival_table(coupling_blocks: Sequence[Optional[int]], alpha_hat: Optional[float],
                   l_max: int = 20) -> list[SurvivalRow]:
    """Fraction still uncoupled after l blocks (None = never coupled), with (1 - alpha)^l."""
    total = len(coupling_blocks)
    never = sum(1 for b in coupling_blocks if b is None)
    coupled = np.array([b for b in coupling_blocks if b is not None], dtype=int)
    rows = []
    for l in range(l_max + 1):
        alive = never + int(np.sum(coupled > l))
        low, high = clopper_pearson(alive, total)
        envelope = None if alpha_hat is None else (1.0 - alpha_hat) ** l
        rows.append(SurvivalRow(l, alive / total, low, high, envelope))
    return rows


def block_tail_stats(transcripts: Sequence[CouplingTranscript], alpha_hat: Optional[float] = None,
                     l_max: int = 20) -> list[SurvivalRow]:
    if len(transcripts) < 100:
        raise ValueError("block_tail_stats needs at least 100 transcripts")
    if alpha_hat is None:
        alpha_hat = transcripts[0].alpha_hat
    return survival_table([t.coupled_at_block for t in transcripts], alpha_hat, l_max)


@dataclass
class PairedGapRow:
    n: int
    mean_abs_gap: float
    mean_signed_gap: float
    stderr: float
    coupled_fraction: float


def paired_sum_gap(ifs: IFS, f: Observable, x: PointLike, y: PointLike, n_list: Sequence[int],
                   replicates: int, seed: int, *, arc: Arc, m: int, q: float, tail_horizon: int = 64,
                   alpha_hat: Optional[float] = None) -> list[PairedGapRow]:
    """Mean |S_n f(omega, x) - S_n f(omega', y)| over pairing transcripts."""
    ns = sorted(set(int(n) for n in n_list))
    if not ns or ns[0] < 1:
        raise ValueError("n_list must contain positive integers")
    transcripts = pairing_batch(ifs, x, y, arc, m, ns[-1], q, replicates, seed, tail_horizon, alpha_hat)
    gaps = np.stack([birkhoff_gaps(t, ifs, f) for t in transcripts])
    rows = []
    for n in ns:
        g = gaps[:, n - 1]
        coupled = np.mean([t.coupled and t.blocks[t.coupled_at_block - 1].start < n for t in transcripts])
        rows.append(PairedGapRow(
            n=n,
            mean_abs_gap=float(np.abs(g).mean()),
            mean_signed_gap=float(g.mean()),
            stderr=float(g.std(ddof=1) / math.sqrt(g.size)) if g.size > 1 else 0.0,
            coupled_fraction=float(coupled),
        ))
    return rows


def pairing_envelope(m: int, gamma: float, alpha: float, f_sup: float, n_list: Sequence[int],
                     beta: float = 0.25) -> list[dict]:
    """n^beta (2(m + 1)||f|| + gamma) + 2n ||f|| (1 - alpha)^(n^beta) per n."""
    rows = []
    for n in n_list:
        coupled_part = n**beta * (2 * (m + 1) * f_sup + gamma)
        uncoupled_part = 2 * n * f_sup * (1.0 - alpha) ** (n**beta)
        rows.append({
            "n": int(n),
            "coupled_part": coupled_part,
            "uncoupled_part": uncoupled_part,
            "total": coupled_part + uncoupled_part,
        })
    return rows
