"""Variance and normality checks for the normalized sums S_n*."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from ..engine.ifs import IFS
from ..engine.observables import Observable
from ..engine.streams import derive_seed
from ..errors import DegenerateSample
from ..geometry.circle import PointLike, _value
from .birkhoff import sn_star_samples

logger = logging.getLogger(__name__)

DEGENERATE_VARIANCE = 1e-12
MIN_KS_SAMPLES = 100


@dataclass
class CLTReport:
    n: int
    replicates: int
    sigma2_hat: Optional[float]
    sigma2_ci: Optional[tuple[float, float]]
    second_moment: float
    sample_mean: float
    ks_stat: Optional[float]
    p_value: Optional[float]
    centering_error: float
    start_mode: str
    degenerate: bool = False


def sigma2_estimate(samples: Sequence[float]) -> float:
    """Unbiased sample variance of the replicates."""
    arr = np.asarray(samples, dtype=float)
    if arr.size < 2:
        raise ValueError("sigma2_estimate needs at least 2 samples")
    s2 = float(arr.var(ddof=1))
    if s2 < DEGENERATE_VARIANCE:
        raise DegenerateSample(f"sample variance {s2:.3g} is below {DEGENERATE_VARIANCE}")
    return s2


def second_moment(samples: Sequence[float]) -> float:
    """Mean of squares; the variance estimate that treats the mean as zero."""
    arr = np.asarray(samples, dtype=float)
    return float(np.mean(arr**2))


def sigma2_ci(samples: Sequence[float], level: float = 0.95) -> tuple[float, float]:
    """Chi-square interval for the variance of (approximately) normal samples."""
    arr = np.asarray(samples, dtype=float)
    dof = arr.size - 1
    s2 = float(arr.var(ddof=1))
    alpha = 1.0 - level
    return dof * s2 / stats.chi2.ppf(1 - alpha / 2, dof), dof * s2 / stats.chi2.ppf(alpha / 2, dof)


def normality_test(samples: Sequence[float], sigma2: float) -> tuple[float, float]:
    """One-sample KS test against N(0, sigma2) with the asymptotic p-value."""
    arr = np.asarray(samples, dtype=float)
    if arr.size < MIN_KS_SAMPLES:
        raise ValueError(f"normality_test needs at least {MIN_KS_SAMPLES} samples")
    if sigma2 <= DEGENERATE_VARIANCE or np.ptp(arr) == 0.0:
        raise DegenerateSample("cannot test normality of a degenerate sample")
    result = stats.kstest(arr, "norm", args=(0.0, math.sqrt(sigma2)), method="asymp")
    return float(result.statistic), float(result.pvalue)


def clt_report(samples: np.ndarray, n: int, start_mode: str, centering_error: float = 0.0) -> CLTReport:
    """Summarize one replicate set; degenerate samples are reported, not raised."""
    try:
        s2 = sigma2_estimate(samples)
    except DegenerateSample:
        return CLTReport(n, samples.size, None, None, second_moment(samples), float(samples.mean()),
                         None, None, centering_error, start_mode, degenerate=True)
    ks, p = normality_test(samples, s2) if samples.size >= MIN_KS_SAMPLES else (None, None)
    return CLTReport(n, samples.size, s2, sigma2_ci(samples), second_moment(samples), float(samples.mean()),
                     ks, p, centering_error, start_mode)


@dataclass
class CharFnRow:
    n: int
    t: float
    gap: float
    fixed_re: float
    fixed_im: float
    stationary_re: float
    stationary_im: float


def empirical_charfn(samples: np.ndarray, t: float) -> complex:
    return complex(np.mean(np.exp(1j * t * samples)))


def charfn_gap(ifs: IFS, f: Observable, x: PointLike, n_list: Sequence[int], t_list: Sequence[float],
               replicates: int, seed: int, burn_in: int = 1000) -> list[CharFnRow]:
    """|E exp(it S_n*) from x minus the same from stationary starts| per (n, t)."""
    if replicates < 1000:
        raise ValueError("charfn_gap needs at least 1000 replicates")
    rows = []
    for n in n_list:
        fixed = sn_star_samples(ifs, f, n, replicates, burn_in, _value(x), derive_seed(seed, f"charfn-fixed-{n}"))
        stationary = sn_star_samples(ifs, f, n, replicates, burn_in, "stationary",
                                     derive_seed(seed, f"charfn-stationary-{n}"))
        for t in t_list:
            a, b = empirical_charfn(fixed, t), empirical_charfn(stationary, t)
            rows.append(CharFnRow(int(n), float(t), abs(a - b), a.real, a.imag, b.real, b.imag))
    return rows
