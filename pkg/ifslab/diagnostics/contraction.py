"""Synchronization evidence: geometric contraction of arcs under random words,
and the number of steps after which every start reaches a given arc.
"""

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.stats import binomtest

from ..engine.chain import endpoint_positions
from ..engine.dual import DEFAULT_NODE_BUDGET, tree_levels
from ..engine.ifs import IFS
from ..engine.measure import EmpiricalMeasure
from ..errors import NoContractionFound, NotReached
from ..geometry.circle import Arc, CirclePoint, arc_contains_array
from ..engine.streams import stream

logger = logging.getLogger(__name__)

CONTRACTION_SLOPE = -1e-9
MIN_LENGTH = 1e-300
CONFIDENCE = 0.95


def clopper_pearson(successes: int, trials: int, level: float = CONFIDENCE) -> tuple[float, float]:
    ci = binomtest(int(successes), int(trials)).proportion_ci(confidence_level=level, method="exact")
    return float(ci.low), float(ci.high)


def default_arcs(count: int = 16, length: float = 0.1) -> list[Arc]:
    """``count`` arcs of the given length starting on a uniform grid."""
    return [Arc(CirclePoint(i / count), CirclePoint(i / count + length)) for i in range(count)]


@dataclass
class ArcTrial:
    arc: tuple[float, float]
    contracting_paths: int
    q_hat: float
    mass_hat: float


@dataclass
class ContractionCertificate:
    arc: Arc
    q_hat: float
    q_ci: tuple[float, float]
    depth: int
    mass_hat: float
    mass_ci: tuple[float, float]
    trials: int
    seed: int
    m: Optional[int] = None
    hit_mass_hat: Optional[float] = None
    hit_mass_ci: Optional[tuple[float, float]] = None
    stationary_half_mass: Optional[float] = None
    candidates: list[ArcTrial] = field(default_factory=list)

    @property
    def gamma(self) -> float:
        return 1.0 / (1.0 - self.q_hat) if self.q_hat < 1.0 else math.inf

    @property
    def alpha_hat(self) -> Optional[float]:
        """Per-block success probability lower estimate: hitting mass times contraction mass."""
        if self.hit_mass_hat is None:
            return None
        return self.hit_mass_hat * self.mass_hat

    def to_dict(self) -> dict:
        data = asdict(self)
        data["arc"] = list(self.arc.as_tuple())
        data["gamma"] = self.gamma
        data["alpha_hat"] = self.alpha_hat
        return data


def arc_length_paths(ifs: IFS, arc: Arc, depth: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Lengths |g_{i_t..i_1}(I)| for t = 0..depth along ``trials`` random paths; shape (depth + 1, trials)."""
    lo = np.full(trials, arc.start.value)
    hi = lo + arc.length
    lengths = np.empty((depth + 1, trials))
    lengths[0] = hi - lo
    symbols = ifs.draw(rng, (depth, trials))
    for t in range(depth):
        lo, hi = ifs.lift_step(lo, symbols[t]), ifs.lift_step(hi, symbols[t])
        shift = np.floor(lo)
        lo, hi = lo - shift, hi - shift
        lengths[t + 1] = hi - lo
    return lengths


def _evaluate_arc(ifs: IFS, arc: Arc, depth: int, trials: int, rng: np.random.Generator):
    lengths = np.maximum(arc_length_paths(ifs, arc, depth, trials, rng), MIN_LENGTH)
    t = np.arange(1, depth + 1)[:, None]
    log_ratio = np.log(lengths[1:]) - np.log(lengths[0])
    # tightest geometric envelope per path: L_t <= exp(s t) L_0 for all t
    slopes = (log_ratio / t).max(axis=0)
    contracting = slopes < CONTRACTION_SLOPE
    n_contracting = int(contracting.sum())
    if n_contracting == 0:
        return 0, 1.0, (1.0, 1.0), 0, lengths
    s = slopes[contracting]
    mean = float(s.mean())
    half = 1.96 * float(s.std(ddof=1)) / math.sqrt(s.size) if s.size > 1 else 0.0
    q_hat = min(1.0, math.exp(mean))
    q_ci = (min(1.0, math.exp(mean - half)), min(1.0, math.exp(mean + half)))
    envelope = q_hat ** t * lengths[0]
    inside = np.all(lengths[1:] <= envelope * (1.0 + 1e-12), axis=0)
    return n_contracting, q_hat, q_ci, int(inside.sum()), lengths


def contraction_certificate(ifs: IFS, candidate_arcs: Optional[Sequence[Arc]] = None, depth: int = 32,
                            trials: int = 2000, seed: int = 0) -> ContractionCertificate:
    """Pick the candidate arc whose random images most often shrink geometrically.

    For each arc and path the smallest rate s with L_t <= e^{st} L_0 for all
    t <= depth is computed; paths with s < 0 are contracting, q_hat is the
    exponential of their mean rate, and mass_hat is the fraction of all paths
    that stay under q_hat^t L_0.
    """
    if depth < 8:
        raise ValueError("depth must be at least 8")
    if trials < 100:
        raise ValueError("trials must be at least 100")
    arcs = list(candidate_arcs) if candidate_arcs else default_arcs()

    best: Optional[ContractionCertificate] = None
    candidates = []
    for index, arc in enumerate(arcs):
        if arc.length <= 0:
            raise ValueError("candidate arcs must have positive length")
        rng = stream(seed, "contraction", index)
        n_contracting, q_hat, q_ci, inside, _ = _evaluate_arc(ifs, arc, depth, trials, rng)
        mass = inside / trials
        candidates.append(ArcTrial(arc.as_tuple(), n_contracting, q_hat, mass))
        if inside and (best is None or mass > best.mass_hat):
            best = ContractionCertificate(
                arc=arc, q_hat=q_hat, q_ci=q_ci, depth=depth, mass_hat=mass,
                mass_ci=clopper_pearson(inside, trials), trials=trials, seed=seed,
            )

    if best is None:
        raise NoContractionFound(
            f"no contracting paths among {len(arcs)} candidate arcs at depth {depth}"
        )
    logger.info("contraction certificate: arc %s, q_hat %.4f, mass %.3f", best.arc.as_tuple(), best.q_hat, best.mass_hat)
    return replace(best, candidates=candidates)


@dataclass
class HittingParameters:
    m: int
    hit_mass_hat: float
    hit_mass_ci: tuple[float, float]
    exact: bool
    worst_x: float


def _exact_hit_masses(ifs: IFS, arc: Arc, xs: np.ndarray, depth: int) -> np.ndarray:
    """P^d delta_x(arc) for d = 0..depth; shape (depth + 1, len(xs))."""
    out = np.empty((depth + 1, xs.size))
    batch = max(1, (2**22) // ifs.k**depth)
    for start in range(0, xs.size, batch):
        roots = xs[start:start + batch]
        for d, (pos, w) in enumerate(tree_levels(ifs, roots, depth)):
            hits = w * arc_contains_array(arc, pos)
            out[d, start:start + roots.size] = hits.reshape(-1, roots.size).sum(axis=0)
    return out


def hitting_parameters(ifs: IFS, arc: Arc, m_max: int, x_grid: int = 64, seed: int = 0,
                       node_budget: int = DEFAULT_NODE_BUDGET, mc_samples: int = 4096) -> HittingParameters:
    """Smallest m <= m_max with P^m delta_x(arc) > 0 on every point of an ``x_grid`` grid."""
    if arc.full:
        return HittingParameters(0, 1.0, (1.0, 1.0), True, 0.0)
    if arc.length <= 0:
        raise ValueError("arc must have positive length")
    xs = np.arange(x_grid) / x_grid

    exact_depth = 0
    while exact_depth < m_max and ifs.k ** (exact_depth + 1) <= node_budget:
        exact_depth += 1
    masses = _exact_hit_masses(ifs, arc, xs, exact_depth)
    for m in range(exact_depth + 1):
        worst = int(np.argmin(masses[m]))
        if masses[m, worst] > 0:
            h = float(masses[m, worst])
            return HittingParameters(m, h, (h, h), True, float(xs[worst]))

    if exact_depth < m_max:
        logger.info("hitting parameters: exact enumeration stops at m=%d, sampling beyond", exact_depth)
        steps = list(range(exact_depth + 1, m_max + 1))
        positions = endpoint_positions(ifs, xs, steps, mc_samples, seed, purpose="hitting")
        for m in steps:
            counts = arc_contains_array(arc, positions[m]).sum(axis=0)
            worst = int(np.argmin(counts))
            if counts[worst] > 0:
                return HittingParameters(
                    m, counts[worst] / mc_samples, clopper_pearson(counts[worst], mc_samples), False, float(xs[worst])
                )

    raise NotReached(f"some grid start never reaches {arc.as_tuple()} within {m_max} steps")


def with_hitting(cert: ContractionCertificate, hitting: HittingParameters,
                 stationary: Optional[EmpiricalMeasure] = None) -> ContractionCertificate:
    """Attach hitting parameters and the stationary half-mass of the arc."""
    half = None if stationary is None else stationary.arc_mass(cert.arc) / 2
    return replace(cert, m=hitting.m, hit_mass_hat=hitting.hit_mass_hat,
                   hit_mass_ci=hitting.hit_mass_ci, stationary_half_mass=half)
