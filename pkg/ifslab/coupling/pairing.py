"""Block-by-block pairing of two symbol sequences that steers two chains together.

A tape omega of n uniform symbols is drawn first. Blocks of m symbols are
paired by rank: words that bring the x-chain into the target arc are matched
with words that bring the y-chain there, and the remaining words are matched
between the complements. After a successful block both chains read identical
symbols for as long as the image of the arc keeps contracting.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..engine.chain import orbit
from ..engine.dual import DEFAULT_NODE_BUDGET, tree_levels
from ..engine.ifs import IFS
from ..engine.streams import chunk_layout, run_chunks, stream
from ..errors import BudgetExceeded, EmptySuccessSet, NonPositiveCommonCardinality
from ..geometry.circle import Arc, PointLike, _value, arc_contains, arc_contains_array, wrap
from ..geometry.homeo import Word

logger = logging.getLogger(__name__)

TRANSCRIPT_CHUNK = 32


def _require_uniform(ifs: IFS) -> None:
    if not ifs.is_uniform:
        raise ValueError("pairing needs an equal-weight system; uniformize it first")


def success_codes(ifs: IFS, x: float, arc: Arc, m: int, node_budget: int = DEFAULT_NODE_BUDGET) -> np.ndarray:
    """Lexicographic codes (first symbol most significant) of length-m words with g_w(x) in arc, sorted."""
    k = ifs.k
    if k**m > node_budget:
        raise BudgetExceeded(f"{k}^{m} words exceed the node budget {node_budget}")
    positions = list(tree_levels(ifs, np.array([x]), m))[-1][0]
    idx = np.flatnonzero(arc_contains_array(arc, positions))
    # tree index keeps the last symbol most significant; reverse the digits
    codes = np.zeros_like(idx)
    rest = idx.copy()
    for j in range(m):
        codes += (rest % k) * k ** (m - 1 - j)
        rest //= k
    return np.sort(codes)


def decode(code: int, k: int, m: int) -> list[int]:
    """Zero-based symbols of a lexicographic code."""
    digits = []
    for _ in range(m):
        digits.append(int(code % k))
        code //= k
    return digits[::-1]


def encode(symbols: Sequence[int], k: int) -> int:
    code = 0
    for s in symbols:
        code = code * k + int(s)
    return code


def success_words(ifs: IFS, x: PointLike, arc: Arc, m: int,
                  node_budget: int = DEFAULT_NODE_BUDGET) -> list[Word]:
    """All length-m words steering x into the arc, in lexicographic order."""
    _require_uniform(ifs)
    codes = success_codes(ifs, _value(x), arc, m, node_budget)
    if codes.size == 0:
        raise EmptySuccessSet(f"no word of length {m} steers {_value(x)} into {arc.as_tuple()}")
    return [Word(tuple(s + 1 for s in decode(c, ifs.k, m))) for c in codes]


@dataclass
class Block:
    start: int
    word: tuple[int, ...]
    partner: tuple[int, ...]
    success: bool
    tail_length: int = 0
    common_cardinality: int = 0
    landing: Optional[tuple[float, float]] = None


@dataclass
class CouplingTranscript:
    x: float
    y: float
    arc: Arc
    m: int
    n: int
    q: float
    alpha_hat: Optional[float]
    tail_horizon: int
    omega: Word
    omega_prime: Word
    blocks: list[Block] = field(default_factory=list)
    coupled: bool = False
    coupled_at_block: Optional[int] = None

    @property
    def gamma(self) -> float:
        return 1.0 / (1.0 - self.q)

    @property
    def level(self) -> int:
        """Number of blocks started."""
        return len(self.blocks)

    def level_at(self, prefix: int) -> int:
        """Blocks started before symbol position ``prefix``."""
        return sum(1 for b in self.blocks if b.start < prefix)

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "arc": list(self.arc.as_tuple()),
            "m": self.m,
            "n": self.n,
            "level": self.level,
            "coupled": self.coupled,
            "coupled_at_block": self.coupled_at_block,
            "constants": {"q": self.q, "gamma": self.gamma, "alpha_hat": self.alpha_hat},
            "tail_horizon": self.tail_horizon,
            "omega": list(self.omega.symbols),
            "omega_prime": list(self.omega_prime.symbols),
            "blocks": [
                {
                    "start": b.start,
                    "word": [s + 1 for s in b.word],
                    "partner": [s + 1 for s in b.partner],
                    "success": b.success,
                    "tail_length": b.tail_length,
                    "common_cardinality": b.common_cardinality,
                }
                for b in self.blocks
            ],
        }


def _pair_block(ifs: IFS, cx: float, cy: float, arc: Arc, word: list[int], node_budget: int):
    k, m = ifs.k, len(word)
    gx = success_codes(ifs, cx, arc, m, node_budget)
    gy = success_codes(ifs, cy, arc, m, node_budget)
    if gx.size == 0 and gy.size == 0:
        raise EmptySuccessSet(f"neither {cx} nor {cy} can reach {arc.as_tuple()} in {m} steps")
    common = min(gx.size, gy.size)
    if common <= 0:
        raise NonPositiveCommonCardinality(
            f"success sets of sizes {gx.size} and {gy.size} have no common part"
        )
    sx, sy = gx[:common], gy[:common]
    code = encode(word, k)
    rank = int(np.searchsorted(sx, code))
    if rank < common and sx[rank] == code:
        return decode(int(sy[rank]), k, m), True, common
    # failure words pair by rank between the complements
    all_codes = np.arange(k**m)
    cx_codes = np.setdiff1d(all_codes, sx, assume_unique=True)
    cy_codes = np.setdiff1d(all_codes, sy, assume_unique=True)
    rank = int(np.searchsorted(cx_codes, code))
    return decode(int(cy_codes[rank]), k, m), False, common


def _advance(ifs: IFS, x: float, symbols: Sequence[int]) -> float:
    return float(orbit(ifs, x, np.asarray(symbols, dtype=np.int64))[-1])


def draw_tape(ifs: IFS, n: int, rng: np.random.Generator) -> np.ndarray:
    """n uniform zero-based symbols; a longer tape from the same stream extends a shorter one."""
    return np.minimum(np.floor(rng.random(n) * ifs.k).astype(np.int64), ifs.k - 1)


def pairing_sampler(ifs: IFS, x: PointLike, y: PointLike, arc: Arc, m: int, n: int, q: float,
                    tail_horizon: int = 64, seed: int = 0, alpha_hat: Optional[float] = None,
                    node_budget: int = DEFAULT_NODE_BUDGET, index: int = 0) -> CouplingTranscript:
    """Build omega and its partner omega' for starts x and y.

    Tails are checked against q^t times the length of the arc. A tail that
    survives ``tail_horizon`` steps, or reaches n, couples the pair and the
    rest of omega' copies omega.
    """
    _require_uniform(ifs)
    if not arc.full and arc.length <= 0:
        raise ValueError("arc must have positive length")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    if m < 1 or n < 0:
        raise ValueError("m must be positive and n non-negative")

    tape = draw_tape(ifs, n, stream(seed, "pairing", index))
    cx, cy = _value(x), _value(y)
    partner: list[int] = []
    blocks: list[Block] = []
    coupled_at: Optional[int] = None
    base_length = arc.length
    pos = 0

    while pos < n:
        if coupled_at is not None:
            partner.extend(tape[pos:].tolist())
            break
        start = pos
        word = tape[pos:pos + m].tolist()
        if len(word) < m:
            # last, incomplete block: identical symbols
            partner.extend(word)
            blocks.append(Block(start, tuple(word), tuple(word), False))
            pos = n
            break

        mapped, success, common = _pair_block(ifs, cx, cy, arc, word, node_budget)
        partner.extend(mapped)
        cx, cy = _advance(ifs, cx, word), _advance(ifs, cy, mapped)
        pos += m
        block = Block(start, tuple(word), tuple(mapped), success, common_cardinality=common, landing=(cx, cy))
        blocks.append(block)
        if not success:
            continue

        lo = arc.start.value
        hi = lo + base_length
        t = 0
        survived = True
        while pos < n and t < tail_horizon:
            s = int(tape[pos])
            partner.append(s)
            g = ifs.maps[s]
            cx, cy = wrap(g.lift(cx)), wrap(g.lift(cy))
            lo, hi = float(g.lift(lo)), float(g.lift(hi))
            pos += 1
            t += 1
            if hi - lo > q**t * base_length:
                survived = False
                break
        block.tail_length = t
        if survived:
            coupled_at = len(blocks)

    transcript = CouplingTranscript(
        x=_value(x), y=_value(y), arc=arc, m=m, n=n, q=q, alpha_hat=alpha_hat,
        tail_horizon=tail_horizon,
        omega=Word(tuple(int(s) + 1 for s in tape)),
        omega_prime=Word(tuple(int(s) + 1 for s in partner)),
        blocks=blocks, coupled=coupled_at is not None, coupled_at_block=coupled_at,
    )
    return transcript


def _transcript_chunk(args) -> list[CouplingTranscript]:
    ifs, x, y, arc, m, n, q, tail_horizon, seed, alpha_hat, node_budget, first, size = args
    return [
        pairing_sampler(ifs, x, y, arc, m, n, q, tail_horizon, seed, alpha_hat, node_budget, index=i)
        for i in range(first, first + size)
    ]


def pairing_batch(ifs: IFS, x: PointLike, y: PointLike, arc: Arc, m: int, n: int, q: float,
                  replicates: int, seed: int, tail_horizon: int = 64, alpha_hat: Optional[float] = None,
                  node_budget: int = DEFAULT_NODE_BUDGET) -> list[CouplingTranscript]:
    """Independent transcripts; transcript r always reads stream index r."""
    tasks = [
        (ifs, _value(x), _value(y), arc, m, n, q, tail_horizon, seed, alpha_hat, node_budget,
         i * TRANSCRIPT_CHUNK, size)
        for i, size in chunk_layout(replicates, TRANSCRIPT_CHUNK)
    ]
    out: list[CouplingTranscript] = []
    for part in run_chunks(_transcript_chunk, tasks):
        out.extend(part)
    return out


def landed_in_arc(t: CouplingTranscript) -> bool:
    """Every success block leaves both chains inside the arc."""
    return all(arc_contains(t.arc, b.landing[0]) and arc_contains(t.arc, b.landing[1])
               for b in t.blocks if b.success)
