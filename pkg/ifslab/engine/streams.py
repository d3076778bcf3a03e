"""Counter-based random streams and the chunked worker pool.

Every random draw in ifslab comes from a Philox generator keyed by
(master seed, purpose, chunk index). Work is cut into fixed-size chunks
before it is handed to workers, so the numbers each chunk sees never depend
on how many workers run.
"""

import hashlib
import logging
import zlib
from multiprocessing import Pool
from typing import Callable, Optional, Sequence, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

CHUNK_SIZE = 4096

T = TypeVar("T")
R = TypeVar("R")

_workers = 1


def set_workers(n: int) -> None:
    """Set the process count used by ``run_chunks``; values below 2 run serially."""
    global _workers
    _workers = max(1, int(n))


def purpose_tag(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


def stream(seed: int, purpose: str, index: int = 0) -> np.random.Generator:
    """Independent generator for one (seed, purpose, index) triple."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(purpose_tag(purpose), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(master: int, tag: str) -> int:
    """64-bit seed for a named sub-experiment of a master seed."""
    digest = hashlib.sha256(f"{int(master)}:{tag}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def chunk_layout(total: int, chunk_size: int = CHUNK_SIZE) -> list[tuple[int, int]]:
    """(chunk index, size) pairs covering ``total`` items in order."""
    if total < 0:
        raise ValueError("total must be non-negative")
    return [(i, min(chunk_size, total - start)) for i, start in enumerate(range(0, total, chunk_size))]


def run_chunks(fn: Callable[[T], R], tasks: Sequence[T], workers: Optional[int] = None) -> list[R]:
    """Map ``fn`` over tasks, in order, serially or on a process pool."""
    workers = _workers if workers is None else max(1, int(workers))
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    processes = min(workers, len(tasks))
    logger.debug("dispatching %d chunks to %d processes", len(tasks), processes)
    with Pool(processes=processes) as pool:
        return pool.map(fn, tasks)


def symbol_draws(rng: np.random.Generator, cum_probs: np.ndarray, shape) -> np.ndarray:
    """Zero-based symbols distributed by the probability vector behind ``cum_probs``."""
    u = rng.random(shape)
    k = len(cum_probs)
    return np.minimum(np.searchsorted(cum_probs, u, side="right"), k - 1)

