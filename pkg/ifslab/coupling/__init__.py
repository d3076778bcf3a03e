"""Pairing of symbol sequences and the checks built on it."""

from .checks import (
    block_tail_stats,
    paired_sum_gap,
    pairing_envelope,
    survival_table,
    verify_p3,
)
from .pairing import CouplingTranscript, pairing_batch, pairing_sampler, success_words

__all__ = [
    "block_tail_stats", "paired_sum_gap", "pairing_envelope", "survival_table", "verify_p3",
    "CouplingTranscript", "pairing_batch", "pairing_sampler", "success_words",
]
