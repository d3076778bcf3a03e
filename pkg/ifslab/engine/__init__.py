"""The iterated function system, its Markov and dual operators, and chain sampling."""

from .chain import endpoint_positions, simulate_chain, simulate_path, stationary_sample
from .dual import dual_exact, dual_levels, dual_mc, dual_sum_batch, dual_sum_exact, mc_values
from .ifs import IFS, common_denominator, inverse_system, markov_push, support_step, uniformize
from .measure import EmpiricalMeasure
from .observables import Harmonic, Observable, PiecewiseLinearFn, observable_from_record

__all__ = [
    "endpoint_positions", "simulate_chain", "simulate_path", "stationary_sample",
    "dual_exact", "dual_levels", "dual_mc", "dual_sum_batch", "dual_sum_exact", "mc_values",
    "IFS", "common_denominator", "inverse_system", "markov_push", "support_step", "uniformize",
    "EmpiricalMeasure",
    "Harmonic", "Observable", "PiecewiseLinearFn", "observable_from_record",
]
