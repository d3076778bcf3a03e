"""Measure-level tools: circular Wasserstein-1, the chi metric, support diagnostics."""

from .chi import ChiMetric, chi_eval, chi_lipschitz_probe, chi_nonexpansiveness, chi_table
from .support import atom_scan, max_gap, max_gap_points
from .wasserstein import invariance_residual, nonexpansiveness_probe, w1_circle

__all__ = [
    "ChiMetric", "chi_eval", "chi_lipschitz_probe", "chi_nonexpansiveness", "chi_table",
    "atom_scan", "max_gap", "max_gap_points",
    "invariance_residual", "nonexpansiveness_probe", "w1_circle",
]
