"""Birkhoff sums, the Maxwell-Woodroofe statistic and normality checks."""

from .birkhoff import birkhoff_sum, birkhoff_sums, center_observable, sn_star_samples
from .maxwell_woodroofe import MWReport, loglog_slope, mw_statistic, uniform_sum_gap
from .normality import (
    CLTReport,
    charfn_gap,
    clt_report,
    normality_test,
    second_moment,
    sigma2_ci,
    sigma2_estimate,
)

__all__ = [
    "birkhoff_sum", "birkhoff_sums", "center_observable", "sn_star_samples",
    "MWReport", "loglog_slope", "mw_statistic", "uniform_sum_gap",
    "CLTReport", "charfn_gap", "clt_report", "normality_test", "second_moment",
    "sigma2_ci", "sigma2_estimate",
]
