"""
Вспомогательные утилиты.
"""

from dsampler.utils.export import create_curve_report
from dsampler.utils.stats import (
    RateEstimate,
    binomial_factor,
    multi_binomial_factor,
    wilson_interval,
    wilson_variance,
)

__all__ = [
    "RateEstimate",
    "binomial_factor",
    "create_curve_report",
    "multi_binomial_factor",
    "wilson_interval",
    "wilson_variance",
]
