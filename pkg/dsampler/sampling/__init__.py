"""
Сэмплеры: цикл DSS, прямой Монте-Карло и полный перебор, дерево событий и границы.
"""

from dsampler.sampling.bounds import BoundsResult, bounds, var_bounds
from dsampler.sampling.dss import DssRun, StopRule, dss_run
from dsampler.sampling.exhaustive import AuditReport, OracleResult, audit_ft, exhaustive_subset
from dsampler.sampling.mc import MCResult, mc_run
from dsampler.sampling.tree import SampleTree, TraceStep

__all__ = [
    "AuditReport",
    "BoundsResult",
    "DssRun",
    "MCResult",
    "OracleResult",
    "SampleTree",
    "StopRule",
    "TraceStep",
    "audit_ft",
    "bounds",
    "dss_run",
    "exhaustive_subset",
    "mc_run",
    "var_bounds",
]
