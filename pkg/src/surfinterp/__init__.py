"""Minimal surfaces in E^3 and maximal surfaces in L^3 from real-analytic data."""

__version__ = "0.1.0"

from .analytic import AnalyticMap, DiscDomain, sup_norm  # noqa: E402
from .bjorling import BjorlingData, IsotropicCurve, eta_budget, sample_patch, solve  # noqa: E402
from .metric import Metric  # noqa: E402

__all__ = [
    "AnalyticMap",
    "DiscDomain",
    "sup_norm",
    "BjorlingData",
    "IsotropicCurve",
    "solve",
    "sample_patch",
    "eta_budget",
    "Metric",
]
