# graphical/__init__.py

from .boundary import eta_qn, implied_lower_bound, indicators, min_neighborhood_gap
from .rate_coupling import build_rate_coupled, couple_rates, dominates
from .replay import Boundary, CouplingReport, couple_monotone, replay
from .symbols import SymbolType
from .timeline import GraphicalTimeline, Region, build_coupled

__all__ = [
    "eta_qn", "implied_lower_bound", "indicators", "min_neighborhood_gap",
    "build_rate_coupled", "couple_rates", "dominates",
    "Boundary", "CouplingReport", "couple_monotone", "replay",
    "SymbolType", "GraphicalTimeline", "Region", "build_coupled",
]
