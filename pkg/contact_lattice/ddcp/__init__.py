# ddcp/__init__.py

from .laws import DensityLaw, LawKind, eval_law
from .stationary import MonteCarloOptions, StationaryFixedPoint, solve_stationary, solve_stationary_multistart
from .trajectory import InitialLaw, TrajectorySolution, solve_trajectory

__all__ = [
    "DensityLaw", "LawKind", "eval_law",
    "MonteCarloOptions", "StationaryFixedPoint", "solve_stationary", "solve_stationary_multistart",
    "InitialLaw", "TrajectorySolution", "solve_trajectory",
]
