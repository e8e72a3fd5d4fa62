# oracle/__init__.py

from .generator import GeneratorMatrix, build_generator
from .solvers import (
    convergence_profile, per_site_stationary, single_site_generator, stationary, transient,
    tv_restricted,
)

__all__ = [
    "GeneratorMatrix", "build_generator", "convergence_profile", "per_site_stationary",
    "single_site_generator", "stationary", "transient", "tv_restricted",
]
