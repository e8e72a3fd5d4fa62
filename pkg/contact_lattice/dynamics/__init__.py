# dynamics/__init__.py

from .engine import Absorbed, Event, GillespieEngine, SimResult, StepResult, run, step
from .schedule import RateSchedule
from .stationary import DensityEstimate, sample_stationary_configs, stationary_density

__all__ = [
    "Absorbed", "Event", "GillespieEngine", "SimResult", "StepResult", "run", "step",
    "RateSchedule", "DensityEstimate", "sample_stationary_configs", "stationary_density",
]
