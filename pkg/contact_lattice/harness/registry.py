"""Experiment registry.

Experiment runners register themselves by kind with a decorator; the runner
looks them up by the spec's `experiment` field.
"""
import importlib
import inspect
from typing import Callable, Dict, List

# Global registry of experiment functions by kind
EXPERIMENT_REGISTRY: Dict[str, Callable] = {}


def register_experiment(kind: str):
    """Decorator to register a function as the runner for an experiment kind."""
    def decorator(fn: Callable) -> Callable:
        if not inspect.isfunction(fn):
            raise TypeError(f"{fn!r} must be a function taking (spec, context)")
        if kind in EXPERIMENT_REGISTRY and EXPERIMENT_REGISTRY[kind] is not fn:
            raise ValueError(f"Experiment '{kind}' is already registered")
        EXPERIMENT_REGISTRY[kind] = fn
        fn.experiment_kind = kind
        return fn

    return decorator


def get_experiment(kind: str) -> Callable:
    """Get the runner registered for `kind`."""
    discover_experiments()
    try:
        return EXPERIMENT_REGISTRY[kind]
    except KeyError:
        raise KeyError(f"No experiment registered for kind '{kind}'")


def registered_experiments() -> List[str]:
    discover_experiments()
    return sorted(EXPERIMENT_REGISTRY)


def discover_experiments() -> None:
    """Import the module holding the built-in experiments (registration side effect)."""
    importlib.import_module("contact_lattice.harness.experiments")
