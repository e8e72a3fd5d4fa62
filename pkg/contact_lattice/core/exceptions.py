# core/exceptions.py

from typing import Any, Dict, List, Optional


class ContactLatticeError(Exception):
    """Base class for every error raised by the contact-lattice package."""
    pass


class GeometryError(ContactLatticeError):
    """Invalid lattice geometry, or a site / window that falls outside it."""
    pass


class RateError(ContactLatticeError):
    """Rate bundle violates its model's constraints."""
    pass


class ParameterError(ContactLatticeError):
    """An operation was called with arguments outside its precondition."""
    pass


class TimelineError(ContactLatticeError):
    """Graphical timeline does not cover the requested space-time region."""
    pass


class InsufficientSamplesError(ContactLatticeError):
    """Too few samples for a statistical decision."""
    pass


class PropensityDriftError(ContactLatticeError):
    """Incrementally maintained transition-class counts disagree with a rebuild."""
    pass


class OracleError(ContactLatticeError):
    """Exact-oracle computation refused or failed its accuracy check."""
    pass


class ReducibleChainError(OracleError):
    """Generator is reducible; no unique stationary distribution exists."""

    def __init__(self, message: str, closed_classes: Optional[List[List[int]]] = None):
        super().__init__(message)
        self.closed_classes = closed_classes or []


class SpecValidationError(ContactLatticeError):
    """Experiment spec failed validation. Carries machine-readable errors."""

    def __init__(self, errors: List[Dict[str, Any]]):
        self.errors = errors
        summary = "; ".join(f"{e.get('loc', 'root')}: {e.get('msg', '')}" for e in errors)
        super().__init__(f"Invalid experiment spec: {summary}")

    def to_dict(self) -> Dict[str, Any]:
        return {"error": "invalid_spec", "details": self.errors}
