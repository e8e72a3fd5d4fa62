from typing import Any, Dict, List

from contact_lattice.core.exceptions import SpecValidationError
from contact_lattice.harness.spec import parse_spec


def spec_errors(data: Dict[str, Any]) -> List[Dict[str, Any]]:
    """Machine-readable errors (loc, msg, type); empty when the spec is valid."""
    try:
        parse_spec(data)
    except SpecValidationError as exc:
        return exc.errors
    return []


def validate_spec(data: Dict[str, Any]) -> List[str]:
    """Validates an experiment spec document; returns error strings."""
    errors = []
    for err in spec_errors(data):
        if err.get("type") == "missing":
            errors.append(f"Missing key: {err['loc']}")
        else:
            errors.append(f"{err['loc']}: {err['msg']}")
    return errors
