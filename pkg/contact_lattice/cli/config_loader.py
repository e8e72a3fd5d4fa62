from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from contact_lattice.core.exceptions import SpecValidationError
from contact_lattice.harness.spec import ExperimentSpec, HarnessDefaults, parse_spec


def load_system_config(config_path: Optional[Union[str, Path]]) -> HarnessDefaults:
    """Loads the system configuration YAML file; a missing file gives the built-in defaults."""
    if config_path is None or not Path(config_path).exists():
        return HarnessDefaults()
    with open(config_path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    flat: Dict[str, Any] = dict(data.get("harness", {}))
    if "logging" in data:
        flat["logging_level"] = data["logging"].get("level", "INFO")
    if "outputs" in data:
        flat["output_dir"] = data["outputs"].get("dir", "results")
    return HarnessDefaults.model_validate(flat)


def load_spec_document(spec_path: Union[str, Path]) -> Dict[str, Any]:
    """Reads a JSON (or YAML) experiment spec into a plain dict."""
    with open(spec_path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise SpecValidationError([{"loc": "root", "msg": f"unreadable spec: {exc}", "type": "parse_error"}])
    if not isinstance(data, dict):
        raise SpecValidationError([{"loc": "root", "msg": "spec must be a mapping", "type": "type_error"}])
    return data


def load_spec(spec_path: Union[str, Path]) -> ExperimentSpec:
    return parse_spec(load_spec_document(spec_path))
