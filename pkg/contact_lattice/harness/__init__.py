# harness/__init__.py

from .artifacts import ArtifactWriter, read_csv, read_csv_header, read_json
from .oracle_check import OracleCheck, run_oracle_checks
from .runner import RunResult, run_experiment
from .sharpness import SharpnessReport, sharpness_scan
from .spec import ExperimentSpec, HarnessDefaults, parse_spec, spec_hash

__all__ = [
    "ArtifactWriter", "read_csv", "read_csv_header", "read_json",
    "OracleCheck", "run_oracle_checks",
    "RunResult", "run_experiment",
    "SharpnessReport", "sharpness_scan",
    "ExperimentSpec", "HarnessDefaults", "parse_spec", "spec_hash",
]
