# harness/runner.py

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from contact_lattice.core.exceptions import ContactLatticeError, SpecValidationError
from contact_lattice.harness.artifacts import ArtifactWriter
from contact_lattice.harness.experiments import ExperimentOutcome, RunContext
from contact_lattice.harness.registry import get_experiment
from contact_lattice.harness.spec import ExperimentSpec, HarnessDefaults, parse_spec, spec_hash

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID_SPEC = 1
EXIT_RUNTIME_FAILURE = 2
EXIT_CHECK_FAILED = 3


@dataclass
class RunResult:
    exit_code: int
    outcome: Optional[ExperimentOutcome] = None
    artifacts: List[Path] = field(default_factory=list)
    error: Optional[Dict[str, Any]] = None
    spec_hash: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK


def run_experiment(spec: Union[ExperimentSpec, Mapping[str, Any]], seed_override: Optional[int] = None,
                   out_override: Optional[Union[str, Path]] = None,
                   defaults: Optional[HarnessDefaults] = None) -> RunResult:
    """Validate, run and write artifacts. Errors become exit codes with a
    machine-readable report instead of propagating."""
    try:
        if not isinstance(spec, ExperimentSpec):
            spec = parse_spec(dict(spec))
    except SpecValidationError as exc:
        logger.error("%s", exc)
        return RunResult(EXIT_INVALID_SPEC, error=exc.to_dict())

    defaults = defaults or HarnessDefaults()
    if out_override is None and "dir" not in spec.outputs.model_fields_set:
        out_override = defaults.output_dir
    spec = spec.with_overrides(seed_override, None if out_override is None else str(out_override))
    digest = spec_hash(spec)
    for warning in spec.positivity_warnings():
        logger.warning("Spec %s: %s", digest, warning)

    writer = ArtifactWriter(spec.outputs.dir, digest, spec.master_seed, spec.experiment, spec.prefix)
    logger.info("Running %s (spec %s, seed %d)", spec.experiment, digest, spec.master_seed)
    try:
        outcome = get_experiment(spec.experiment)(spec, RunContext(writer, defaults))
    except ContactLatticeError as exc:
        logger.error("%s failed: %s", spec.experiment, exc)
        return RunResult(EXIT_RUNTIME_FAILURE, artifacts=list(writer.written), spec_hash=digest,
                         error={"error": type(exc).__name__, "message": str(exc)})

    code = EXIT_OK if outcome.passed else EXIT_CHECK_FAILED
    if not outcome.passed:
        logger.warning("%s finished with failed acceptance checks", spec.experiment)
    else:
        logger.info("%s finished, %d artifact(s)", spec.experiment, len(writer.written))
    return RunResult(code, outcome, list(writer.written), spec_hash=digest)
