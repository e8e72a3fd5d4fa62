# harness/spec.py
"""Experiment specs.

One JSON (or YAML) document describes one experiment. The document is
validated into `ExperimentSpec`; everything random in a run is derived from
`master_seed` through `contact_lattice.utils.rng.derive_stream`.
"""
import hashlib
import json
import logging
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from contact_lattice.core.exceptions import ContactLatticeError, SpecValidationError
from contact_lattice.core.lattice import Geometry
from contact_lattice.core.rates import Model, QParameterization, RateSet
from contact_lattice.ddcp.laws import DensityLaw

logger = logging.getLogger(__name__)

SPEC_SCHEMA_VERSION = 1

ExperimentKind = Literal[
    "stationary", "tails", "crossings", "scan", "ddcp_trajectory", "ddcp_stationary",
    "couple_check", "oracle_check", "sharpness", "ddcp_percolation",
]

# Experiments that refuse fixed rates violating the uniqueness hypothesis.
NEEDS_POSITIVE_RATES = ("ddcp_stationary", "ddcp_percolation")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RateSetSpec(_Strict):
    """Constant rates. Model A reads kappa_tilde, Model B reads kappa_star."""
    kappa: float = Field(..., ge=0)
    kappa_tilde: Optional[float] = Field(None, ge=0)
    kappa_star: Optional[float] = Field(None, ge=0)
    lam: float = Field(..., ge=0)
    lam_tilde: float = Field(0.0, ge=0)
    h: float = Field(..., ge=0)
    h_tilde: float = Field(0.0, ge=0)

    def to_rates(self, model: str) -> RateSet:
        if model == "A":
            if self.kappa_star is not None:
                raise ValueError("Model A rates take kappa_tilde, not kappa_star")
            return RateSet.model_a(self.kappa, self.kappa_tilde or 0.0, self.lam, self.lam_tilde,
                                   self.h, self.h_tilde)
        if self.kappa_tilde is not None or self.lam_tilde:
            raise ValueError("Model B rates take kappa_star and no lam_tilde")
        return RateSet.model_b(self.kappa, self.kappa_star or 0.0, self.lam, self.h, self.h_tilde)


class QParamSpec(_Strict):
    """Down ratio kappa : kappa_tilde (or kappa_star) and up ratios keyed by
    lam (aggregate 4*lam weight), lam_tilde, h, h_tilde."""
    kappa_ratio: Tuple[float, float]
    up_ratio: Dict[Literal["lam", "lam_tilde", "h", "h_tilde"], float]
    q: float = Field(0.5, ge=0, le=1)

    def to_qparam(self, model: str) -> QParameterization:
        return QParameterization.from_ratios(Model(model), self.kappa_ratio, dict(self.up_ratio), self.q)


class GeometrySpec(_Strict):
    kind: Literal["torus", "rectangle"] = "torus"
    width: int = Field(..., ge=1)
    height: Optional[int] = Field(None, ge=1)
    boundary_state: Literal[-1, 0, 1] = 0

    def to_geometry(self) -> Geometry:
        if self.kind == "torus":
            return Geometry.torus(self.width, self.height)
        return Geometry.rectangle(self.width, self.height, self.boundary_state)


class DensityLawSpec(_Strict):
    kind: Literal["kefi", "constant", "tabulated"]
    beta: Optional[float] = None
    delta: Optional[float] = None
    epsilon: Optional[float] = None
    g: Optional[float] = None
    lam0: Optional[float] = None
    h0: Optional[float] = None
    rho_lam: Optional[List[float]] = None
    lam_values: Optional[List[float]] = None
    rho_h: Optional[List[float]] = None
    h_values: Optional[List[float]] = None

    @model_validator(mode="after")
    def _required_fields(self) -> "DensityLawSpec":
        needed = {
            "kefi": ("beta", "delta", "epsilon", "g"),
            "constant": ("lam0", "h0"),
            "tabulated": ("rho_lam", "lam_values", "rho_h", "h_values"),
        }[self.kind]
        missing = [name for name in needed if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.kind} law needs {', '.join(missing)}")
        return self

    def to_law(self) -> DensityLaw:
        if self.kind == "kefi":
            return DensityLaw.kefi(self.beta, self.delta, self.epsilon, self.g)
        if self.kind == "constant":
            return DensityLaw.constant(self.lam0, self.h0)
        return DensityLaw.tabulated(self.rho_lam, self.lam_values, self.rho_h, self.h_values)


class SamplingSpec(_Strict):
    """Stationary snapshots: `samples` configurations spread over `chains` all-1 runs."""
    samples: int = Field(200, ge=1)
    chains: int = Field(8, ge=1)
    spacing: Optional[float] = Field(None, gt=0)
    coupled: bool = True


class PercolationSpec(_Strict):
    n_grid: List[int] = Field(default_factory=lambda: [1, 2, 4, 8, 16, 32, 64])
    n_list: List[int] = Field(default_factory=lambda: [4])
    eps_hat: Optional[float] = Field(None, gt=0, lt=0.5)
    confidence: float = Field(0.95, gt=0, lt=1)
    min_samples: int = Field(100, ge=1)

    @field_validator("n_grid", "n_list")
    @classmethod
    def _increasing(cls, values: List[int]) -> List[int]:
        if not values or any(v < 1 for v in values) or any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("must be a nonempty increasing list of positive integers")
        return values


class ScanSpec(_Strict):
    parameter: Literal["h", "lambda"] = "h"
    grid: List[float] = Field(..., min_length=1)
    n: int = Field(4, ge=1)
    upper: float = Field(1.0, gt=0)
    bisection_tol: float = Field(0.01, gt=0)


class DdcpSpec(_Strict):
    law: DensityLawSpec
    dt_grid: float = Field(0.5, gt=0)
    tol: float = Field(0.02, gt=0)
    max_sweeps: int = Field(20, ge=1)
    window: Optional[float] = Field(None, gt=0)
    initial: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    damping: float = Field(0.5, gt=0, le=1)
    max_iters: int = Field(50, ge=1)
    stationary_tol: float = Field(1e-3, gt=0)
    noise_tolerant: bool = False
    starts: List[Tuple[float, float]] = Field(default_factory=list)


class CouplingSpec(_Strict):
    """Pairs (q_low, q_high) cycle over replicas. With `rates_high` the check
    couples the spec's rates against a dominating rate set instead."""
    q_pairs: List[Tuple[float, float]] = Field(default_factory=lambda: [(0.3, 0.7)])
    low_state: Literal[-1, 0, 1] = -1
    high_state: Literal[-1, 0, 1] = 1
    random_initial: bool = False
    rates_high: Optional[RateSetSpec] = None

    @field_validator("q_pairs")
    @classmethod
    def _ordered_pairs(cls, pairs: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        for low, high in pairs:
            if not 0 <= low <= high <= 1:
                raise ValueError(f"need 0 <= q_low <= q_high <= 1, got ({low}, {high})")
        return pairs

    @model_validator(mode="after")
    def _ordered_states(self) -> "CouplingSpec":
        if self.low_state > self.high_state:
            raise ValueError("low_state must not exceed high_state")
        return self


class OutputSpec(_Strict):
    dir: str = "results"
    prefix: Optional[str] = None


class ExperimentSpec(_Strict):
    schema_version: int = SPEC_SCHEMA_VERSION
    experiment: ExperimentKind
    model: Literal["A", "B"] = "B"
    rates: Optional[RateSetSpec] = None
    q_param: Optional[QParamSpec] = None
    q_grid: Optional[List[float]] = None
    geometry: Optional[GeometrySpec] = None
    replicas: int = Field(1, ge=1)
    burn_in: float = Field(50.0, ge=0)
    horizon: float = Field(100.0, gt=0)
    sample_dt: Optional[float] = Field(None, gt=0)
    master_seed: int = Field(0, ge=0)
    workers: Optional[int] = Field(None, ge=1)
    sampling: SamplingSpec = Field(default_factory=SamplingSpec)
    percolation: PercolationSpec = Field(default_factory=PercolationSpec)
    scan: Optional[ScanSpec] = None
    ddcp: Optional[DdcpSpec] = None
    coupling: Optional[CouplingSpec] = None
    outputs: OutputSpec = Field(default_factory=OutputSpec)

    @model_validator(mode="after")
    def _experiment_requirements(self) -> "ExperimentSpec":
        kind = self.experiment
        if kind != "oracle_check" and self.geometry is None:
            raise ValueError(f"{kind} needs a geometry")
        if self.rates is not None and self.q_param is not None:
            raise ValueError("give either rates or q_param, not both")
        if kind in ("sharpness",) and (self.q_param is None or not self.q_grid):
            raise ValueError("sharpness needs q_param and a nonempty q_grid")
        if kind == "couple_check":
            rate_coupled = self.coupling is not None and self.coupling.rates_high is not None
            if rate_coupled and self.rates is None:
                raise ValueError("rate coupling needs rates for the low process")
            if not rate_coupled and self.q_param is None:
                raise ValueError("couple_check needs q_param (or coupling.rates_high with rates)")
        if kind in ("stationary", "tails", "crossings", "scan") and self.rates is None and self.q_param is None:
            raise ValueError(f"{kind} needs rates or q_param")
        if kind == "scan" and self.scan is None:
            raise ValueError("scan needs a scan block")
        if kind.startswith("ddcp_"):
            if self.ddcp is None:
                raise ValueError(f"{kind} needs a ddcp block")
            if self.rates is None:
                raise ValueError(f"{kind} needs rates (lam and h are overridden by the law)")
        if self.q_grid is not None and any(b <= a for a, b in zip(self.q_grid, self.q_grid[1:])):
            raise ValueError("q_grid must be increasing")
        if self.q_grid is not None and any(not 0 <= q <= 1 for q in self.q_grid):
            raise ValueError("q_grid values must lie in [0, 1]")
        # builds every domain object once so constraint errors surface as spec errors
        try:
            self.build_rates()
            if self.geometry is not None:
                self.geometry.to_geometry()
            if self.ddcp is not None:
                self.ddcp.law.to_law()
            if self.coupling is not None and self.coupling.rates_high is not None:
                self.coupling.rates_high.to_rates(self.model)
        except ContactLatticeError as exc:
            raise ValueError(str(exc)) from exc
        if kind in NEEDS_POSITIVE_RATES and self.positivity_warnings():
            raise ValueError(f"{kind} needs positive fixed rates: {'; '.join(self.positivity_warnings())}")
        return self

    # === Domain objects ===
    def build_rates(self) -> Optional[RateSet]:
        if self.rates is not None:
            return self.rates.to_rates(self.model)
        if self.q_param is not None:
            return self.q_param.to_qparam(self.model).rates
        return None

    def build_qparam(self) -> Optional[QParameterization]:
        return None if self.q_param is None else self.q_param.to_qparam(self.model)

    def build_geometry(self) -> Geometry:
        if self.geometry is None:
            return Geometry.torus(2, 2)
        return self.geometry.to_geometry()

    def positivity_warnings(self) -> List[str]:
        """Rates that are zero where uniqueness of the stationary law needs them positive."""
        rates = self.build_rates()
        if rates is None or rates.all_positive():
            return []
        zero = [name for name, value in rates.to_dict().items()
                if name != "model" and value == 0 and not (rates.model == Model.B and name == "lam_tilde")]
        if self.experiment.startswith("ddcp_"):
            zero = [name for name in zero if name not in ("lam", "h")]
        return [f"rate {name} is 0" for name in zero]

    @property
    def prefix(self) -> str:
        return self.outputs.prefix or self.experiment

    def with_overrides(self, seed: Optional[int] = None, out: Optional[str] = None) -> "ExperimentSpec":
        update: Dict[str, Any] = {}
        if seed is not None:
            update["master_seed"] = int(seed)
        if out is not None:
            update["outputs"] = self.outputs.model_copy(update={"dir": str(out)})
        return self.model_copy(update=update) if update else self


def spec_hash(spec: ExperimentSpec) -> str:
    """Hash of the canonical JSON of everything except output locations."""
    payload = spec.model_dump(mode="json", exclude={"outputs"})
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _format_loc(loc: Tuple[Any, ...]) -> str:
    return ".".join(["root"] + [str(part) for part in loc])


def parse_spec(data: Any) -> ExperimentSpec:
    """Validate a loaded document; errors carry `loc` in root.a.b form."""
    if not isinstance(data, dict):
        raise SpecValidationError([{"loc": "root", "msg": "spec must be a mapping", "type": "type_error"}])
    try:
        return ExperimentSpec.model_validate(data)
    except ValidationError as exc:
        errors = [{"loc": _format_loc(err["loc"]), "msg": err["msg"], "type": err["type"]}
                  for err in exc.errors()]
        raise SpecValidationError(errors) from exc


class HarnessDefaults(BaseModel):
    """System configuration (config_template.yaml)."""
    model_config = ConfigDict(extra="ignore")

    eps_hat: float = Field(0.05, gt=0, lt=0.5)
    batches: int = Field(20, ge=2)
    spacing: float = Field(5.0, gt=0)
    workers: int = Field(1, ge=1)
    logging_level: str = "INFO"
    output_dir: str = "results"
