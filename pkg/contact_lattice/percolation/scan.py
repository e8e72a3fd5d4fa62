# percolation/scan.py

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.core.lattice import Geometry
from contact_lattice.core.rates import RateSet
from contact_lattice.dynamics.stationary import sample_stationary_configs
from contact_lattice.percolation.crossing import CrossingSamples, crossing_samples
from contact_lattice.percolation.finite_size import DEFAULT_EPS_HAT, Decision, finite_size_check
from contact_lattice.utils.parallel import map_tasks
from contact_lattice.utils.rng import derive_stream

logger = logging.getLogger(__name__)

Decider = Callable[[RateSet], Decision]


@dataclass(frozen=True)
class SamplingOptions:
    """Stationary sampling for one crossing decision: `chains` independent all-1 runs,
    each contributing `per_chain` snapshots `spacing` apart after `burn_in`."""
    chains: int = 8
    per_chain: int = 16
    burn_in: float = 50.0
    spacing: float = 5.0
    workers: int = 1


def _chain_crossings(task) -> CrossingSamples:
    rates, geometry, n, opts, seed, labels = task
    configs = sample_stationary_configs(rates, geometry, opts.burn_in, opts.per_chain, opts.spacing,
                                        derive_stream(seed, *labels))
    return crossing_samples(configs, n)


def stationary_crossings(rates: RateSet, geometry: Geometry, n: int, opts: SamplingOptions,
                         master_seed: int, label: str = "") -> CrossingSamples:
    if 3 * n > geometry.width or n > geometry.height:
        raise ParameterError(f"Scale n={n} needs a lattice at least {3 * n}x{n}")
    tasks = [(rates, geometry, n, opts, master_seed, (c, "crossings", label)) for c in range(opts.chains)]
    parts = map_tasks(_chain_crossings, tasks, opts.workers)
    merged = parts[0]
    for part in parts[1:]:
        merged = merged.merged(part)
    return merged


def sampling_decider(geometry: Geometry, n: int, eps_hat: float, opts: SamplingOptions,
                     master_seed: int) -> Decider:
    """finite_size_check on fresh stationary samples; the stream depends only on
    (master_seed, lam, h) so repeated evaluations of one point agree."""
    def decide(rates: RateSet) -> Decision:
        label = f"{rates.lam:.12g}/{rates.h:.12g}"
        samples = stationary_crossings(rates, geometry, n, opts, master_seed, label)
        return finite_size_check(samples, n, eps_hat).decision
    return decide


@dataclass
class ThresholdEntry:
    """Bracket [lo, hi] for the onset of Supercritical decisions in the scanned rate."""
    fixed_value: float
    lo: float
    hi: float
    found: bool = True
    trace: List[Tuple[float, str]] = field(default_factory=list)

    @property
    def estimate(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def to_row(self, scan_parameter: str, n: int, eps_hat: float) -> Dict[str, object]:
        fixed = "lambda" if scan_parameter == "h" else "h"
        return {
            fixed: self.fixed_value,
            f"{scan_parameter}_lo": self.lo,
            f"{scan_parameter}_hi": self.hi,
            "n": n,
            "eps_hat": eps_hat,
            "found": self.found,
            "decision_trace": ";".join(f"{v:.6g}:{d}" for v, d in self.trace),
        }


def _rates_at(fixed_rates: RateSet, scan_parameter: str, fixed_value: float, value: float) -> RateSet:
    if scan_parameter == "h":
        return fixed_rates.with_rates(lam=fixed_value, h=value)
    return fixed_rates.with_rates(lam=value, h=fixed_value)


def percolation_threshold_scan(fixed_rates: RateSet, grid: Sequence[float], geometry: Geometry,
                               n: int, eps_hat: float = DEFAULT_EPS_HAT, bisection_tol: float = 0.01,
                               master_seed: int = 0, upper: float = 1.0, scan_parameter: str = "h",
                               opts: Optional[SamplingOptions] = None,
                               decide: Optional[Decider] = None) -> List[ThresholdEntry]:
    """For each grid value of the other rate, bisect the scanned rate ("h" or "lambda")
    on [0, upper] for the first Supercritical decision at scale n.

    `decide` replaces the sampling finite-size check (any monotone decision rule).
    """
    if scan_parameter not in ("h", "lambda"):
        raise ParameterError(f"scan_parameter must be 'h' or 'lambda', got {scan_parameter!r}")
    if len(grid) == 0:
        raise ParameterError("Scan grid is empty")
    if not bisection_tol > 0 or not upper > 0:
        raise ParameterError("Need bisection_tol > 0 and upper > 0")
    if decide is None:
        decide = sampling_decider(geometry, n, eps_hat, opts or SamplingOptions(), master_seed)

    entries = []
    for fixed_value in grid:
        trace: List[Tuple[float, str]] = []

        def decide_at(value: float) -> Decision:
            decision = decide(_rates_at(fixed_rates, scan_parameter, fixed_value, value))
            trace.append((value, decision.value))
            return decision

        if decide_at(0.0) == Decision.SUPERCRITICAL:
            entries.append(ThresholdEntry(fixed_value, 0.0, bisection_tol, True, trace))
            continue
        if decide_at(upper) != Decision.SUPERCRITICAL:
            logger.warning("No Supercritical decision in [0, %g] at %s=%g", upper,
                           "lambda" if scan_parameter == "h" else "h", fixed_value)
            entries.append(ThresholdEntry(fixed_value, upper, float("inf"), False, trace))
            continue
        lo, hi = 0.0, upper
        while hi - lo > bisection_tol:
            mid = 0.5 * (lo + hi)
            if decide_at(mid) == Decision.SUPERCRITICAL:
                hi = mid
            else:
                lo = mid
        logger.debug("Bracket [%g, %g] at %g after %d evaluations", lo, hi, fixed_value, len(trace))
        entries.append(ThresholdEntry(fixed_value, lo, hi, True, trace))
    return entries


def h_perc_scan(fixed_rates: RateSet, lambda_grid: Sequence[float], geometry: Geometry, n: int,
                eps_hat: float = DEFAULT_EPS_HAT, bisection_tol: float = 0.01, master_seed: int = 0,
                h_max: float = 1.0, **options) -> List[ThresholdEntry]:
    """h_perc(lambda) brackets over a lambda grid."""
    return percolation_threshold_scan(fixed_rates, lambda_grid, geometry, n, eps_hat, bisection_tol,
                                      master_seed, h_max, "h", **options)


@dataclass
class EnvelopeViolation:
    index: int
    rule: str
    detail: str


def check_lipschitz_envelope(entries: Sequence[ThresholdEntry]) -> List[EnvelopeViolation]:
    """For adjacent lambda and lambda + alpha, within bracket widths:
    h(lambda) >= h(lambda + alpha) >= h(lambda) - 4 alpha."""
    violations = []
    ordered = sorted((e for e in entries if e.found), key=lambda e: e.fixed_value)
    for i in range(len(ordered) - 1):
        a, b = ordered[i], ordered[i + 1]
        alpha = b.fixed_value - a.fixed_value
        if a.hi < b.lo:
            violations.append(EnvelopeViolation(i, "nonincreasing",
                                                f"h_hi({a.fixed_value})={a.hi} < h_lo({b.fixed_value})={b.lo}"))
        if b.hi < a.lo - 4.0 * alpha:
            violations.append(EnvelopeViolation(i, "lipschitz",
                                                f"h_hi({b.fixed_value})={b.hi} < h_lo({a.fixed_value}) - 4*{alpha:.4g}"))
    return violations


def check_monotone(entries: Sequence[ThresholdEntry]) -> List[EnvelopeViolation]:
    """Thresholds nonincreasing in the fixed rate, up to bracket overlap."""
    return [v for v in check_lipschitz_envelope(entries) if v.rule == "nonincreasing"]
