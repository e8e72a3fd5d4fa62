# ddcp/stationary.py

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.core.lattice import Geometry
from contact_lattice.core.rates import Model, RateSet
from contact_lattice.ddcp.laws import DensityLaw
from contact_lattice.dynamics.stationary import DensityEstimate, estimate_density
from contact_lattice.utils.rng import derive_stream, spawn_seed

logger = logging.getLogger(__name__)

CSV_FIELDS = ["model", "law", "lambda_star", "h_star", "rho_star", "residual", "ci_lo", "ci_hi",
              "converged", "iterations", "effective_tol", "seed"]


@dataclass(frozen=True)
class MonteCarloOptions:
    burn_in: float = 50.0
    samples: float = 200.0
    batches: int = 20
    confidence: float = 0.95


@dataclass
class StationaryFixedPoint:
    lambda_star: float
    h_star: float
    rho_star: float
    residual: float
    ci: Tuple[float, float]
    converged: bool
    iterations: int
    effective_tol: Optional[float] = None
    trace: List[Dict[str, float]] = field(default_factory=list, repr=False)
    seed: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict, repr=False)

    @property
    def ci_half_width(self) -> float:
        return 0.5 * (self.ci[1] - self.ci[0])

    def csv_row(self) -> Dict[str, Any]:
        return {
            "model": self.params.get("model", ""),
            "law": self.params.get("law_label", ""),
            "lambda_star": self.lambda_star,
            "h_star": self.h_star,
            "rho_star": self.rho_star,
            "residual": self.residual,
            "ci_lo": self.ci[0],
            "ci_hi": self.ci[1],
            "converged": self.converged,
            "iterations": self.iterations,
            "effective_tol": self.effective_tol,
            "seed": self.seed,
        }


def _fixed_rates_positive(rates: RateSet) -> bool:
    values = [rates.kappa, rates.kappa_tilde_or_star, rates.h_tilde]
    if rates.model == Model.A:
        values.append(rates.lam_tilde)
    return all(v > 0 for v in values)


def _check_law(law: DensityLaw):
    lam_min, h_min = law.min_on_unit_interval()
    if lam_min < 0 or h_min < 0:
        raise ParameterError(
            f"Density law takes negative values on [0, 1] (min Lambda {lam_min:.4g}, min H {h_min:.4g})"
        )
    if lam_min == 0 or h_min == 0:
        logger.warning("Density law vanishes somewhere on [0, 1]; the all-empty state may attract the iteration")


def solve_stationary(law: DensityLaw, fixed_rates: RateSet, geometry: Geometry,
                     damping: float = 0.5, tol: float = 1e-3, max_iters: int = 50,
                     mc: Optional[MonteCarloOptions] = None,
                     rng: Optional[np.random.Generator] = None,
                     start: Optional[Tuple[float, float]] = None,
                     master_seed: Optional[int] = None,
                     noise_tolerant: bool = False) -> StationaryFixedPoint:
    """Damped iteration lam <- (1 - a) lam + a Lambda(rho), h <- (1 - a) h + a H(rho)
    with rho the stationary density at the current rates.

    Stops once both the damped step and the residual are below `tol`. With
    `noise_tolerant` the residual bound widens to Lipschitz(law) x (CI half-width
    of rho) whenever that exceeds `tol`; the bound in force at the last iteration
    is reported as `effective_tol`. The returned residual comes from a fresh
    estimate under an independent stream.
    """
    if not 0 < damping <= 1:
        raise ParameterError(f"damping must lie in (0, 1], got {damping}")
    if not _fixed_rates_positive(fixed_rates):
        raise ParameterError("solve_stationary needs every fixed rate strictly positive")
    _check_law(law)
    mc = mc or MonteCarloOptions()
    seed = int(master_seed) if master_seed is not None else spawn_seed(rng or np.random.default_rng())
    lipschitz = law.lipschitz()

    if start is None:
        lam, h = law.evaluate(1.0).lam, law.evaluate(1.0).h
    else:
        lam, h = float(start[0]), float(start[1])

    def estimate(lam_: float, h_: float, stream: np.random.Generator) -> DensityEstimate:
        rates = fixed_rates.with_rates(lam=lam_, h=h_)
        return estimate_density(rates, geometry, mc.burn_in, mc.samples, stream,
                                batches=mc.batches, confidence=mc.confidence)

    trace: List[Dict[str, float]] = []
    converged = False
    iterations = 0
    est = None
    effective_tol = tol
    for it in range(max_iters):
        iterations = it + 1
        est = estimate(lam, h, derive_stream(seed, it, "stationary"))
        target = law.evaluate(min(max(est.rho_bar, 0.0), 1.0))
        residual = max(abs(target.lam - lam), abs(target.h - h))
        step_lam = damping * (target.lam - lam)
        step_h = damping * (target.h - h)
        step = max(abs(step_lam), abs(step_h))
        trace.append({"iteration": iterations, "lambda": lam, "h": h, "rho": est.rho_bar,
                      "residual": residual, "step": step})
        logger.debug("Iteration %d: lambda=%.5f h=%.5f rho=%.5f residual=%.3e", iterations, lam, h,
                     est.rho_bar, residual)
        effective_tol = max(tol, lipschitz * est.half_width) if noise_tolerant else tol
        if step < tol and residual < effective_tol:
            converged = True
            break
        lam += step_lam
        h += step_h

    if not converged:
        logger.warning("Stationary iteration did not converge in %d iterations (last residual %.3e)",
                       max_iters, trace[-1]["residual"])

    fresh = estimate(lam, h, derive_stream(seed, 0, "verify"))
    check = law.evaluate(min(max(fresh.rho_bar, 0.0), 1.0))
    residual = max(abs(lam - check.lam), abs(h - check.h))
    logger.info("Fixed point lambda*=%.5f h*=%.5f rho*=%.5f (fresh residual %.3e, CI +-%.3e)",
                lam, h, fresh.rho_bar, residual, fresh.half_width)
    return StationaryFixedPoint(
        lambda_star=lam,
        h_star=h,
        rho_star=fresh.rho_bar,
        residual=residual,
        ci=fresh.ci,
        converged=converged,
        iterations=iterations,
        effective_tol=effective_tol,
        trace=trace,
        seed=seed,
        params={"model": fixed_rates.model.value, "law_label": law.kind.value,
                "law": law.to_dict(), "fixed_rates": fixed_rates.to_dict(),
                "damping": damping, "tol": tol, "noise_tolerant": noise_tolerant},
    )


def solve_stationary_multistart(law: DensityLaw, fixed_rates: RateSet, geometry: Geometry,
                                starts: Sequence[Tuple[float, float]], master_seed: int,
                                merge_tol: float = 0.02, **options) -> List[StationaryFixedPoint]:
    """Run the damped solver from several (lam, h) starts and keep distinct fixed points,
    ordered by rho_star. Points whose densities agree within merge_tol are merged."""
    if not starts:
        raise ParameterError("Need at least one start point")
    found: List[StationaryFixedPoint] = []
    for k, start in enumerate(starts):
        point = solve_stationary(law, fixed_rates, geometry, start=start,
                                 master_seed=int(derive_stream(master_seed, k, "multistart").integers(2**62)),
                                 **options)
        if all(abs(point.rho_star - other.rho_star) > merge_tol for other in found):
            found.append(point)
    found.sort(key=lambda p: p.rho_star)
    logger.info("%d distinct fixed point(s) from %d starts", len(found), len(starts))
    return found
