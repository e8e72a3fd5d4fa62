# harness/experiments.py
"""Built-in experiments, one registered runner per spec `experiment` kind.

A runner takes (spec, context), writes its artifacts through the context's
writer and returns an ExperimentOutcome. `passed` is False only when an
acceptance check built into the experiment fails.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from contact_lattice.core.lattice import Configuration, SiteState
from contact_lattice.ddcp.stationary import (
    MonteCarloOptions, StationaryFixedPoint, solve_stationary, solve_stationary_multistart,
)
from contact_lattice.ddcp.trajectory import InitialLaw, solve_trajectory
from contact_lattice.dynamics.engine import run
from contact_lattice.dynamics.stationary import (
    estimate_density, sample_stationary_configs, stationary_density,
)
from contact_lattice.graphical.rate_coupling import build_rate_coupled, couple_rates
from contact_lattice.graphical.replay import couple_monotone
from contact_lattice.graphical.timeline import Region, build_coupled
from contact_lattice.harness.artifacts import ArtifactWriter
from contact_lattice.harness.oracle_check import run_oracle_checks
from contact_lattice.harness.registry import register_experiment
from contact_lattice.harness.replicas import run_indexed, run_replicas
from contact_lattice.harness.sharpness import sharpness_scan
from contact_lattice.harness.spec import CouplingSpec, ExperimentSpec, HarnessDefaults
from contact_lattice.oracle.solvers import per_site_stationary
from contact_lattice.percolation.clusters import label_clusters
from contact_lattice.percolation.crossing import crossing_samples
from contact_lattice.percolation.finite_size import finite_size_check
from contact_lattice.percolation.scan import (
    SamplingOptions, check_lipschitz_envelope, check_monotone, percolation_threshold_scan,
    stationary_crossings,
)
from contact_lattice.percolation.tails import tail_estimate
from contact_lattice.utils.rng import derive_stream

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    writer: ArtifactWriter
    defaults: HarnessDefaults = field(default_factory=HarnessDefaults)

    def workers(self, spec: ExperimentSpec) -> int:
        return spec.workers or self.defaults.workers

    def eps_hat(self, spec: ExperimentSpec) -> float:
        return spec.percolation.eps_hat or self.defaults.eps_hat

    def spacing(self, spec: ExperimentSpec) -> float:
        return spec.sampling.spacing or self.defaults.spacing


@dataclass
class ExperimentOutcome:
    experiment: str
    passed: bool = True
    summary: Dict[str, Any] = field(default_factory=dict)
    table: List[Dict[str, Any]] = field(default_factory=list)


# === Shared helpers ===
def _sampling(spec: ExperimentSpec, ctx: RunContext) -> SamplingOptions:
    chains = min(spec.sampling.chains, spec.sampling.samples)
    return SamplingOptions(chains=chains, per_chain=int(math.ceil(spec.sampling.samples / chains)),
                           burn_in=spec.burn_in, spacing=ctx.spacing(spec), workers=ctx.workers(spec))


def _snapshot_chain(payload, rng: np.random.Generator) -> List[Configuration]:
    rates, geometry, opts = payload
    return sample_stationary_configs(rates, geometry, opts.burn_in, opts.per_chain, opts.spacing, rng)


def _snapshots(rates, spec: ExperimentSpec, ctx: RunContext, label: str) -> List[Configuration]:
    opts = _sampling(spec, ctx)
    chains = run_replicas(_snapshot_chain, (rates, spec.build_geometry(), opts), spec.master_seed,
                          opts.chains, ctx.workers(spec), labels=(label,))
    return [cfg for chain in chains for cfg in chain][:spec.sampling.samples]


def _percolation_summary(configs: List[Configuration], spec: ExperimentSpec, ctx: RunContext):
    perc = spec.percolation
    reports = [label_clusters(cfg) for cfg in configs]
    tail = tail_estimate(reports, perc.n_grid, perc.confidence, perc.min_samples)
    decisions = [finite_size_check(crossing_samples(configs, n), n, ctx.eps_hat(spec), perc.confidence)
                 for n in perc.n_list]
    histogram: Dict[int, int] = {}
    for report in reports:
        for size, count in report.histogram().items():
            histogram[size] = histogram.get(size, 0) + count
    return tail, decisions, histogram


def _mc_options(spec: ExperimentSpec, ctx: RunContext) -> MonteCarloOptions:
    return MonteCarloOptions(burn_in=spec.burn_in, samples=spec.horizon, batches=ctx.defaults.batches)


def _fixed_point(spec: ExperimentSpec, ctx: RunContext) -> List[StationaryFixedPoint]:
    ddcp = spec.ddcp
    options = dict(damping=ddcp.damping, tol=ddcp.stationary_tol, max_iters=ddcp.max_iters,
                   noise_tolerant=ddcp.noise_tolerant,
                   mc=_mc_options(spec, ctx))
    law, rates, geometry = ddcp.law.to_law(), spec.build_rates(), spec.build_geometry()
    if ddcp.starts:
        return solve_stationary_multistart(law, rates, geometry, [tuple(s) for s in ddcp.starts],
                                           spec.master_seed, **options)
    return [solve_stationary(law, rates, geometry, master_seed=spec.master_seed, **options)]


# === Dynamics ===
def _stationary_replica(payload, rng: np.random.Generator):
    rates, geometry, burn_in, horizon, batches, sample_dt = payload
    estimator = stationary_density if rates.all_positive() else estimate_density
    estimate = estimator(rates, geometry, burn_in, horizon, rng, batches=batches)
    trace = None
    if sample_dt is not None:
        result = run(Configuration.full(geometry, SiteState.OCCUPIED), rates, burn_in + horizon, rng,
                     sample_dt=sample_dt)
        trace = (result.sample_times, result.density_trace)
    return estimate, trace


@register_experiment("stationary")
def run_stationary(spec: ExperimentSpec, ctx: RunContext) -> ExperimentOutcome:
    rates = spec.build_rates()
    if not rates.all_positive():
        logger.warning("Rates are not all positive; reporting the time average from all-1")
    payload = (rates, spec.build_geometry(), spec.burn_in, spec.horizon, ctx.defaults.batches,
               spec.sample_dt)
    results = run_replicas(_stationary_replica, payload, spec.master_seed, spec.replicas,
                           ctx.workers(spec), labels=("stationary",))
    rows = [{"replica": i, "rho_bar": est.rho_bar, "ci_lo": est.ci[0], "ci_hi": est.ci[1],
             "stderr": est.stderr, "events": est.event_count}
            for i, (est, _) in enumerate(results)]
    ctx.writer.write_csv("density", rows)

    rhos = np.array([est.rho_bar for est, _ in results])
    if rhos.size >= 2:
        sigma = float(rhos.std(ddof=1) / math.sqrt(rhos.size))
    else:
        sigma = results[0][0].stderr
    mean = float(rhos.mean())
    summary: Dict[str, Any] = {"rho_mean": float(mean), "sigma": sigma, "replicas": int(rhos.size),
                               "rates": rates.to_dict()}
    passed = True
    if rates.lam == 0 and rates.lam_tilde == 0:
        # sites are independent: compare with the per-site chain
        reference = float(per_site_stationary(rates)[2])
        passed = abs(summary["rho_mean"] - reference) <= 3.0 * sigma
        summary.update(reference=reference, within_3sigma=passed)
    ctx.writer.write_json("summary", summary)

    if spec.sample_dt is not None:
        trace_rows = [{"replica": i, "t": float(t), "rho": float(r)}
                      for i, (_, (times, trace)) in enumerate(results) for t, r in zip(times, trace)]
        ctx.writer.write_csv("density_trace", trace_rows, ["replica", "t", "rho"])
    return ExperimentOutcome("stationary", passed, summary, rows)


# === Percolation ===
@register_experiment("tails")
def run_tails(spec: ExperimentSpec, ctx: RunContext) -> ExperimentOutcome:
    configs = _snapshots(spec.build_rates(), spec, ctx, "tails")
    tail, decisions, histogram = _percolation_summary(configs, spec, ctx)
    ctx.writer.write_csv("tail", tail.csv_rows(), ["n", "p_hat", "ci_lo", "ci_hi"])
    ctx.writer.write_csv("cluster_histogram", [{"size": s, "count": c} for s, c in sorted(histogram.items())],
                         ["size", "count"])
    summary = {"tail": tail.to_dict(), "decisions": [d.to_dict() for d in decisions],
               "histogram": {str(s): c for s, c in sorted(histogram.items())}}
    ctx.writer.write_json("tail", summary)
    table = [{"classification": tail.classification.value, "samples": tail.samples,
              "censored": tail.censored,
              "exponential_rate": None if tail.fit is None else tail.fit.rate,
              "r_squared": None if tail.fit is None else tail.fit.r_squared}]
    return ExperimentOutcome("tails", True, summary, table)


@register_experiment("crossings")
def run_crossings(spec: ExperimentSpec, ctx: RunContext) -> ExperimentOutcome:
    rates, geometry, opts = spec.build_rates(), spec.build_geometry(), _sampling(spec, ctx)
    rows = []
    for n in spec.percolation.n_list:
        samples = stationary_crossings(rates, geometry, n, opts, spec.master_seed, label=f"n={n}")
        rows.append(finite_size_check(samples, n, ctx.eps_hat(spec), spec.percolation.confidence).to_dict())
    ctx.writer.write_csv("crossings", rows)
    return ExperimentOutcome("crossings", True, {"decisions": rows}, rows)


@register_experiment("scan")
def run_scan(spec: ExperimentSpec, ctx: RunContext) -> ExperimentOutcome:
    scan = spec.scan
    entries = percolation_threshold_scan(
        spec.build_rates(), scan.grid, spec.build_geometry(), scan.n, ctx.eps_hat(spec),
        scan.bisection_tol, spec.master_seed, scan.upper, scan.parameter, opts=_sampling(spec, ctx),
    )
    rows = [e.to_row(scan.parameter, scan.n, ctx.eps_hat(spec)) for e in entries]
    ctx.writer.write_csv("thresholds", rows)
    check = check_lipschitz_envelope if scan.parameter == "h" else check_monotone
    violations = [vars(v) for v in check(entries)]
    summary = {"violations": violations, "found": sum(e.found for e in entries), "entries": len(entries)}
    ctx.writer.write_json("scan", summary)
    return ExperimentOutcome("scan", not violations, summary, rows)


@register_experiment("sharpness")
def run_sharpness(spec: ExperimentSpec, ctx: RunContext) -> ExperimentOutcome:
    perc = spec.percolation
    report = sharpness_scan(
        spec.build_qparam(), spec.q_grid, spec.build_geometry(), perc.n_list, spec.sampling.samples,
        derive_stream(spec.master_seed, 0, "sharpness"), n_grid=perc.n_grid, eps_hat=ctx.eps_hat(spec),
        confidence=perc.confidence, burn_in=spec.burn_in, spacing=ctx.spacing(spec),
        chains=spec.sampling.chains, coupled=spec.sampling.coupled, workers=ctx.workers(spec),
        min_samples=perc.min_samples,
    )
    rows = report.rows()
    ctx.writer.write_csv("profile", rows)
    ctx.writer.write_json("report", report.to_dict())
    summary = report.acceptance()
    return ExperimentOutcome("sharpness", summary.pop("passed"), summary, rows)


# === DDCP ===
@register_experiment("ddcp_trajectory")
def run_ddcp_trajectory(spec: ExperimentSpec, ctx: RunContext) -> ExperimentOutcome:
    ddcp = spec.ddcp
    solution = solve_trajectory(
        ddcp.law.to_law(), spec.build_rates(), InitialLaw(tuple(ddcp.initial)), spec.build_geometry(),
        spec.horizon, spec.replicas, ddcp.tol, ddcp.max_sweeps, derive_stream(spec.master_seed, 0, "ddcp"),
        dt_grid=ddcp.dt_grid, window=ddcp.window, workers=ctx.workers(spec), master_seed=spec.master_seed,
    )
    rows = [{"t": float(t), "rho": float(r), "rho_half_width": float(w), "lambda": float(lam), "h": float(h)}
            for t, r, w, lam, h in zip(solution.grid, solution.rho, solution.rho_half_width,
                                       solution.lam, solution.h)]
    ctx.writer.write_csv("trajectory", rows, ["t", "rho", "rho_half_width", "lambda", "h"])
    ctx.writer.write_json("trajectory", solution.to_dict())
    summary = {"converged": solution.converged, "residual": solution.residual, "sweeps": solution.sweeps,
               "clamped": solution.clamped}
    return ExperimentOutcome("ddcp_trajectory", solution.converged, summary, [summary])


@register_experiment("ddcp_stationary")
def run_ddcp_stationary(spec: ExperimentSpec, ctx: RunContext) -> ExperimentOutcome:
    points = _fixed_point(spec, ctx)
    rows = [p.csv_row() for p in points]
    ctx.writer.write_csv("fixed_points", rows)
    ctx.writer.write_json("fixed_points", {"points": [dict(p.csv_row(), trace=p.trace) for p in points]})
    passed = all(p.converged for p in points)
    return ExperimentOutcome("ddcp_stationary", passed, {"fixed_points": len(points)}, rows)


@register_experiment("ddcp_percolation")
def run_ddcp_percolation(spec: ExperimentSpec, ctx: RunContext) -> ExperimentOutcome:
    rates = spec.build_rates()
    rows, details = [], []
    for k, point in enumerate(_fixed_point(spec, ctx)):
        at_star = rates.with_rates(lam=point.lambda_star, h=point.h_star)
        configs = _snapshots(at_star, spec, ctx, f"fixed-point-{k}")
        tail, decisions, _ = _percolation_summary(configs, spec, ctx)
        for decision in decisions:
            rows.append(dict(point.csv_row(), tail_class=tail.classification.value, n=decision.n,
                             decision=decision.decision.value))
        details.append({"fixed_point": point.csv_row(), "tail": tail.to_dict(),
                        "decisions": [d.to_dict() for d in decisions]})
    ctx.writer.write_csv("percolation", rows)
    ctx.writer.write_json("percolation", {"fixed_points": details})
    passed = all(d["fixed_point"]["converged"] for d in details)
    return ExperimentOutcome("ddcp_percolation", passed, {"fixed_points": len(details)}, rows)


# === Coupling ===
def _coupled_pair(geometry, low_state: int, high_state: int, random_initial: bool,
                  rng: np.random.Generator):
    if not random_initial:
        return Configuration.full(geometry, low_state), Configuration.full(geometry, high_state)
    uniform = (1 / 3, 1 / 3, 1 / 3)
    high = Configuration.random(geometry, uniform, rng)
    low = Configuration(geometry, np.minimum(high.states, Configuration.random(geometry, uniform, rng).states))
    return low, high


def _couple_replica(payload, rng: np.random.Generator):
    kind, geometry, horizon, coupling, rates_low, rates_high, qparam, q_pair = payload
    region = Region(geometry, 0.0, horizon)
    xi_low, xi_high = _coupled_pair(geometry, coupling.low_state, coupling.high_state,
                                    coupling.random_initial, rng)
    if kind == "rates":
        return couple_rates(build_rate_coupled(region, rates_low, rates_high, rng), xi_low, xi_high)
    return couple_monotone(build_coupled(region, qparam, rng), q_pair[0], q_pair[1], xi_low, xi_high)


@register_experiment("couple_check")
def run_couple_check(spec: ExperimentSpec, ctx: RunContext) -> ExperimentOutcome:
    coupling = spec.coupling or CouplingSpec()
    geometry = spec.build_geometry()
    rate_coupled = coupling.rates_high is not None
    rates_high = coupling.rates_high.to_rates(spec.model) if rate_coupled else None
    pairs = [coupling.q_pairs[i % len(coupling.q_pairs)] for i in range(spec.replicas)]
    payloads = [("rates" if rate_coupled else "q", geometry, spec.horizon, coupling, spec.build_rates(),
                 rates_high, spec.build_qparam(), pair) for pair in pairs]
    reports = run_indexed(_couple_replica, payloads, spec.master_seed, ctx.workers(spec), labels=("couple",))
    rows = []
    for i, (pair, report) in enumerate(zip(pairs, reports)):
        row: Dict[str, Any] = {"replica": i}
        if not rate_coupled:
            row.update(q_low=pair[0], q_high=pair[1])
        row.update(report.to_dict())
        rows.append(row)
    violations = [r for r in rows if not r["ordered"]]
    ctx.writer.write_csv("coupling", rows)
    summary = {"runs": len(rows), "violations": len(violations), "rate_coupled": rate_coupled}
    ctx.writer.write_json("coupling", summary)
    return ExperimentOutcome("couple_check", not violations, summary, rows)


# === Exact oracle ===
@register_experiment("oracle_check")
def run_oracle_check(spec: ExperimentSpec, ctx: RunContext) -> ExperimentOutcome:
    checks = run_oracle_checks(spec.master_seed)
    rows = [c.to_row() for c in checks]
    ctx.writer.write_csv("checks", rows, ["name", "value", "threshold", "status", "detail"])
    passed = all(c.passed for c in checks)
    return ExperimentOutcome("oracle_check", passed,
                             {"checks": len(checks), "failed": sum(not c.passed for c in checks)}, rows)
