# harness/oracle_check.py
"""Exact-oracle invariants as a pass/fail table."""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, List, Sequence

import numpy as np

from contact_lattice.core.exceptions import ReducibleChainError
from contact_lattice.core.lattice import Configuration, Geometry, SiteState
from contact_lattice.core.rates import RateSet
from contact_lattice.oracle.generator import build_generator
from contact_lattice.oracle.solvers import (
    marginal, per_site_stationary, site_density, stationary, transient, tv_restricted,
)
from contact_lattice.utils.rng import derive_stream

logger = logging.getLogger(__name__)

BOUND_TIMES = (0.5, 1.0, 2.0, 4.0, 8.0)
NUMERIC_TOL = 1e-10


@dataclass
class OracleCheck:
    name: str
    value: float
    threshold: float
    passed: bool
    detail: str = ""

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_row(self) -> dict:
        row = asdict(self)
        row["status"] = self.status
        return row


def _at_most(name: str, value: float, threshold: float, detail: str = "") -> OracleCheck:
    return OracleCheck(name, float(value), float(threshold), bool(value <= threshold), detail)


def random_positive_rates(model: str, rng: np.random.Generator) -> RateSet:
    v = rng.uniform(0.1, 1.0, size=6)
    if model == "A":
        return RateSet.model_a(v[0], v[1], v[2], v[3], v[4], v[5])
    return RateSet.model_b(v[0], v[1], v[2], v[4], v[5])


def check_row_sums(rng: np.random.Generator) -> List[OracleCheck]:
    out = []
    for model in ("A", "B"):
        for geometry in (Geometry.torus(2, 2), Geometry.rectangle(2, 2, SiteState.OCCUPIED)):
            gen = build_generator(random_positive_rates(model, rng), geometry)
            out.append(_at_most(f"row_sums[{model},{geometry.kind.value}]",
                                np.abs(gen.row_sums()).max(), 1e-12))
    return out


def check_degradation_bound(times: Sequence[float] = BOUND_TIMES) -> List[OracleCheck]:
    """Model B from all -1: one-site distance to pi stays below exp(-h t)."""
    rates = RateSet.model_b(kappa=1.0, kappa_star=0.5, lam=0.3, h=0.2, h_tilde=0.4)
    geometry = Geometry.torus(2, 2)
    gen = build_generator(rates, geometry)
    pi = stationary(gen)
    start = Configuration.full(geometry, SiteState.DEGRADED)
    out = []
    for t in times:
        tv = tv_restricted(transient(gen, start, t), pi, [0])
        bound = math.exp(-rates.h * t)
        out.append(_at_most(f"degradation_bound[t={t:g}]", tv, bound + NUMERIC_TOL))
    return out


def check_stationary_fixed_point(rng: np.random.Generator) -> List[OracleCheck]:
    gen = build_generator(random_positive_rates("A", rng), Geometry.torus(2, 2))
    pi = stationary(gen)
    balance = float(np.abs(gen.matrix.T @ pi).max())
    drift = float(np.abs(transient(gen, pi, 1.0) - pi).sum())
    return [_at_most("stationary_balance", balance, NUMERIC_TOL),
            _at_most("stationary_is_transient_fixed_point", drift, 1e-8)]


def check_semigroup(rng: np.random.Generator, s: float = 0.7, t: float = 1.3) -> List[OracleCheck]:
    gen = build_generator(random_positive_rates("B", rng), Geometry.torus(2, 2))
    start = Configuration.full(gen.geometry, SiteState.OCCUPIED)
    split = transient(gen, transient(gen, start, s), t)
    whole = transient(gen, start, s + t)
    return [_at_most("semigroup", np.abs(split - whole).sum(), 1e-8),
            _at_most("mass_conservation", abs(whole.sum() - 1.0), NUMERIC_TOL)]


def check_per_site_product() -> List[OracleCheck]:
    """Without neighbour transitions sites are independent."""
    rates = RateSet.model_a(kappa=1.0, kappa_tilde=1.0, lam=0.0, lam_tilde=0.0, h=1.0, h_tilde=1.0)
    geometry = Geometry.torus(2, 2)
    gen = build_generator(rates, geometry)
    pi = stationary(gen)
    single = per_site_stationary(rates)
    product = single
    for _ in range(geometry.n_sites - 1):
        product = np.kron(product, single)
    site_err = max(np.abs(marginal(pi, [i]) - single).max() for i in range(geometry.n_sites))
    return [_at_most("per_site_marginal", site_err, 1e-9),
            _at_most("product_form", np.abs(pi - product).max(), 1e-9),
            _at_most("one_third_density", abs(site_density(pi, 0) - 1.0 / 3.0), 1e-9)]


def check_translation_invariance(rng: np.random.Generator) -> List[OracleCheck]:
    gen = build_generator(random_positive_rates("A", rng), Geometry.torus(3, 2))
    pi = stationary(gen)
    densities = [site_density(pi, i) for i in range(gen.n_sites)]
    return [_at_most("translation_invariance", max(densities) - min(densities), 1e-9)]


def check_reducible_rejected() -> List[OracleCheck]:
    """Two-state preset: -1 sites never change, so pi is not unique."""
    gen = build_generator(RateSet.two_state(kappa=1.0, lam=0.5, h=0.2), Geometry.torus(2, 2))
    try:
        stationary(gen)
    except ReducibleChainError as exc:
        return [OracleCheck("reducible_rejected", float(len(exc.closed_classes)), 2.0,
                            len(exc.closed_classes) >= 2, "closed classes")]
    return [OracleCheck("reducible_rejected", 1.0, 2.0, False, "stationary() accepted a reducible chain")]


CHECKS: List[Callable[[np.random.Generator], List[OracleCheck]]] = [
    check_row_sums,
    lambda rng: check_degradation_bound(),
    check_stationary_fixed_point,
    check_semigroup,
    lambda rng: check_per_site_product(),
    check_translation_invariance,
    lambda rng: check_reducible_rejected(),
]


def run_oracle_checks(master_seed: int = 0) -> List[OracleCheck]:
    rng = derive_stream(master_seed, 0, "oracle-check")
    results = [check for fn in CHECKS for check in fn(rng)]
    failed = [c.name for c in results if not c.passed]
    if failed:
        logger.warning("Oracle checks failed: %s", ", ".join(failed))
    else:
        logger.info("All %d oracle checks passed", len(results))
    return results
