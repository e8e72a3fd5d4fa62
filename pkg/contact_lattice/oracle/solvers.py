# oracle/solvers.py

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
from scipy import sparse, stats
from scipy.sparse import csgraph
from scipy.sparse.linalg import spsolve

from contact_lattice.core.exceptions import OracleError, ParameterError, ReducibleChainError
from contact_lattice.core.lattice import Configuration
from contact_lattice.core.rates import RateSet
from contact_lattice.dynamics.propensity import site_transitions
from contact_lattice.oracle.generator import GeneratorMatrix

logger = logging.getLogger(__name__)

STATIONARY_RESIDUAL = 1e-10
UNIFORMIZATION_TOL = 1e-10


def closed_classes(gen: GeneratorMatrix) -> List[List[int]]:
    """Strongly connected classes with no transition leaving them."""
    off = gen.off_diagonal()
    count, labels = csgraph.connected_components(off, directed=True, connection="strong")
    if count == 1:
        return [list(range(gen.dimension))]
    coo = off.tocoo()
    leaving = np.zeros(count, dtype=bool)
    crossing = labels[coo.row] != labels[coo.col]
    leaving[labels[coo.row[crossing]]] = True
    return [np.flatnonzero(labels == c).tolist() for c in range(count) if not leaving[c]]


def stationary(gen: GeneratorMatrix) -> np.ndarray:
    """Unique pi with pi Q = 0, sum(pi) = 1."""
    count, _ = csgraph.connected_components(gen.off_diagonal(), directed=True, connection="strong")
    if count > 1:
        classes = closed_classes(gen)
        raise ReducibleChainError(
            f"Generator is reducible: {count} communicating classes, {len(classes)} closed",
            closed_classes=classes,
        )
    q = gen.matrix
    system = q.T.tolil()
    system[-1, :] = np.ones(gen.dimension)
    rhs = np.zeros(gen.dimension)
    rhs[-1] = 1.0
    pi = spsolve(system.tocsc(), rhs)
    residual = float(np.abs(q.T @ pi).max())
    if residual > STATIONARY_RESIDUAL or not np.isfinite(pi).all():
        raise OracleError(f"Stationary solve residual {residual:.3e} exceeds {STATIONARY_RESIDUAL:g}")
    return pi


def _as_distribution(gen: GeneratorMatrix, initial: Union[np.ndarray, Configuration, int]) -> np.ndarray:
    if isinstance(initial, Configuration):
        return gen.point_mass(initial)
    if isinstance(initial, (int, np.integer)):
        dist = np.zeros(gen.dimension)
        dist[int(initial)] = 1.0
        return dist
    dist = np.asarray(initial, dtype=float)
    if dist.shape != (gen.dimension,):
        raise ParameterError(f"Distribution has shape {dist.shape}, generator needs ({gen.dimension},)")
    return dist


def transient(gen: GeneratorMatrix, initial: Union[np.ndarray, Configuration, int], t: float,
              tol: float = UNIFORMIZATION_TOL) -> np.ndarray:
    """initial @ exp(t Q) by uniformization, truncated where the Poisson tail is below tol."""
    if t < 0:
        raise ParameterError(f"t must be >= 0, got {t}")
    dist = _as_distribution(gen, initial)
    if t == 0:
        return dist.copy()
    q = gen.matrix
    rate = float(np.max(-q.diagonal()))
    if rate <= 0:
        return dist.copy()
    step = (sparse.identity(gen.dimension, format="csr") + q / rate).T.tocsr()
    mu = rate * t
    k_max = int(stats.poisson.isf(tol, mu)) + 1
    weights = stats.poisson.pmf(np.arange(k_max + 1), mu)
    out = np.zeros_like(dist)
    v = dist
    for k in range(k_max + 1):
        out += weights[k] * v
        v = step @ v
    return out


def marginal(dist: np.ndarray, sites: Sequence[int], n_sites: Optional[int] = None) -> np.ndarray:
    """Law of the sub-configuration on `sites`, encoded in the given site order."""
    dist = np.asarray(dist, dtype=float)
    if n_sites is None:
        n_sites = int(round(math.log(dist.size, 3)))
    sites = list(sites)
    cube = dist.reshape((3,) * n_sites)
    drop = tuple(i for i in range(n_sites) if i not in sites)
    reduced = cube.sum(axis=drop) if drop else cube
    kept = sorted(sites)
    return np.transpose(reduced, [kept.index(s) for s in sites]).reshape(-1)


def tv_restricted(dist1: np.ndarray, dist2: np.ndarray, site_subset: Iterable[int]) -> float:
    """Total-variation distance between the marginals on `site_subset` (0 for an empty subset)."""
    subset = sorted(set(int(s) for s in site_subset))
    if not subset:
        return 0.0
    n_sites = int(round(math.log(np.asarray(dist1).size, 3)))
    if subset[0] < 0 or subset[-1] >= n_sites:
        raise ParameterError(f"Site subset {subset} outside the oracle lattice of {n_sites} sites")
    m1 = marginal(dist1, subset, n_sites)
    m2 = marginal(dist2, subset, n_sites)
    return float(min(1.0, 0.5 * np.abs(m1 - m2).sum()))


def site_density(dist: np.ndarray, site: int = 0) -> float:
    """P(site is 1)."""
    return float(marginal(dist, [site])[2])


def single_site_generator(rates: RateSet) -> np.ndarray:
    """3x3 generator of one site with no occupied neighbours, states ordered -1, 0, 1."""
    q = np.zeros((3, 3))
    for s in (-1, 0, 1):
        for target, rate in site_transitions(rates, s, 0):
            q[s + 1, target + 1] += rate
    np.fill_diagonal(q, -q.sum(axis=1))
    return q


def per_site_stationary(rates: RateSet) -> np.ndarray:
    q = single_site_generator(rates)
    system = q.T.copy()
    system[-1, :] = 1.0
    rhs = np.array([0.0, 0.0, 1.0])
    try:
        return np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise ReducibleChainError("Per-site chain has no unique stationary law") from exc


@dataclass
class ConvergenceProfile:
    """max over initial states of the restricted distance to pi, with a fitted
    bound C1 |subset| exp(-C2 t)."""
    t_grid: np.ndarray
    distance: np.ndarray
    c1: float
    c2: float
    subset_size: int
    points_used: int = 0

    def bound(self, t) -> np.ndarray:
        return self.c1 * self.subset_size * np.exp(-self.c2 * np.asarray(t, dtype=float))


def convergence_profile(gen: GeneratorMatrix, initials: Sequence[Union[Configuration, int, np.ndarray]],
                        site_subset: Sequence[int], t_grid: Sequence[float],
                        pi: Optional[np.ndarray] = None, floor: float = 1e-12) -> ConvergenceProfile:
    if len(initials) == 0:
        raise ParameterError("Need at least one initial state")
    times = np.asarray(t_grid, dtype=float)
    pi = stationary(gen) if pi is None else pi
    distance = np.zeros(times.size)
    for initial in initials:
        for k, t in enumerate(times):
            distance[k] = max(distance[k], tv_restricted(transient(gen, initial, t), pi, site_subset))
    size = max(len(set(site_subset)), 1)
    usable = distance > floor
    c1, c2 = math.nan, math.nan
    if usable.sum() >= 2:
        res = stats.linregress(times[usable], np.log(distance[usable] / size))
        c1, c2 = float(math.exp(res.intercept)), float(-res.slope)
    logger.debug("Convergence profile over %d points: C1=%.4g C2=%.4g", int(usable.sum()), c1, c2)
    return ConvergenceProfile(times, distance, c1, c2, size, int(usable.sum()))
