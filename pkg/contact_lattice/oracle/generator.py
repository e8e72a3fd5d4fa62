# oracle/generator.py
"""Exact generator of the finite chain.

State encoding: a configuration maps to sum_i (state_i + 1) * 3 ** (N - 1 - i),
site index i in row-major order, site 0 the most significant base-3 digit.
Reshaping a distribution to (3,) * N therefore puts site i on axis i with
axis positions -1, 0, 1.
"""
import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from contact_lattice.core.exceptions import OracleError
from contact_lattice.core.lattice import Configuration, Geometry
from contact_lattice.core.rates import RateSet
from contact_lattice.dynamics.propensity import N_SLOTS, TransitionTable

logger = logging.getLogger(__name__)

MAX_SITES = 9


@dataclass(eq=False)
class GeneratorMatrix:
    geometry: Geometry
    rates: RateSet
    matrix: sparse.csr_matrix = field(repr=False)

    @property
    def n_sites(self) -> int:
        return self.geometry.n_sites

    @property
    def dimension(self) -> int:
        return 3 ** self.n_sites

    def encode(self, config: Configuration) -> int:
        return encode(config.states)

    def decode(self, index: int) -> Configuration:
        return Configuration(self.geometry, decode(index, self.n_sites))

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def off_diagonal(self) -> sparse.csr_matrix:
        off = self.matrix.copy().tolil()
        off.setdiag(0)
        return off.tocsr()

    def point_mass(self, config: Configuration) -> np.ndarray:
        dist = np.zeros(self.dimension)
        dist[self.encode(config)] = 1.0
        return dist


def encode(states: np.ndarray) -> int:
    code = 0
    for s in np.asarray(states, dtype=int).tolist():
        code = code * 3 + (s + 1)
    return code


def decode(index: int, n_sites: int) -> np.ndarray:
    digits = np.empty(n_sites, dtype=np.int8)
    for i in range(n_sites - 1, -1, -1):
        index, digits[i] = divmod(index, 3)
    return digits - 1


def all_states(n_sites: int) -> np.ndarray:
    """(3**N, N) array of states in encoding order."""
    return np.array(list(itertools.product((-1, 0, 1), repeat=n_sites)), dtype=np.int8).reshape(-1, n_sites)


def build_generator(rates: RateSet, geometry: Geometry) -> GeneratorMatrix:
    if geometry.width < 2 or geometry.height < 2:
        raise OracleError(f"Oracle lattices need width and height >= 2, got {geometry.width}x{geometry.height}")
    n = geometry.n_sites
    if n > MAX_SITES:
        raise OracleError(f"{n} sites exceeds the oracle cap of {MAX_SITES} (3^{n} states)")

    states = all_states(n)
    dim = states.shape[0]
    padded = np.concatenate([states, np.full((dim, 1), int(geometry.boundary_state), np.int8)], axis=1)
    # EXTERIOR (-1) selects the appended boundary column
    ones = np.count_nonzero(padded[:, geometry.neighbor_table] == 1, axis=2)
    classes = (states.astype(np.int64) + 1) * (N_SLOTS + 1) + ones
    weights = 3 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    index = np.arange(dim, dtype=np.int64)

    table = TransitionTable.from_rates(rates)
    rows, cols, data = [], [], []
    for c, transitions in enumerate(table.transitions):
        where_state, where_site = np.nonzero(classes == c)
        if where_state.size == 0:
            continue
        current = states[where_state, where_site].astype(np.int64)
        for target, rate in transitions:
            rows.append(index[where_state])
            cols.append(index[where_state] + (target - current) * weights[where_site])
            data.append(np.full(where_state.size, rate))
    if rows:
        off = sparse.coo_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
                                shape=(dim, dim)).tocsr()
    else:
        off = sparse.csr_matrix((dim, dim))
    diagonal = -np.asarray(off.sum(axis=1)).ravel()
    matrix = (off + sparse.diags(diagonal)).tocsr()
    logger.debug("Generator on %d sites: %d states, %d transitions", n, dim, off.nnz)
    return GeneratorMatrix(geometry, rates, matrix)
