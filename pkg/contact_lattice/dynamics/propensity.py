# dynamics/propensity.py
"""Transition classes.

A site's enabled transitions depend only on its own state s and on k, the
number of its 4 incoming slots holding a 1. The 15 pairs (s, k) are the
transition classes; class id = (s + 1) * 5 + k.
"""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from contact_lattice.core.lattice import Configuration, ones_neighbor_counts
from contact_lattice.core.rates import Model, RateSet

N_SLOTS = 4
N_CLASSES = 3 * (N_SLOTS + 1)


def class_id(state: int, ones: int) -> int:
    return (state + 1) * (N_SLOTS + 1) + ones


def class_members(class_index: int) -> Tuple[int, int]:
    return class_index // (N_SLOTS + 1) - 1, class_index % (N_SLOTS + 1)


def site_transitions(rates: RateSet, state: int, ones: int) -> List[Tuple[int, float]]:
    """(target state, rate) pairs enabled for a site in `state` with `ones` occupied slots."""
    if rates.model == Model.A:
        if state == 1:
            return [(0, rates.kappa)]
        if state == 0:
            return [(-1, rates.kappa_tilde_or_star), (1, rates.h + rates.lam * ones)]
        return [(0, rates.h_tilde + rates.lam_tilde * ones)]
    if state == 1:
        return [(0, rates.kappa), (-1, rates.kappa_tilde_or_star)]
    if state == 0:
        return [(-1, rates.kappa_tilde_or_star), (1, rates.h + rates.lam * ones)]
    return [(0, rates.h_tilde)]


@dataclass(frozen=True)
class TransitionTable:
    """Per-class transition lists and total outgoing rate."""
    transitions: Tuple[Tuple[Tuple[int, float], ...], ...]
    class_rates: Tuple[float, ...]

    @classmethod
    def from_rates(cls, rates: RateSet) -> "TransitionTable":
        transitions = []
        totals = []
        for c in range(N_CLASSES):
            state, ones = class_members(c)
            enabled = tuple((target, rate) for target, rate in site_transitions(rates, state, ones)
                            if rate > 0)
            transitions.append(enabled)
            totals.append(float(sum(rate for _, rate in enabled)))
        return cls(tuple(transitions), tuple(totals))


def site_classes(config: Configuration) -> np.ndarray:
    """Class id of every site, computed from scratch."""
    ones = ones_neighbor_counts(config)
    return (config.states.astype(np.int64) + 1) * (N_SLOTS + 1) + ones


def propensity_matrix(config: Configuration, rates: RateSet) -> np.ndarray:
    """(n_sites, 3) rates of moving each site to -1, 0, 1 (column = target + 1)."""
    ones = ones_neighbor_counts(config)
    out = np.zeros((config.geometry.n_sites, 3))
    for i, (state, k) in enumerate(zip(config.states.tolist(), ones.tolist())):
        for target, rate in site_transitions(rates, state, k):
            out[i, target + 1] += rate
    return out


def total_propensity(config: Configuration, rates: RateSet) -> float:
    return float(propensity_matrix(config, rates).sum())
