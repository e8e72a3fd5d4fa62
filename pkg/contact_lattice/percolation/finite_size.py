# percolation/finite_size.py

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

from contact_lattice.core.exceptions import InsufficientSamplesError, ParameterError
from contact_lattice.percolation.crossing import CrossingSamples
from contact_lattice.utils.stats import clopper_pearson

logger = logging.getLogger(__name__)

DEFAULT_EPS_HAT = 0.05


class Decision(Enum):
    SUBCRITICAL = "Subcritical"
    NEITHER = "Neither"
    SUPERCRITICAL = "Supercritical"

    @property
    def rank(self) -> int:
        return _RANK[self]


_RANK = {Decision.SUBCRITICAL: 0, Decision.NEITHER: 1, Decision.SUPERCRITICAL: 2}


@dataclass
class FiniteSizeDecision:
    decision: Decision
    n: int
    eps_hat: float
    trials: int
    p_vertical: float
    vertical_upper: float
    p_horizontal: float
    horizontal_lower: float

    def to_dict(self) -> dict:
        return {
            "decision": self.decision.value,
            "n": self.n,
            "eps_hat": self.eps_hat,
            "trials": self.trials,
            "p_vertical": self.p_vertical,
            "vertical_upper": self.vertical_upper,
            "p_horizontal": self.p_horizontal,
            "horizontal_lower": self.horizontal_lower,
        }


def min_trials(eps_hat: float, confidence: float = 0.95) -> int:
    """Fewest trials for which zero crossings give an upper bound below eps_hat."""
    alpha = 1.0 - confidence
    return int(math.floor(math.log(alpha / 2.0) / math.log(1.0 - eps_hat))) + 1


def finite_size_check(samples: CrossingSamples, n: int, eps_hat: float = DEFAULT_EPS_HAT,
                      confidence: float = 0.95, n_hat: int = 1) -> FiniteSizeDecision:
    """Subcritical if the upper bound on P(V(3n, n)) is below eps_hat, Supercritical
    if the lower bound on P(H(3n, n)) is above 1 - eps_hat, else Neither."""
    if not 0 < eps_hat < 0.5:
        raise ParameterError(f"eps_hat must lie in (0, 0.5), got {eps_hat}")
    if n < n_hat:
        raise ParameterError(f"Scale n={n} below the configured minimum {n_hat}")
    if samples.n != n:
        raise ParameterError(f"Samples were drawn at scale {samples.n}, not {n}")
    needed = min_trials(eps_hat, confidence)
    if samples.trials < needed:
        raise InsufficientSamplesError(
            f"{samples.trials} crossing samples; need >= {needed} for eps_hat={eps_hat}"
        )
    trials = samples.trials
    v_hits = int(samples.vertical.sum())
    h_hits = int(samples.horizontal.sum())
    _, v_hi = clopper_pearson(v_hits, trials, confidence)
    h_lo, _ = clopper_pearson(h_hits, trials, confidence)
    v_hi, h_lo = float(v_hi), float(h_lo)
    if v_hi < eps_hat:
        decision = Decision.SUBCRITICAL
    elif h_lo > 1.0 - eps_hat:
        decision = Decision.SUPERCRITICAL
    else:
        decision = Decision.NEITHER
    logger.debug("n=%d: P(V)=%.3f (<= %.3f), P(H)=%.3f (>= %.3f) -> %s", n, v_hits / trials, v_hi,
                 h_hits / trials, h_lo, decision.value)
    return FiniteSizeDecision(decision, n, eps_hat, trials, v_hits / trials, v_hi,
                              h_hits / trials, h_lo)


def decision_inversions(decisions: Sequence[Decision]) -> List[Tuple[int, int]]:
    """Index pairs (i, j), i < j, where decision j ranks below decision i."""
    return [(i, j) for i in range(len(decisions)) for j in range(i + 1, len(decisions))
            if decisions[j].rank < decisions[i].rank]
