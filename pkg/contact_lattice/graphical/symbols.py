# graphical/symbols.py
"""Symbol types of the graphical representation and their integer codes.

Codes: 0 D1, 1 D2, 2 U1, 3 U2, 4..7 A1 by incoming slot, 8..11 A2 by incoming
slot (slot order LEFT, RIGHT, UP, DOWN). Codes >= 2 are up symbols. The code is
also the type rank used to break time ties.
"""
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.core.lattice import DIRECTIONS, Direction
from contact_lattice.core.rates import Model, RateSet

D1, D2, U1, U2 = 0, 1, 2, 3
A1_BASE, A2_BASE = 4, 8
N_CODES = 12
FIRST_UP = U1


class SymbolType(Enum):
    D1 = "D1"
    D2 = "D2"
    U1 = "U1"
    U2 = "U2"
    A1 = "A1"
    A2 = "A2"

    @property
    def is_up(self) -> bool:
        return self not in (SymbolType.D1, SymbolType.D2)

    @property
    def is_arrow(self) -> bool:
        return self in (SymbolType.A1, SymbolType.A2)


_PLAIN = {D1: SymbolType.D1, D2: SymbolType.D2, U1: SymbolType.U1, U2: SymbolType.U2}


def encode(symbol_type: SymbolType, direction: Optional[Direction] = None) -> int:
    if symbol_type.is_arrow:
        if direction is None:
            raise ParameterError(f"{symbol_type.value} symbols need an arrow direction")
        base = A1_BASE if symbol_type == SymbolType.A1 else A2_BASE
        return base + DIRECTIONS.index(direction)
    return {v: k for k, v in _PLAIN.items()}[symbol_type]


def decode(code: int) -> Tuple[SymbolType, Optional[Direction]]:
    code = int(code)
    if code in _PLAIN:
        return _PLAIN[code], None
    if A1_BASE <= code < A2_BASE:
        return SymbolType.A1, DIRECTIONS[code - A1_BASE]
    if A2_BASE <= code < N_CODES:
        return SymbolType.A2, DIRECTIONS[code - A2_BASE]
    raise ParameterError(f"Unknown symbol code {code}")


def label(code: int) -> str:
    symbol_type, direction = decode(code)
    return symbol_type.value if direction is None else f"{symbol_type.value}_{direction.value}"


def codes_for(model: Model) -> List[int]:
    """Codes a timeline of `model` can contain; Model B has no A2."""
    return list(range(A2_BASE)) if model == Model.B else list(range(N_CODES))


def code_rates(rates: RateSet) -> np.ndarray:
    """Per-line intensity of every code: incoming arrows per slot at lam / lam_tilde."""
    out = np.zeros(N_CODES)
    out[D1] = rates.kappa
    out[D2] = rates.kappa_tilde_or_star
    out[U1] = rates.h
    out[U2] = rates.h_tilde
    out[A1_BASE:A2_BASE] = rates.lam
    out[A2_BASE:N_CODES] = rates.lam_tilde
    return out


def up_partition(base: RateSet) -> np.ndarray:
    """Cumulative right edges of the up-code bins of [0, 1] for the G mark
    (U1, U2, A1 x4, A2 x4), proportional to the base up rates."""
    weights = code_rates(base)[FIRST_UP:]
    total = weights.sum()
    if total <= 0:
        return np.zeros(0)
    edges = np.clip(np.cumsum(weights) / total, 0.0, 1.0)
    # the last live bin and any zero-weight bins after it end exactly at 1
    last_live = int(np.flatnonzero(weights > 0)[-1])
    edges[last_live:] = 1.0
    return edges


def resolve_codes(q_marks: np.ndarray, b_marks: np.ndarray, g_marks: np.ndarray, q: float,
                  base: RateSet) -> np.ndarray:
    """Type of every symbol at parameter q from its (Q, B, G) marks.

    Up iff Q <= q; down symbols split by B at kappa / (kappa + kappa_tilde_or_star);
    up symbols split by G over `up_partition(base)`.
    """
    codes = np.empty(q_marks.shape[0], dtype=np.int64)
    up = q_marks <= q
    down_mass = base.down_mass
    split = base.kappa / down_mass if down_mass > 0 else 1.0
    codes[~up] = np.where(b_marks[~up] <= split, D1, D2)
    if np.any(up):
        edges = up_partition(base)
        if edges.size == 0:
            raise ParameterError("Base has no up rates; cannot resolve up symbols")
        bins = np.searchsorted(edges, g_marks[up], side="left")
        codes[up] = FIRST_UP + np.minimum(bins, edges.size - 1)
    return codes


def marks_for_code(code: int, q: float, base: RateSet) -> Tuple[float, float, float]:
    """(Q, B, G) marks that resolve to `code` at parameter q (bin midpoints)."""
    if code >= FIRST_UP:
        if q <= 0:
            raise ParameterError("No up symbol can be realised at q = 0")
        edges = up_partition(base)
        j = code - FIRST_UP
        lo = 0.0 if j == 0 else edges[j - 1]
        if edges[j] <= lo:
            raise ParameterError(f"Code {label(code)} has zero rate in the base parameterization")
        return q / 2.0, 0.5, (lo + edges[j]) / 2.0
    if q >= 1:
        raise ParameterError("No down symbol can be realised at q = 1")
    split = base.kappa / base.down_mass if base.down_mass > 0 else 1.0
    b = split / 2.0 if code == D1 else (1.0 + split) / 2.0
    if (code == D1 and split <= 0) or (code == D2 and split >= 1):
        raise ParameterError(f"Code {label(code)} has zero rate in the base parameterization")
    return (1.0 + q) / 2.0, b, 0.5
