# ddcp/laws.py

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from contact_lattice.core.exceptions import ParameterError

logger = logging.getLogger(__name__)


class LawKind(Enum):
    KEFI = "kefi"
    CONSTANT = "constant"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class LawValue:
    lam: float
    h: float
    clamped: bool = False


@dataclass(frozen=True, eq=False)
class DensityLaw:
    """Density feedback rho -> (Lambda(rho), H(rho)); Lambda is per neighbour slot.

    kefi:      Lambda = beta (1 - delta) / 4 (eps - g rho),  H = beta delta rho (eps - g rho)
    constant:  Lambda = lam0, H = h0
    tabulated: piecewise-linear interpolation on two (rho, value) grids
    """
    kind: LawKind
    params: Dict[str, float] = field(default_factory=dict)
    rho_lam: Optional[np.ndarray] = field(default=None, repr=False)
    lam_values: Optional[np.ndarray] = field(default=None, repr=False)
    rho_h: Optional[np.ndarray] = field(default=None, repr=False)
    h_values: Optional[np.ndarray] = field(default=None, repr=False)

    # === Constructors ===
    @classmethod
    def kefi(cls, beta: float, delta: float, epsilon: float, g: float) -> "DensityLaw":
        if not 0.0 < delta < 1.0:
            raise ParameterError(f"delta must lie in (0, 1), got {delta}")
        if beta <= 0 or epsilon <= 0 or g < 0:
            raise ParameterError(
                f"Need beta > 0, epsilon > 0, g >= 0; got beta={beta}, epsilon={epsilon}, g={g}"
            )
        if epsilon - g < 0:
            logger.warning("epsilon - g < 0: Lambda and H go negative near rho = 1 and are clamped to 0")
        return cls(LawKind.KEFI, {"beta": float(beta), "delta": float(delta),
                                  "epsilon": float(epsilon), "g": float(g)})

    @classmethod
    def constant(cls, lam0: float, h0: float) -> "DensityLaw":
        if lam0 < 0 or h0 < 0:
            raise ParameterError(f"Constant law needs nonnegative rates, got ({lam0}, {h0})")
        return cls(LawKind.CONSTANT, {"lam0": float(lam0), "h0": float(h0)})

    @classmethod
    def tabulated(cls, rho_lam: Sequence[float], lam_values: Sequence[float],
                  rho_h: Sequence[float], h_values: Sequence[float]) -> "DensityLaw":
        grids = []
        for name, xs, ys in (("Lambda", rho_lam, lam_values), ("H", rho_h, h_values)):
            xs = np.asarray(xs, dtype=float)
            ys = np.asarray(ys, dtype=float)
            if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
                raise ParameterError(f"{name} table needs matching 1-D grids with >= 2 points")
            if np.any(np.diff(xs) <= 0):
                raise ParameterError(f"{name} table rho grid must be strictly increasing")
            if xs[0] > 0 or xs[-1] < 1:
                raise ParameterError(f"{name} table must cover [0, 1]")
            if not np.all(np.isfinite(ys)) or np.any(ys < 0):
                raise ParameterError(f"{name} table values must be finite and nonnegative")
            xs.setflags(write=False)
            ys.setflags(write=False)
            grids.extend([xs, ys])
        return cls(LawKind.TABULATED, {}, *grids)

    # === Evaluation ===
    def evaluate(self, rho: float) -> LawValue:
        rho = float(rho)
        if not 0.0 <= rho <= 1.0:
            raise ParameterError(f"Density must lie in [0, 1], got {rho}")
        if self.kind == LawKind.CONSTANT:
            return LawValue(self.params["lam0"], self.params["h0"])
        if self.kind == LawKind.TABULATED:
            return LawValue(float(np.interp(rho, self.rho_lam, self.lam_values)),
                            float(np.interp(rho, self.rho_h, self.h_values)))
        p = self.params
        slack = p["epsilon"] - p["g"] * rho
        lam = p["beta"] * (1.0 - p["delta"]) / 4.0 * slack
        h = p["beta"] * p["delta"] * rho * slack
        if lam < 0 or h < 0:
            return LawValue(max(lam, 0.0), max(h, 0.0), True)
        return LawValue(lam, h)

    def evaluate_many(self, rho: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, bool]:
        values = [self.evaluate(r) for r in np.clip(np.asarray(rho, dtype=float), 0.0, 1.0)]
        lam = np.array([v.lam for v in values])
        h = np.array([v.h for v in values])
        return lam, h, any(v.clamped for v in values)

    def lipschitz(self) -> float:
        """Bound on the slope of (Lambda, H) over [0, 1] (sup norm over both components)."""
        if self.kind == LawKind.CONSTANT:
            return 0.0
        if self.kind == LawKind.TABULATED:
            slopes = [np.abs(np.diff(ys) / np.diff(xs)).max()
                      for xs, ys in ((self.rho_lam, self.lam_values), (self.rho_h, self.h_values))]
            return float(max(slopes))
        p = self.params
        lam_slope = p["beta"] * (1.0 - p["delta"]) * p["g"] / 4.0
        h_slope = p["beta"] * p["delta"] * max(abs(p["epsilon"]), abs(p["epsilon"] - 2.0 * p["g"]))
        return float(max(lam_slope, h_slope))

    def min_on_unit_interval(self, points: int = 101) -> Tuple[float, float]:
        """Smallest raw (unclamped) Lambda and H over a grid of [0, 1]."""
        grid = np.linspace(0.0, 1.0, points)
        if self.kind == LawKind.KEFI:
            p = self.params
            slack = p["epsilon"] - p["g"] * grid
            return (float((p["beta"] * (1 - p["delta"]) / 4.0 * slack).min()),
                    float((p["beta"] * p["delta"] * grid * slack).min()))
        lam, h, _ = self.evaluate_many(grid)
        return float(lam.min()), float(h.min())

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, **self.params}
        if self.kind == LawKind.TABULATED:
            data.update({
                "rho_lambda": self.rho_lam.tolist(), "lambda": self.lam_values.tolist(),
                "rho_h": self.rho_h.tolist(), "h": self.h_values.tolist(),
            })
        return data


def eval_law(law: DensityLaw, rho: float) -> Tuple[float, float]:
    value = law.evaluate(rho)
    if value.clamped:
        logger.warning("Density law negative at rho=%.4f; clamped to (%.4g, %.4g)", rho, value.lam, value.h)
    return value.lam, value.h
