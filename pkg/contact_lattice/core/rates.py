# core/rates.py

from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import Any, Dict, Tuple

import math

from contact_lattice.core.exceptions import ParameterError, RateError

# Relative tolerance for "rescaled" (unit total line rate).
RESCALE_TOLERANCE = 1e-9


class Model(Enum):
    """Model A degrades only empty sites and repairs soil through neighbours;
    Model B degrades any site at rate kappa_star and repairs spontaneously."""
    A = "A"
    B = "B"


@dataclass(frozen=True)
class RateSet:
    """Constant-rate bundle. `lam` and `lam_tilde` are per directed neighbour slot.

    For Model B `kappa_tilde_or_star` holds kappa_star and `lam_tilde` is 0.
    """
    model: Model
    kappa: float
    kappa_tilde_or_star: float
    lam: float
    lam_tilde: float
    h: float
    h_tilde: float

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        for name in ("kappa", "kappa_tilde_or_star", "lam", "lam_tilde", "h", "h_tilde"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise RateError(f"Rate {name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)
        if self.model == Model.B and self.lam_tilde != 0.0:
            raise RateError("Model B has no neighbour repair: lam_tilde must be 0")

    # === Constructors ===
    @classmethod
    def model_a(cls, kappa: float, kappa_tilde: float, lam: float, lam_tilde: float,
                h: float, h_tilde: float) -> "RateSet":
        return cls(Model.A, kappa, kappa_tilde, lam, lam_tilde, h, h_tilde)

    @classmethod
    def model_b(cls, kappa: float, kappa_star: float, lam: float, h: float,
                h_tilde: float) -> "RateSet":
        return cls(Model.B, kappa, kappa_star, lam, 0.0, h, h_tilde)

    @classmethod
    def two_state(cls, kappa: float, lam: float, h: float) -> "RateSet":
        """Contact process with spontaneous infection, embedded in Model B
        (kappa_star = h_tilde = 0, so -1 never appears from a -1-free start)."""
        return cls.model_b(kappa, 0.0, lam, h, 0.0)

    @classmethod
    def model_a_two_state(cls, kappa: float, lam: float, h: float) -> "RateSet":
        """Same process embedded in Model A (kappa_tilde = lam_tilde = h_tilde = 0)."""
        return cls.model_a(kappa, 0.0, lam, 0.0, h, 0.0)

    # === Model-specific views ===
    @property
    def kappa_tilde(self) -> float:
        if self.model != Model.A:
            raise RateError("kappa_tilde is a Model A rate")
        return self.kappa_tilde_or_star

    @property
    def kappa_star(self) -> float:
        if self.model != Model.B:
            raise RateError("kappa_star is a Model B rate")
        return self.kappa_tilde_or_star

    @property
    def up_mass(self) -> float:
        """4*lam + 4*lam_tilde + h + h_tilde: the q of the rescaled parameterization."""
        return 4.0 * self.lam + 4.0 * self.lam_tilde + self.h + self.h_tilde

    @property
    def down_mass(self) -> float:
        return self.kappa + self.kappa_tilde_or_star

    @property
    def total_line_rate(self) -> float:
        return self.up_mass + self.down_mass

    @property
    def q(self) -> float:
        return self.up_mass

    def is_rescaled(self, tolerance: float = RESCALE_TOLERANCE) -> bool:
        return abs(self.total_line_rate - 1.0) <= tolerance

    def all_positive(self) -> bool:
        """Every rate of the model is strictly positive (irreducibility / uniqueness hypothesis)."""
        values = [self.kappa, self.kappa_tilde_or_star, self.lam, self.h, self.h_tilde]
        if self.model == Model.A:
            values.append(self.lam_tilde)
        return all(v > 0 for v in values)

    def rescaled(self) -> "RateSet":
        """Time-rescaled copy with unit total rate of events per line."""
        total = self.total_line_rate
        if total <= 0:
            raise RateError("Cannot rescale an all-zero rate set")
        return self.scaled(1.0 / total)

    def scaled(self, factor: float) -> "RateSet":
        return replace(
            self,
            kappa=self.kappa * factor,
            kappa_tilde_or_star=self.kappa_tilde_or_star * factor,
            lam=self.lam * factor,
            lam_tilde=self.lam_tilde * factor,
            h=self.h * factor,
            h_tilde=self.h_tilde * factor,
        )

    def with_rates(self, **changes: float) -> "RateSet":
        return replace(self, **changes)

    def up_rates(self) -> Tuple[float, float, float, float]:
        """(h, h_tilde, lam, lam_tilde): the rates increasing in the monotone order."""
        return self.h, self.h_tilde, self.lam, self.lam_tilde

    def down_rates(self) -> Tuple[float, float]:
        return self.kappa, self.kappa_tilde_or_star

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["model"] = self.model.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RateSet":
        return cls(
            Model(data["model"]),
            data["kappa"],
            data["kappa_tilde_or_star"],
            data["lam"],
            data.get("lam_tilde", 0.0),
            data["h"],
            data["h_tilde"],
        )


def with_q(base: RateSet, q: float) -> RateSet:
    """Scale the up block to total q and the down block to 1 - q, keeping ratios.

    The base must be rescaled; its internal up / down ratios are the fixed
    coefficients of the q-parameterization. For 0 < q1 < 1,
    with_q(with_q(base, q1), q2) equals with_q(base, q2). At q = 0 or q = 1 one
    block is zeroed and its ratios are gone, so a further with_q raises
    ParameterError; move along q with `QParameterization.at`, which keeps the base.
    """
    q = float(q)
    if not 0.0 <= q <= 1.0 or math.isnan(q):
        raise ParameterError(f"q must lie in [0, 1], got {q}")
    if not base.is_rescaled():
        raise ParameterError(
            f"Base rates must be rescaled to unit line rate, total is {base.total_line_rate}"
        )
    up, down = base.up_mass, base.down_mass
    if q > 0 and up <= 0:
        raise ParameterError("Base up-block is all zero: up-rate ratios undefined for q > 0")
    if q < 1 and down <= 0:
        raise ParameterError("Base down-block is all zero: down-rate ratios undefined for q < 1")
    up_factor = q / up if up > 0 else 0.0
    down_factor = (1.0 - q) / down if down > 0 else 0.0
    return replace(
        base,
        kappa=base.kappa * down_factor,
        kappa_tilde_or_star=base.kappa_tilde_or_star * down_factor,
        lam=base.lam * up_factor,
        lam_tilde=base.lam_tilde * up_factor,
        h=base.h * up_factor,
        h_tilde=base.h_tilde * up_factor,
    )


@dataclass(frozen=True)
class QParameterization:
    """A rescaled base rate set together with a value of q."""
    base: RateSet
    q: float

    def __post_init__(self):
        if not self.base.is_rescaled():
            object.__setattr__(self, "base", self.base.rescaled())
        # validates q against the base
        with_q(self.base, self.q)

    @property
    def rates(self) -> RateSet:
        return with_q(self.base, self.q)

    def at(self, q: float) -> "QParameterization":
        return QParameterization(self.base, q)

    def up_coefficients(self) -> Dict[str, float]:
        """Rates per unit q: h = r_h * q, h_tilde = r_ht * q, per-slot lam = r_l * q, ..."""
        up = self.base.up_mass
        if up <= 0:
            return {"h": 0.0, "h_tilde": 0.0, "lam": 0.0, "lam_tilde": 0.0}
        return {
            "h": self.base.h / up,
            "h_tilde": self.base.h_tilde / up,
            "lam": self.base.lam / up,
            "lam_tilde": self.base.lam_tilde / up,
        }

    def down_coefficients(self) -> Dict[str, float]:
        """Rates per unit (1 - q)."""
        down = self.base.down_mass
        if down <= 0:
            return {"kappa": 0.0, "kappa_tilde_or_star": 0.0}
        return {
            "kappa": self.base.kappa / down,
            "kappa_tilde_or_star": self.base.kappa_tilde_or_star / down,
        }

    @classmethod
    def from_ratios(cls, model: Model, kappa_ratio: Tuple[float, float],
                    up_ratio: Dict[str, float], q: float) -> "QParameterization":
        """Build from a down ratio (kappa : kappa_tilde/star) and up ratios keyed
        by 'lam', 'lam_tilde', 'h', 'h_tilde' (lam given as the aggregate 4*lam weight)."""
        raw = RateSet(
            model,
            kappa_ratio[0],
            kappa_ratio[1],
            up_ratio.get("lam", 0.0) / 4.0,
            up_ratio.get("lam_tilde", 0.0) / 4.0,
            up_ratio.get("h", 0.0),
            up_ratio.get("h_tilde", 0.0),
        )
        down = raw.down_mass
        up = raw.up_mass
        if down <= 0 or up <= 0:
            raise ParameterError("Both up and down ratios need positive mass")
        base = replace(
            raw,
            kappa=raw.kappa / down * 0.5,
            kappa_tilde_or_star=raw.kappa_tilde_or_star / down * 0.5,
            lam=raw.lam / up * 0.5,
            lam_tilde=raw.lam_tilde / up * 0.5,
            h=raw.h / up * 0.5,
            h_tilde=raw.h_tilde / up * 0.5,
        )
        return cls(base, q)
