"""Reduced enthalpy, entropy and free energy of a configuration.

All energies are per unit and in units of k_B T (k_B T = 1).  The
interaction term uses the prefactor under which h = exp(2 eps1) is the
natural parameter of the closed-form equilibrium::

    H = eps0 * x1 + 2 * eps1 * (2 y2 - y1 - y3)
    S = 2 sum_i beta_i Lf(y_i) + sum_i beta_i Lf(w_i)
        - sum_i Lf(x_i) - 2 sum_i gamma_i Lf(z_i),      Lf(v) = v ln v - v
    F = H - S
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .configvars import ConfigFractions
from .errors import DomainError

# Entropy weight of Lf(f) for each fraction, in ConfigFractions field order.
ENTROPY_WEIGHTS = np.array(
    [-1, -1, 2, 4, 2, 1, 2, 1, -2, -4, -2, -2, -4, -2], dtype=float
)


def h_from_eps1(eps1: float) -> float:
    return math.exp(2.0 * eps1)


def eps1_from_h(h: float) -> float:
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")
    return 0.5 * math.log(h)


@dataclass(frozen=True)
class EnthalpyParams:
    eps0: float = 0.0
    eps1: float = 0.0

    @classmethod
    def from_h(cls, h, eps0=0.0):
        return cls(eps0=eps0, eps1=eps1_from_h(h))

    @property
    def h(self) -> float:
        return h_from_eps1(self.eps1)


@dataclass(frozen=True)
class ThermoReport:
    enthalpy: float
    entropy: float
    free_energy: float
    delta_term: float

    CSV_COLUMNS = ("enthalpy", "entropy", "free_energy", "delta")

    def csv_row(self) -> str:
        return ",".join(
            f"{v:.6f}"
            for v in (self.enthalpy, self.entropy, self.free_energy, self.delta_term)
        )


def lf(v: float) -> float:
    """v ln v - v, with 0 ln 0 taken as 0."""
    if v == 0.0:
        return 0.0
    return v * math.log(v) - v


def delta_term(fr: ConfigFractions) -> float:
    return 2.0 * fr.y2 - fr.y1 - fr.y3


def enthalpy(fr: ConfigFractions, params: EnthalpyParams) -> float:
    return params.eps0 * fr.x1 + 2.0 * params.eps1 * delta_term(fr)


def entropy(fr: ConfigFractions) -> float:
    return (
        2.0 * (lf(fr.y1) + 2.0 * lf(fr.y2) + lf(fr.y3))
        + (lf(fr.w1) + 2.0 * lf(fr.w2) + lf(fr.w3))
        - (lf(fr.x1) + lf(fr.x2))
        - 2.0 * (
            lf(fr.z1) + 2.0 * lf(fr.z2) + lf(fr.z3)
            + lf(fr.z4) + 2.0 * lf(fr.z5) + lf(fr.z6)
        )
    )


def free_energy(fr: ConfigFractions, params: EnthalpyParams) -> ThermoReport:
    h_bar = enthalpy(fr, params)
    s_bar = entropy(fr)
    return ThermoReport(h_bar, s_bar, h_bar - s_bar, delta_term(fr))


def eps0_from_x1(x1: float) -> float:
    """Activation enthalpy that yields ``x1`` when eps1 = 0.

    Positive eps0 penalizes A units, so eps0 > 0 corresponds to x1 < 0.5.
    """
    if not 0.0 < x1 < 1.0:
        raise DomainError(f"x1 must lie strictly between 0 and 1, got {x1}")
    return math.log((1.0 - x1) / x1)


def x1_from_eps0(eps0: float) -> float:
    # logistic form, stable for large |eps0|
    if eps0 >= 0:
        e = math.exp(-eps0)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(eps0))


def random_fractions(x1: float) -> ConfigFractions:
    """Configuration fractions when units are placed independently at random."""
    if not 0.0 <= x1 <= 1.0:
        raise DomainError(f"x1 must lie in [0, 1], got {x1}")
    a, b = x1, 1.0 - x1
    return ConfigFractions(
        a, b,
        a * a, a * b, b * b,
        a * a, a * b, b * b,
        a ** 3, a * a * b, a * a * b, a * b * b, a * b * b, b ** 3,
    )
