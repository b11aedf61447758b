"""Closed-form equilibrium at x1 = 0.5 and a numerical oracle for it.

With h = exp(2 eps1) and Delta = -h^2 + 6h - 1, the equiprobable
free-energy minimum is

    y1 = y3 = (3h - 1) / (2 Delta)        y2 = h (3 - h) / (2 Delta)
    w1 = w3 = (h + 1)^2 / (4 Delta)       w2 = (3h - 1)(3 - h) / (4 Delta)
    z1 = z6 = (3h - 1)(h + 1) / (8 Delta)
    z2 = z5 = (3h - 1)(3 - h) / (8 Delta)
    z3 = z4 = (3 - h)(h + 1) / (8 Delta)

Delta vanishes at h = 3 -+ 2 sqrt(2).  Every fraction is strictly
positive only for 1/3 < h < 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .configvars import ConfigFractions
from .errors import ConvergenceError, DivergenceError, DomainError
from .thermo import ENTROPY_WEIGHTS, random_fractions

DIVERGENCE_TOL = 1e-9
PHYSICAL_WINDOW = (1.0 / 3.0, 3.0)


@dataclass(frozen=True)
class DivergenceInfo:
    roots: tuple[float, float]


@dataclass(frozen=True)
class EquilibriumSolution:
    h: float
    delta_denom: float
    fractions: ConfigFractions
    physical: bool

    def __getattr__(self, name):
        # convenience: sol.y2, sol.z1, ...
        if name.startswith("_") or name in ("h", "delta_denom", "fractions", "physical"):
            raise AttributeError(name)
        return getattr(self.fractions, name)


def delta_denom(h: float) -> float:
    return -h * h + 6.0 * h - 1.0


def divergence_points() -> DivergenceInfo:
    r = 2.0 * math.sqrt(2.0)
    return DivergenceInfo((3.0 - r, 3.0 + r))


def equilibrium(h: float, strict: bool = False) -> EquilibriumSolution:
    """Closed-form equilibrium fractions for interaction parameter ``h``.

    Outside the physical window (1/3, 3) some fractions are zero or
    negative; the solution is still returned with ``physical=False`` unless
    ``strict`` is set, in which case :class:`DomainError` is raised.
    """
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")
    d = delta_denom(h)
    if abs(d) < DIVERGENCE_TOL:
        raise DivergenceError(f"closed form diverges at h={h!r} (Delta={d:.3e})")
    lo, hi = divergence_points().roots
    if not lo < h < hi:
        raise DomainError(
            f"h={h} lies outside the divergence roots ({lo:.6f}, {hi:.6f})"
        )

    a = 3.0 * h - 1.0
    b = 3.0 - h
    c = h + 1.0
    y1 = a / (2 * d)
    y2 = h * b / (2 * d)
    w1 = c * c / (4 * d)
    w2 = a * b / (4 * d)
    z1 = a * c / (8 * d)
    z2 = a * b / (8 * d)
    z3 = b * c / (8 * d)
    fr = ConfigFractions(0.5, 0.5, y1, y2, y1, w1, w2, w1, z1, z2, z3, z3, z2, z1)

    physical = all(v > 0.0 for v in fr.as_tuple())
    if strict and not physical:
        bad = [n for n, v in zip(fr.__dataclass_fields__, fr.as_tuple()) if v <= 0.0]
        raise DomainError(f"non-positive fractions {bad} at h={h}")
    return EquilibriumSolution(h, d, fr, physical)


def _triplet_pair_ratio(fr: ConfigFractions) -> float:
    missing = [name for name, v in (("z3", fr.z3), ("y1", fr.y1)) if v <= 0.0]
    if missing:
        raise DomainError(f"h estimate undefined: {', '.join(missing)} is zero")
    ratio = fr.z1 * fr.y2 / (fr.z3 * fr.y1)
    if ratio <= 0.0:
        raise DomainError("h estimate undefined: z1 or y2 is zero")
    return ratio


def estimate_h(fr: ConfigFractions) -> float:
    """Infer h from counted fractions via z1 / z3 = y1 h^2 / y2, i.e.
    ``sqrt(z1 y2 / (z3 y1))``.

    The closed-form equilibrium itself gives ``z1 y2 / (z3 y1) = h``, so on
    those fractions this estimator returns ``sqrt(h)``; see
    :func:`ratio_h` for the reading that inverts the closed form.
    """
    return math.sqrt(_triplet_pair_ratio(fr))


def ratio_h(fr: ConfigFractions) -> float:
    """``z1 y2 / (z3 y1)``, which equals h exactly on :func:`equilibrium` fractions."""
    return _triplet_pair_ratio(fr)


def h_for_variable(name: str, value: float, lo=None, hi=None, tol=1e-12) -> float:
    """Solve ``equilibrium(h).<name> == value`` by bisection.

    y2 and z3 decrease and z1 increases with h on (1/3, 3); the bracket
    defaults to that window.
    """
    lo = PHYSICAL_WINDOW[0] if lo is None else lo
    hi = PHYSICAL_WINDOW[1] if hi is None else hi

    def g(h):
        return getattr(equilibrium(h).fractions, name) - value

    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if (g_lo > 0) == (g_hi > 0):
        raise DomainError(
            f"{name}={value:.6f} is not reached by the closed form on [{lo:.4f}, {hi:.4f}]"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Numerical oracle.
#
# The six triplet fractions are the free coordinates; x, y, w follow from
# them linearly.  Three linear constraints remain (normalization, the
# prescribed x1, and z2 + z4 = z3 + z5), leaving a 3-dimensional affine
# search space on which F is minimized by damped Newton steps.

# rows: x1 x2 y1 y2 y3 w1 w2 w3 z1..z6 ; columns: z1..z6
_FROM_Z = np.array(
    [
        [1, 2, 0, 1, 0, 0],  # x1 = z1 + 2 z2 + z4
        [0, 0, 1, 0, 2, 1],  # x2 = z3 + 2 z5 + z6
        [1, 1, 0, 0, 0, 0],  # y1
        [0, 1, 0, 1, 0, 0],  # y2
        [0, 0, 0, 0, 1, 1],  # y3
        [1, 0, 1, 0, 0, 0],  # w1
        [0, 1, 0, 0, 1, 0],  # w2
        [0, 0, 0, 1, 0, 1],  # w3
        *np.eye(6, dtype=int).tolist(),
    ],
    dtype=float,
)
# d(2 y2 - y1 - y3)/dz
_DELTA_FROM_Z = 2 * _FROM_Z[3] - _FROM_Z[2] - _FROM_Z[4]


def _constraint_system(x1):
    a = np.array(
        [
            [1, 2, 1, 1, 2, 1],    # sum gamma_i z_i = 1
            [1, 2, 0, 1, 0, 0],    # x1
            [0, 1, -1, 1, -1, 0],  # z2 + z4 - z3 - z5 = 0
        ],
        dtype=float,
    )
    b = np.array([1.0, x1, 0.0])
    return a, b


def _null_space(a):
    _, s, vt = np.linalg.svd(a)
    rank = int((s > 1e-12).sum())
    return vt[rank:].T


def _fractions_from_z(z) -> ConfigFractions:
    return ConfigFractions(*(_FROM_Z @ z))


@dataclass(frozen=True)
class OracleResult:
    fractions: ConfigFractions
    free_energy: float
    grad_norm: float
    iterations: int


def continuous_minimize(
    h: float,
    x1: float = 0.5,
    eps0: float = 0.0,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    full: bool = False,
):
    """Minimize the free-energy functional over consistent fractions.

    Searches the affine set of triplet fractions with the given ``x1``,
    starting from the random-placement point, with Newton steps and a
    backtracking line search that keeps every fraction positive.  Stops when
    the projected gradient norm drops below ``tol``.

    Returns :class:`ConfigFractions`, or an :class:`OracleResult` when
    ``full`` is set.
    """
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")
    if not 0.0 < x1 < 1.0:
        raise DomainError(f"x1 must lie strictly between 0 and 1, got {x1}")
    ln_h = math.log(h)
    a, _ = _constraint_system(x1)
    basis = _null_space(a)  # 6 x 3
    jac = _FROM_Z @ basis   # 14 x 3
    z = np.array(random_fractions(x1).z)
    # enthalpy gradient w.r.t. z: 2 eps1 = ln h times d(delta)/dz
    lin = ln_h * _DELTA_FROM_Z + eps0 * _FROM_Z[0]

    def objective(zz):
        f = _FROM_Z @ zz
        if np.any(f <= 0.0):
            return math.inf
        return float(lin @ zz - ENTROPY_WEIGHTS @ (f * np.log(f) - f))

    f_val = objective(z)
    grad_norm = math.inf
    for it in range(1, max_iter + 1):
        f = _FROM_Z @ z
        g = basis.T @ (lin - _FROM_Z.T @ (ENTROPY_WEIGHTS * np.log(f)))
        grad_norm = float(np.linalg.norm(g))
        if grad_norm < tol:
            break
        hess = -(jac.T * (ENTROPY_WEIGHTS / f)) @ jac
        try:
            step = -np.linalg.solve(hess, g)
        except np.linalg.LinAlgError:
            step = -g
        if g @ step >= 0:  # not a descent direction
            step = -g
        newton = g @ step < 0 and step is not g
        decrease = -(g @ step)
        if newton and decrease < 1e-13 * max(1.0, abs(f_val)):
            # below the resolution of F: trust the quadratic model
            cand = z + basis @ step
            f_new = objective(cand)
            if math.isfinite(f_new):
                z, f_val = cand, f_new
                continue
        t = 1.0
        while True:
            cand = z + t * (basis @ step)
            f_new = objective(cand)
            if f_new <= f_val + 1e-4 * t * (g @ step) or t < 1e-16:
                break
            t *= 0.5
        if t < 1e-16:
            if grad_norm < 1e3 * tol:
                break
            raise ConvergenceError(
                f"line search stalled at h={h}, gradient norm {grad_norm:.3e}"
            )
        z, f_val = cand, f_new
    else:
        raise ConvergenceError(
            f"no convergence after {max_iter} iterations, gradient norm {grad_norm:.3e}"
        )

    fr = _fractions_from_z(z)
    if full:
        return OracleResult(fr, f_val, grad_norm, it)
    return fr


def projected_gradient(fr: ConfigFractions, h: float, eps0: float = 0.0) -> np.ndarray:
    """Gradient of the free energy along the consistent-fraction directions at ``fr``."""
    a, _ = _constraint_system(fr.x1)
    basis = _null_space(a)
    f = _FROM_Z @ np.array(fr.z)
    lin = math.log(h) * _DELTA_FROM_Z + eps0 * _FROM_Z[0]
    return basis.T @ (lin - _FROM_Z.T @ (ENTROPY_WEIGHTS * np.log(f)))
