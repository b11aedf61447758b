import math
import time

import numpy as np
import pytest

from cvm2d.analytic import (
    PHYSICAL_WINDOW, continuous_minimize, delta_denom, divergence_points,
    equilibrium, estimate_h, h_for_variable, projected_gradient, ratio_h,
)
from cvm2d.configvars import equivalence_residuals, normalization_sums
from cvm2d.errors import DivergenceError, DomainError
from cvm2d.thermo import EnthalpyParams, free_energy, random_fractions


def test_delta_denom():
    assert delta_denom(1.0) == 4.0
    assert delta_denom(1.2) == pytest.approx(4.76, abs=1e-12)
    for root in divergence_points().roots:
        assert abs(delta_denom(root)) < 1e-12


def test_divergence_points():
    lo, hi = divergence_points().roots
    assert lo == pytest.approx(0.171573, abs=1e-6)
    assert hi == pytest.approx(5.828427, abs=1e-6)
    for root in (lo, hi):
        with pytest.raises(DivergenceError):
            equilibrium(root)


def test_equilibrium_at_one():
    sol = equilibrium(1.0)
    assert sol.y2 == pytest.approx(0.25, abs=1e-12)
    assert sol.z1 == pytest.approx(0.125, abs=1e-12)
    assert sol.z3 == pytest.approx(0.125, abs=1e-12)
    assert sol.w2 == pytest.approx(0.25, abs=1e-12)
    assert sol.physical


def test_equilibrium_at_1_2():
    fr = equilibrium(1.2).fractions
    assert fr.y1 == pytest.approx(0.27311, abs=1e-5)
    assert fr.y2 == pytest.approx(0.22689, abs=1e-5)
    assert fr.z1 == pytest.approx(0.15021, abs=1e-5)
    assert fr.z2 == pytest.approx(0.12290, abs=1e-5)
    assert fr.z3 == pytest.approx(0.10399, abs=1e-5)
    assert fr.z1 + 2 * fr.z2 + fr.z3 == pytest.approx(0.5, abs=1e-12)


def test_equilibrium_invariants():
    for h in np.linspace(0.4, 2.9, 26):
        sol = equilibrium(h)
        fr = sol.fractions
        for v in normalization_sums(fr):
            assert v == pytest.approx(1.0, abs=1e-9)
        assert max(abs(r) for r in equivalence_residuals(fr)) < 1e-9
        assert fr.relabeled() == fr
        assert fr.z2 == pytest.approx(0.25 - (fr.z1 + fr.z3) / 2, abs=1e-12)


def test_nonphysical_window():
    sol = equilibrium(1.0 / 3.0)
    assert sol.y1 == pytest.approx(0.0, abs=1e-15) and not sol.physical
    with pytest.raises(DomainError):
        equilibrium(1.0 / 3.0, strict=True)
    assert not equilibrium(3.5).physical
    assert equilibrium(3.5).z3 < 0
    with pytest.raises(DomainError):
        equilibrium(6.0)
    with pytest.raises(DomainError):
        equilibrium(-1.0)


def test_monotonicity():
    hs = np.arange(0.34, 3.0, 0.01)
    sols = [equilibrium(h).fractions for h in hs]
    z1 = np.array([s.z1 for s in sols])
    z3 = np.array([s.z3 for s in sols])
    y2 = np.array([s.y2 for s in sols])
    assert np.all(np.diff(z1) > 0)
    assert np.all(np.diff(z3) < 0)
    assert np.all(np.diff(y2) < 0)


def test_stationarity():
    for h in (0.5, 0.9, 1.2, 1.7, 2.5):
        fr = equilibrium(h).fractions
        assert np.linalg.norm(projected_gradient(fr, h)) < 1e-8


def test_estimate_h():
    fr = random_fractions(0.5).replace(y1=0.2754, y2=0.2246, z1=0.1719, z3=0.0469)
    assert estimate_h(fr) == pytest.approx(1.729, abs=0.001)
    for h in np.linspace(0.5, 2.5, 20):
        fr = equilibrium(h).fractions
        # the squared-ratio estimator reads sqrt(h) off the closed form
        assert estimate_h(fr) == pytest.approx(math.sqrt(h), abs=1e-9)
        assert ratio_h(fr) == pytest.approx(h, abs=1e-9)
    assert estimate_h(random_fractions(0.5)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError, match="z3"):
        estimate_h(random_fractions(1.0))
    with pytest.raises(DomainError, match="y1"):
        estimate_h(random_fractions(0.5).replace(y1=0.0))


def test_h_for_variable():
    for h in (0.7, 1.0, 1.4, 2.2):
        fr = equilibrium(h).fractions
        for name in ("y2", "z1", "z3"):
            assert h_for_variable(name, getattr(fr, name)) == pytest.approx(h, abs=1e-9)
    with pytest.raises(DomainError):
        h_for_variable("y2", 0.6)


def test_oracle_matches_closed_form():
    t0 = time.perf_counter()
    for h in (0.9, 1.0, 1.1, 1.2, 1.3):
        got = continuous_minimize(h)
        want = equilibrium(h).fractions
        assert np.allclose(got.as_tuple(), want.as_tuple(), atol=1e-6, rtol=0)
    assert time.perf_counter() - t0 < 5.0


def test_oracle_examples():
    fr = continuous_minimize(1.0)
    assert np.allclose((fr.z1, fr.z2, fr.z3), 0.125, atol=1e-9)
    fr = continuous_minimize(0.9)
    assert fr.z3 > 0.125 > fr.z1
    res = continuous_minimize(1.2, full=True)
    assert res.grad_norm < 1e-10
    # the oracle reaches the closed-form free energy
    f_star = free_energy(equilibrium(1.2).fractions, EnthalpyParams.from_h(1.2)).free_energy
    assert res.free_energy == pytest.approx(f_star, abs=1e-12)


def test_oracle_off_equiprobable():
    res = continuous_minimize(1.3, x1=0.35, full=True)
    assert res.fractions.x1 == pytest.approx(0.35, abs=1e-12)
    assert max(abs(r) for r in equivalence_residuals(res.fractions)) < 1e-12
    # at h = 1 the product measure is the minimum for any x1
    fr = continuous_minimize(1.0, x1=0.35)
    assert np.allclose(fr.as_tuple(), random_fractions(0.35).as_tuple(), atol=1e-8)


def test_physical_window_constant():
    assert PHYSICAL_WINDOW == (1 / 3, 3.0)
    assert math.isclose(equilibrium(2.999).z3, 0.0, abs_tol=1e-3)
