"""Laplace transforms and densities of the coarsening limit laws.

The exponential integral is checked against direct quadrature of its
defining integral, so every downstream identity here rests on an oracle
that does not share code with the implementation.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from eastmodel import (
    LimitKind,
    LimitLaw,
    alternating_differences_ok,
    density_p,
    exp_integral_E1,
    laplace_X,
    laplace_Y,
)
from eastmodel.limits import EULER_GAMMA

E_GAMMA = math.exp(EULER_GAMMA)  # 1.781072417990198


# --------------------------------------------------------------------------
# the exponential integral
# --------------------------------------------------------------------------

def test_e1_matches_defining_integral():
    for s in (0.3, 1.0, 2.5):
        oracle, err = quad(lambda x: math.exp(-s * x) / x, 1.0, np.inf, limit=200)
        assert err < 1e-8  # quad reports a conservative estimate
        assert exp_integral_E1(s) == pytest.approx(oracle, abs=1e-12)


def test_e1_frozen_point_and_brackets():
    assert exp_integral_E1(1.0) == pytest.approx(0.2193839343955205, abs=1e-15)
    # elementary sandwich e^-s / (s + 1) < E1(s) < e^-s / s
    for s in (0.1, 1.0, 4.0):
        v = exp_integral_E1(s)
        assert math.exp(-s) / (s + 1.0) < v < math.exp(-s) / s
    with pytest.raises(ValueError):
        exp_integral_E1(0.0)


def test_e1_vectorizes():
    s = np.array([0.5, 1.0, 2.0])
    out = exp_integral_E1(s)
    assert out.shape == (3,)
    assert out[1] == pytest.approx(exp_integral_E1(1.0))


# --------------------------------------------------------------------------
# domain-length transform
# --------------------------------------------------------------------------

def test_laplace_x_frozen_point_and_mass():
    assert laplace_X(0.0) == 1.0
    assert laplace_X(1.0, 1.0) == pytest.approx(0.19698664548514977, abs=1e-15)
    with pytest.raises(ValueError):
        laplace_X(-0.5)
    with pytest.raises(ValueError):
        laplace_X(1.0, c0=0.0)


def test_laplace_x_monotone_in_both_arguments():
    s = np.linspace(0.1, 6.0, 40)
    v_full = laplace_X(s, 1.0)
    v_half = laplace_X(s, 0.5)
    assert np.all(np.diff(v_full) < 0)
    # smaller c0 exponent means a heavier law, hence a smaller transform
    assert np.all(v_half < v_full)


def test_laplace_x_is_completely_monotone_on_grid():
    s = np.linspace(0.2, 5.0, 30)
    assert alternating_differences_ok(laplace_X(s, 1.0), orders=4)
    assert alternating_differences_ok(laplace_X(s, 0.5), orders=4)


def test_alternating_differences_reject_non_cm():
    s = np.linspace(0.0, 6.0, 30)
    assert not alternating_differences_ok(np.sin(s), orders=2)


def test_mean_from_transform_slope():
    # -d/ds E e^(-sX) at 0+ is E X = e^gamma when c0 = 1
    h = 1e-6
    assert (1.0 - laplace_X(h)) / h == pytest.approx(E_GAMMA, abs=1e-3)


# --------------------------------------------------------------------------
# first-zero transform
# --------------------------------------------------------------------------

def test_laplace_y_refuses_divergent_form():
    with pytest.raises(ValueError):
        laplace_Y(1.0)


def test_laplace_y_compensated_value():
    # 1 - exp{Ein(s)} with Ein(1) = gamma + E1(1); negative by construction
    v = laplace_Y(1.0, 1.0, regularized=True)
    assert v == pytest.approx(-1.2179860496420427, abs=1e-12)
    assert v == pytest.approx(1.0 - math.exp(EULER_GAMMA + exp_integral_E1(1.0)))
    with pytest.raises(ValueError):
        laplace_Y(0.0, regularized=True)


# --------------------------------------------------------------------------
# series density
# --------------------------------------------------------------------------

def test_density_truncation_is_exact_below_its_order():
    # term k is supported on x >= k, so order K is exact on [1, K+1)
    for x in (1.2, 1.9):
        assert density_p(x, 1.0, K=1) == density_p(x, 1.0, K=3) == pytest.approx(1.0 / x)
    for x in (2.1, 2.9):
        closed = 1.0 / x - math.log(x - 1.0) / x
        assert density_p(x, 1.0, K=2) == pytest.approx(closed, abs=1e-15)
        assert density_p(x, 1.0, K=3) == pytest.approx(closed, abs=1e-15)


def test_density_partial_sums_alternate():
    # on [3, 4) the K = 3 value sits between the two coarser truncations
    for x in (3.2, 3.7):
        k1, k2, k3 = (density_p(x, 1.0, K=k) for k in (1, 2, 3))
        assert k2 <= k3 <= k1
        assert k3 > 0.0


def test_density_mass_where_truncation_is_valid():
    # K = 3 is exact on [1, 4); Markov gives P(X > 4) <= E X / 4
    mass, err = quad(lambda x: density_p(x, 1.0, K=3), 1.0, 4.0, limit=200)
    assert err < 1e-6
    assert 1.0 - E_GAMMA / 4.0 - 1e-6 <= mass <= 1.0 + 1e-6


def test_density_consistent_with_transform():
    # e^(-sx) suppresses the region beyond x = 4 where the truncation drifts
    for s, band in ((1.0, 1e-3), (2.0, 1e-5)):
        num, _ = quad(
            lambda x: math.exp(-s * x) * density_p(x, 1.0, K=3), 1.0, 40.0, limit=300
        )
        assert abs(num - laplace_X(s)) < band


def test_density_domain_checks():
    with pytest.raises(ValueError):
        density_p(0.5)
    with pytest.raises(ValueError):
        density_p(2.0, K=4)
    with pytest.raises(ValueError):
        density_p(2.0, c0=1.5)


# --------------------------------------------------------------------------
# the bundled law object
# --------------------------------------------------------------------------

def test_limit_law_domain_length():
    law = LimitLaw(1.0, LimitKind.DOMAIN_LENGTH)
    assert law.laplace(1.0) == laplace_X(1.0)
    assert law.density(1.5) == density_p(1.5)
    assert law.mean() == pytest.approx(E_GAMMA, abs=1e-15)
    assert LimitLaw(0.5, LimitKind.DOMAIN_LENGTH).mean() == math.inf


def test_limit_law_first_zero_gating():
    law = LimitLaw(1.0, LimitKind.FIRST_ZERO)
    with pytest.raises(ValueError):
        law.laplace(1.0)  # not regularized
    with pytest.raises(ValueError):
        law.density(2.0)
    with pytest.raises(ValueError):
        law.mean()
    reg = LimitLaw(1.0, LimitKind.FIRST_ZERO, regularized=True)
    assert reg.laplace(1.0) == laplace_Y(1.0, 1.0, regularized=True)
