"""
Special-function kernels checked against scipy and quadrature oracles
"""
import math

import numpy as np
import pytest
from scipy import integrate, special

from models.errors import NumericDomainError
from models.schemas import MainLobeValue
from services.special_functions import bessel_j, fresnel, g_mu, inv_j0_main_lobe, j0_zeros


@pytest.mark.parametrize("order", [0, 1, 2, 5])
def test_bessel_matches_scipy(order):
    x = np.linspace(-60.0, 60.0, 2401)
    np.testing.assert_allclose(bessel_j(order, x), special.jv(order, x), rtol=0, atol=1e-10)


def test_bessel_large_arguments():
    x = np.array([100.0, 1234.5, 1e4])
    np.testing.assert_allclose(bessel_j(0, x), special.j0(x), rtol=0, atol=1e-10)
    np.testing.assert_allclose(bessel_j(1, x), special.j1(x), rtol=0, atol=1e-10)


def test_bessel_scalar_in_scalar_out():
    assert bessel_j(0, 0.0) == 1.0
    assert isinstance(bessel_j(1, 2.0), float)
    assert bessel_j(1, -2.0) == pytest.approx(-bessel_j(1, 2.0), abs=1e-15)


def test_bessel_first_zero():
    assert abs(bessel_j(0, 2.404826)) < 1e-6


@pytest.mark.parametrize("order", [-1, 1.5])
def test_bessel_rejects_bad_order(order):
    with pytest.raises(NumericDomainError):
        bessel_j(order, 1.0)


def test_j0_zeros_match_scipy():
    zeros = j0_zeros(8)
    np.testing.assert_allclose(zeros, special.jn_zeros(0, 8), rtol=0, atol=1e-8)
    assert all(a < b for a, b in zip(zeros, zeros[1:]))
    assert all(abs(bessel_j(0, z)) < 1e-7 for z in zeros)


def test_j0_zeros_rejects_zero_count():
    with pytest.raises(NumericDomainError):
        j0_zeros(0)


def test_inverse_main_lobe_eta():
    assert inv_j0_main_lobe(0.5) == pytest.approx(1.521, abs=1e-3)
    assert inv_j0_main_lobe(MainLobeValue(value=0.5)) == inv_j0_main_lobe(0.5)


def test_inverse_main_lobe_end_points():
    assert inv_j0_main_lobe(1.0) == 0.0
    assert inv_j0_main_lobe(0.0) == pytest.approx(2.404825557695773, abs=1e-6)


def test_inverse_main_lobe_round_trip():
    first_zero = j0_zeros(1)[0]
    for y in np.linspace(0.0, first_zero - 1e-6, 25):
        assert inv_j0_main_lobe(bessel_j(0, y)) == pytest.approx(y, abs=1e-6)


def test_inverse_main_lobe_is_decreasing():
    levels = np.linspace(0.05, 0.95, 19)
    values = [inv_j0_main_lobe(level) for level in levels]
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("level", [-0.1, 1.2])
def test_inverse_main_lobe_out_of_range(level):
    with pytest.raises(NumericDomainError):
        inv_j0_main_lobe(level)


@pytest.mark.parametrize("x", [0.1, 1.0, 1.99, 2.0, 2.5, 4.0, 5.99, 6.0, 10.0, 30.0])
def test_fresnel_matches_scipy(x):
    s_ref, c_ref = special.fresnel(x)
    c, s = fresnel(x)
    assert c == pytest.approx(c_ref, abs=1e-8)
    assert s == pytest.approx(s_ref, abs=1e-8)


def test_fresnel_against_trapezoid_oracle():
    t = np.linspace(0.0, 1.0, 100001)
    c_ref = integrate.trapezoid(np.cos(math.pi / 2 * t * t), t)
    s_ref = integrate.trapezoid(np.sin(math.pi / 2 * t * t), t)
    c, s = fresnel(1.0)
    assert c == pytest.approx(c_ref, abs=1e-6)
    assert s == pytest.approx(s_ref, abs=1e-6)


def test_fresnel_limits():
    assert fresnel(0.0) == (0.0, 0.0)
    # both integrals oscillate about 1/2 with amplitude at most 1/(pi x)
    for x in (50.0, 400.0):
        c, s = fresnel(x)
        assert abs(c - 0.5) <= 1.0 / (math.pi * x) + 1e-9
        assert abs(s - 0.5) <= 1.0 / (math.pi * x) + 1e-9
    c, s = fresnel(400.0)
    assert abs(c - 0.5) < 1e-3 and abs(s - 0.5) < 1e-3


def test_fresnel_rejects_negative():
    with pytest.raises(NumericDomainError):
        fresnel(-1.0)


def test_fresnel_gain():
    assert g_mu(0.0) == 1.0
    s_ref, c_ref = special.fresnel(1.3)
    assert g_mu(1.3) == pytest.approx(math.hypot(c_ref, s_ref) / 1.3, abs=1e-8)
    values = g_mu(np.linspace(0.0, 1.0, 11))
    assert np.all(np.diff(values) < 0)
    with pytest.raises(NumericDomainError):
        g_mu(-0.5)
