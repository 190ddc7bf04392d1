"""Iterated-log weights: values, exact derivatives, and admissibility proxies."""

import math

import numpy as np
import pytest

from conedata.weights import (
    AdmissibilityReport,
    WeightFunction,
    check_admissibility,
    min_r_star,
)


def test_min_r_star_iterates_exp():
    assert min_r_star(1) == pytest.approx(math.e**2 - 2.0)
    assert min_r_star(2) == pytest.approx(math.exp(math.e**2) - 2.0)


def test_default_weight_is_single_log():
    w = WeightFunction()
    assert (w.m, w.beta, w.R_star, w.R1) == (1, (1.0,), 8.0, 8.0)
    r = np.array([math.e - 2.0, 8.0, 100.0])
    assert np.allclose(w(r), np.log(2.0 + r), rtol=1e-15)
    assert w(np.array([math.e - 2.0]))[0] == pytest.approx(1.0)


def test_single_log_derivatives_closed_form():
    w = WeightFunction()
    r = np.array([3.0, 10.0, 1e4])
    d = w.derivs(r, 4)
    for k in range(1, 5):
        want = (-1.0) ** (k - 1) * math.factorial(k - 1) / (2.0 + r) ** k
        assert np.allclose(d[k], want, rtol=1e-12), f"derivative order {k}"


def test_sqrt_log_derivative():
    w = WeightFunction(beta=(0.5,))
    r = np.array([5.0])
    d = w.derivs(r, 1)
    lg = math.log(7.0)
    assert d[0, 0] == pytest.approx(math.sqrt(lg))
    assert d[1, 0] == pytest.approx(1.0 / (2.0 * 7.0 * math.sqrt(lg)))


def test_inverse_derivatives_match_reciprocal():
    w = WeightFunction()
    r = np.array([4.0, 40.0])
    inv = w.inv_derivs(r, 2)
    lg = np.log(2.0 + r)
    assert np.allclose(inv[0], 1.0 / lg, rtol=1e-14)
    assert np.allclose(inv[1], -1.0 / ((2.0 + r) * lg**2), rtol=1e-12)
    want2 = (2.0 / lg + 1.0) / ((2.0 + r) ** 2 * lg**2)
    assert np.allclose(inv[2], want2, rtol=1e-12)


def test_value_at_log_agrees_and_survives_huge_radii():
    w = WeightFunction(m=2, beta=(0.5, 0.7), R_star=1617.0)
    r = np.array([2e3, 1e6])
    assert np.allclose(w.value_at_log(np.log(r)), w(r), rtol=1e-12)
    huge = w.value_at_log(np.array([1e8]))
    assert np.isfinite(huge[0]) and huge[0] > 0


def test_exponent_pattern_enforced():
    with pytest.raises(ValueError):
        WeightFunction(m=2, beta=(1.0, 0.7), R_star=1700.0)
    with pytest.raises(ValueError):
        WeightFunction(m=1, beta=(0.5, 0.7))
    with pytest.raises(ValueError):
        WeightFunction(beta=(-1.0,))
    with pytest.raises(ValueError):
        WeightFunction(m=2, beta=(0.5, 0.7), R_star=100.0)  # below min_r_star(2)


def test_depth_two_blend_joins_smoothly():
    w = WeightFunction(m=2, beta=(0.5, 0.7))
    R = w.R_star
    eps = 1e-9 * R
    lo = w.derivs(np.array([R - eps]), 2)
    hi = w.derivs(np.array([R + eps]), 2)
    for k in range(3):
        assert lo[k, 0] == pytest.approx(hi[k, 0], rel=1e-6), f"jet order {k}"
    # inner extension stays positive and nondecreasing down to the origin
    rs = np.linspace(0.0, R, 500)
    vals = w(rs)
    assert np.all(vals > 0)
    assert np.all(np.diff(vals) >= -1e-12 * vals.max())


def test_const_weight_is_flat():
    w = WeightFunction(kind="const", const_value=2.5)
    r = np.array([0.0, 7.0, 1e9])
    assert np.array_equal(w(r), np.full(3, 2.5))
    assert np.array_equal(w.derivs(r, 3)[1:], np.zeros((3, 3)))
    assert np.allclose(w.inv_derivs(r, 1)[0], 0.4)
    with pytest.raises(ValueError):
        WeightFunction(kind="const", const_value=0.0)
    with pytest.raises(ValueError):
        WeightFunction(kind="linear")


def test_radius_must_be_nonnegative():
    with pytest.raises(ValueError):
        WeightFunction()(np.array([-1.0]))


def test_default_weight_is_admissible():
    rep = check_admissibility(WeightFunction())
    assert isinstance(rep, AdmissibilityReport)
    assert rep.tail_converges
    assert rep.power_ok
    assert rep.symbol_ok
    assert rep.slow_variation_ok
    assert rep.ok
    assert rep.failures() == []


def test_const_weight_fails_admissibility():
    # flat weights keep the critical tail integral divergent
    rep = check_admissibility(WeightFunction(kind="const"))
    assert not rep.tail_converges
    assert not rep.ok
    assert any("tail integral" in msg for msg in rep.failures())
