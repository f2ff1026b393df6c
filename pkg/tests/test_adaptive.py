"""Adaptive choice of the hypothesized SNR.

Independent oracle: the uniform-prior objective at t = 0.671 evaluated
with mpmath adaptive quadrature at 30 digits is 0.77160322048385062. The
built-in Simpson rule carries a quadrature bias near 1.4e-6 from the
sqrt(lambda) cusp at the origin, so agreement is asserted at 5e-6.
"""

import math

import pytest

from swd.adaptive import AdaptiveResult, SnrPrior, average_error, mean_under_lambda, optimize_t
from swd.lsstest import TestParams as Params
from swd.lsstest import limiting_moments, theoretical_error

MT_HALF_QUARTER = 0.7828382585181033  # mean_under_lambda(0.5, 0.25, GOE)
AVG_ERR_0671_MPMATH = 0.77160322048385062
UNIFORM_T_STAR = 0.6709505197527198
UNIFORM_ERR = 0.7716046525458586
POINT_ERR_HALF = 0.768488555055044


def test_mean_under_lambda_frozen():
    assert math.isclose(mean_under_lambda(0.5, 0.25, 2.0, 3.0), MT_HALF_QUARTER, rel_tol=1e-14)


def test_mean_under_lambda_reductions():
    for t in (0.1, 0.4, 0.7, 0.9):
        for w2, w4 in ((2.0, 3.0), (1.0, 5.0)):
            lm = limiting_moments(Params(t, w2, w4))
            assert math.isclose(mean_under_lambda(t, 0.0, w2, w4), lm.m0, rel_tol=1e-13)
            assert math.isclose(mean_under_lambda(t, t, w2, w4), lm.m_plus, rel_tol=1e-13)


def test_mean_under_lambda_increasing_in_lambda():
    vals = [mean_under_lambda(0.5, lam, 2.0, 3.0) for lam in (0.0, 0.2, 0.5, 0.9)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_mean_under_lambda_validation():
    with pytest.raises(ValueError):
        mean_under_lambda(0.0, 0.5, 2.0, 3.0)
    with pytest.raises(ValueError):
        mean_under_lambda(1.0, 0.5, 2.0, 3.0)
    with pytest.raises(ValueError):
        mean_under_lambda(0.5, -0.1, 2.0, 3.0)
    with pytest.raises(ValueError):
        mean_under_lambda(0.5, 1.1, 2.0, 3.0)
    with pytest.raises(ValueError):
        mean_under_lambda(0.5, 0.5, 2.0, 1.0)


def test_point_prior_matched_error():
    # testing at the true SNR gives exactly the plain theoretical error
    got = average_error(0.5, SnrPrior.point(0.5), 2.0, 3.0)
    assert math.isclose(got, theoretical_error(Params(0.5, 2.0, 3.0)), rel_tol=1e-14)
    assert math.isclose(got, POINT_ERR_HALF, rel_tol=1e-13)


def test_average_error_uniform_vs_mpmath():
    got = average_error(0.671, SnrPrior.uniform01(), 2.0, 3.0)
    assert abs(got - AVG_ERR_0671_MPMATH) <= 5e-6


def test_point_prior_validation():
    with pytest.raises(ValueError):
        SnrPrior.point(1.5)
    with pytest.raises(ValueError):
        average_error(0.5, SnrPrior("trapezoid"), 2.0, 3.0)


def test_optimize_uniform_prior_frozen():
    r = optimize_t(SnrPrior.uniform01(), 2.0, 3.0)
    assert math.isclose(r.t_star, UNIFORM_T_STAR, rel_tol=1e-12)
    assert math.isclose(r.error, UNIFORM_ERR, rel_tol=1e-12)
    assert not r.flagged
    assert r.evaluations > 20
    assert r.error == min(v for _, v in r.trace)


def test_optimize_point_prior_recovers_lambda():
    r = optimize_t(SnrPrior.point(0.5), 2.0, 3.0)
    assert abs(r.t_star - 0.5) <= 1e-5
    assert math.isclose(r.error, POINT_ERR_HALF, rel_tol=1e-9)
    assert not r.flagged


def test_optimize_result_is_argmin_of_trace():
    r = optimize_t(SnrPrior.point(0.3), 2.0, 3.0, tol=1e-4)
    best = min(r.trace, key=lambda p: p[1])
    assert r.t_star == best[0]
    assert r.error == best[1]


def test_optimize_tol_clamped():
    # a tol below 1e-6 must not loop forever
    r = optimize_t(SnrPrior.point(0.5), 2.0, 3.0, tol=0.0)
    assert isinstance(r, AdaptiveResult)
    assert r.evaluations < 100


def test_heavy_tail_parameters_shift_optimum():
    r_goe = optimize_t(SnrPrior.uniform01(), 2.0, 3.0)
    r_heavy = optimize_t(SnrPrior.uniform01(), 1.0, 5.0)
    assert r_heavy.error < r_goe.error  # smaller w2 and larger w4 help
    assert 0.0 < r_heavy.t_star < 1.0
