import math

import mpmath as mp
import numpy as np
import pytest

from lanemden import closedform as cf
from lanemden.errors import DimensionOutOfRange, ExponentOutOfRange, InvalidRadius

mp.mp.dps = 40


def mp_green_norm(N, q):
    """|c_N (r^{2-N} - 1)|_q on B_1 by direct high-precision quadrature."""
    area = 2 * mp.pi ** (mp.mpf(N) / 2) / mp.gamma(mp.mpf(N) / 2)
    cN = 1 / ((N - 2) * area)
    val = area * mp.quad(lambda r: r ** (N - 1) * (cN * (r ** (2 - N) - 1)) ** q, [0, mp.mpf(1) / 100, 1])
    return val ** (1 / mp.mpf(q))


@pytest.mark.parametrize("N,q", [(3, 1.0), (3, 2.0), (3, 2.7), (4, 1.5), (5, 1.2), (6, 1.1)])
def test_green_norm_matches_quadrature(N, q):
    assert cf.green_ball_lq_norm(N, q) == pytest.approx(float(mp_green_norm(N, q)), rel=1e-12)


@pytest.mark.parametrize("N", [3, 4, 5, 7])
def test_lambda_at_q1_is_2N(N):
    assert cf.lambda_1q_ball(N, 1.0) == pytest.approx(2 * N, abs=1e-12)


def test_lambda_q2_ball3():
    assert cf.lambda_1q_ball(3, 2.0) == pytest.approx(math.sqrt(12 * math.pi), rel=1e-14)


def test_kappa_two_routes_agree():
    for N, a in [(3, 1.0), (3, 0.4), (4, 0.7), (5, 0.3)]:
        assert cf.kappa(N, a) == pytest.approx(cf.kappa_direct(N, a), rel=1e-12)
    assert cf.kappa(3, 1.0) == pytest.approx(12 * math.pi, rel=1e-14)


def test_a_coeff_matches_mpmath():
    for N, a in [(3, 1.0), (3, 1.5), (4, 0.5), (5, 0.2)]:
        t = mp.mpf(2) / (N - 2)
        ref = (2 * N * mp.gamma(t) / (mp.gamma(a + 2) * mp.gamma(t - a))) ** (1 / mp.mpf(a))
        assert cf.a_coeff(N, a) == pytest.approx(float(ref), rel=1e-13)
    assert cf.a_coeff(3, 1.0) == pytest.approx(3.0, rel=1e-14)


def test_u_infty_profile_solves_limit_equation():
    # U_inf = A (r^{2-N}-1) has -Delta U_inf = 0 away from 0 and |Delta U_inf|_T = kappa
    N, a = 3, 1.0
    A = cf.a_coeff(N, a)
    assert A * (N - 2) * 4 * math.pi == pytest.approx(cf.kappa(N, a), rel=1e-12)
    r = np.array([0.25, 0.5, 1.0])
    assert np.allclose(cf.u_infty_profile(N, a, r), 3 * (1 / r - 1))
    with pytest.raises(InvalidRadius):
        cf.u_infty_profile(N, a, 0.0)


def test_v_infty_profile_closed_form_n3_alpha1():
    # -Delta V = 3(1/r - 1), V(1) = 0: V = 1 - 3r/2 + r^2/2
    r = np.linspace(0, 1, 11)
    assert np.allclose(cf.v_infty_profile(3, 1.0, r), 1 - 1.5 * r + 0.5 * r**2, atol=1e-10)
    assert cf.v_infty_profile(3, 1.0, 0.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(InvalidRadius):
        cf.v_infty_profile(3, 1.0, 1.5)


def test_v_infty_profile_general_against_mpmath():
    N, a = 4, 0.6
    A = cf.a_coeff(N, a)
    src = lambda t: t ** (N - 1) * (A * (t ** (2 - N) - 1)) ** a
    r = mp.mpf("0.3")
    ref = ((r ** (2 - N) - 1) * mp.quad(src, [0, r]) + mp.quad(lambda t: src(t) * (t ** (2 - N) - 1), [r, 1])) / (N - 2)
    assert cf.v_infty_profile(N, a, 0.3) == pytest.approx(float(ref), rel=1e-9)


def test_least_energy_level():
    assert cf.least_energy_level(2.0, 3.0) == pytest.approx(4.5)
    with pytest.raises(ExponentOutOfRange):
        cf.least_energy_level(1.0, 3.0)


def test_parameter_guards():
    with pytest.raises(DimensionOutOfRange):
        cf.lambda_1q_ball(2, 1.0)
    with pytest.raises(ExponentOutOfRange):
        cf.lambda_1q_ball(3, 3.0)
    with pytest.raises(ExponentOutOfRange):
        cf.lambda_1q_ball(3, 3.0 - 1e-8)  # Gamma pole guard
    with pytest.raises(ExponentOutOfRange):
        cf.a_coeff(3, 2.0)


def test_ball_summary_keys():
    s = cf.ball_summary(3, q=2.0)
    assert s["alpha"] == 1.0 and s["kappa"] == pytest.approx(12 * math.pi)
    assert s["lambda_1q"] * s["green_norm"] == pytest.approx(1.0, abs=1e-14)
    assert cf.ball_summary(3, q=1.0)["level"] is None


def test_c_N_values():
    assert cf.c_N(3) == pytest.approx(1 / (4 * math.pi), rel=1e-15)
    assert cf.c_N(4) == pytest.approx(1 / (4 * math.pi**2), rel=1e-15)
    with pytest.raises(DimensionOutOfRange):
        cf.c_N(2)


def test_green_norm_examples():
    assert cf.green_ball_lq_norm(3, 1.0) == pytest.approx(1 / 6, rel=1e-14)
    assert cf.green_ball_lq_norm(3, 2.0) == pytest.approx(1 / math.sqrt(12 * math.pi), rel=1e-14)
    assert cf.lambda_1q_ball(4, 1 + 1e-7) == pytest.approx(8.0, abs=1e-6)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_pole_behaviour(N):
    # the Green norm blows up at the critical exponent, so its reciprocal falls to 0
    crit = N / (N - 2)
    norms = [cf.green_ball_lq_norm(N, crit - 10.0**-k) for k in range(1, 5)]
    lams = [cf.lambda_1q_ball(N, crit - 10.0**-k) for k in range(1, 5)]
    assert all(b > a for a, b in zip(norms, norms[1:]))
    assert all(b < a for a, b in zip(lams, lams[1:]))
    assert lams[-1] < 0.3


def test_consistency_square():
    for N, a in [(3, 1.0), (4, 0.5), (5, 0.4)]:
        assert cf.kappa(N, a) == pytest.approx(cf.a_coeff(N, a) / cf.c_N(N), rel=1e-10)


def test_profile_examples():
    assert cf.u_infty_profile(3, 1.0, 0.5) == pytest.approx(3.0)
    assert cf.u_infty_profile(4, 0.5, 1.0) == 0.0
    assert cf.v_infty_profile(3, 1.0, 0.5) == pytest.approx(3 / 8, rel=1e-10)
    assert cf.v_infty_profile(4, 0.5, 1.0) == pytest.approx(0.0, abs=1e-14)
    assert cf.least_energy_level(2.0, 6.0) == pytest.approx(18.0)
    assert cf.least_energy_level(2.0, math.sqrt(12 * math.pi)) == pytest.approx(6 * math.pi)
    assert cf.least_energy_level(3.0, 0.0) == 0.0
