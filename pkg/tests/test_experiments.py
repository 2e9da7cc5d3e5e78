import math
import warnings

import pytest
from scipy import integrate

from lanemden.errors import ArgumentOutOfRange, NoBracket, VolumeMismatch
from lanemden.experiments import (
    disc_green_lq_norm,
    disc_lambda_analytic,
    faber_krahn_compare,
    spinning_top_h,
    spinning_top_hprime,
    spinning_top_root,
)
from lanemden.geometry import DomainSpec


def test_q1_closed_form_matches_quadrature():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert spinning_top_h(1.0, 1) == pytest.approx(spinning_top_h(1.0, 1, method="quad"), rel=1e-9)


def test_generic_path_matches_direct_quadrature():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for t, q in [(1.0, 1.2), (0.3, 0.7), (1.6, 1.4)]:
            assert spinning_top_h(t, q) == pytest.approx(spinning_top_h(t, q, method="quad"), rel=1e-8)


def test_generic_renormalized_matches_q2_closed_form():
    # h_q is smooth in q; compare the generic path at q = 2 +- d with the closed form
    d = 1e-6
    for t in (0.4, 1.0, 1.7):
        mid = 0.5 * (spinning_top_h(t, 2 - d) + spinning_top_h(t, 2 + d))
        assert mid == pytest.approx(spinning_top_h(t, 2), rel=1e-8)


@pytest.mark.parametrize("t", [0.05, 0.5, 1.0, 1.5, 1.95])
def test_positive_below_divergence(t):
    for q in (0.5, 1.0, 1.3):
        assert spinning_top_h(t, q) > 0


def test_q0_is_volume():
    for t in (0.2, 1.0, 1.8):
        assert spinning_top_h(t, 0) == pytest.approx(4 * math.pi / 3)


def test_argument_errors():
    with pytest.raises(ArgumentOutOfRange):
        spinning_top_h(0.0, 1)
    with pytest.raises(ArgumentOutOfRange):
        spinning_top_hprime(2.0, 1)
    with pytest.raises(NoBracket):
        spinning_top_root(1, bracket=(1.5, 1.9))


def test_roots_and_drift():
    r1, r2 = spinning_top_root(1), spinning_top_root(2)
    assert 1.27 <= r1.y_M <= 1.29
    assert 1.26 <= r2.y_M <= 1.28
    assert r2.y_M < r1.y_M
    for r in (r1, r2):
        assert abs(r.hprime_at_root) <= 1e-10 * abs(spinning_top_hprime(r.bracket[0], r.q))
        lo, hi = r.bracket
        assert spinning_top_hprime(lo, r.q) * spinning_top_hprime(hi, r.q) < 0


@pytest.mark.parametrize("q", [1, 2])
def test_derivative_consistency(q):
    y = spinning_top_root(q).y_M
    e = 1e-4
    fd = (spinning_top_h(y + e, q) - spinning_top_h(y - e, q)) / (2 * e)
    assert abs(fd - spinning_top_hprime(y, q)) <= 1e-6


@pytest.mark.parametrize("q", [1, 2])
def test_hprime_sign_pattern(q):
    assert spinning_top_hprime(0.02, q) > 0
    assert spinning_top_hprime(1.98, q) < 0


def test_disc_norm_closed_form():
    for q in (1.0, 1.5, 2.0, 3.0):
        exact = ((2 * math.pi) ** (1 - q) * math.gamma(q + 1) / 2 ** (q + 1)) ** (1 / q)
        assert disc_green_lq_norm(q) == pytest.approx(exact, rel=1e-12)
    assert disc_lambda_analytic(1.0) == pytest.approx(4.0, rel=1e-13)


def test_faber_krahn_square(sqrt_pi_square):
    rep = faber_krahn_compare(sqrt_pi_square, 1.0, 48)
    # square torsion max 0.0736713 scaled by the area pi
    assert rep.lambda_domain == pytest.approx(1 / (0.0736713 * math.pi), rel=5e-3)
    assert rep.holds and rep.margin > rep.est_grid_error and not rep.genuine_failure
    assert set(rep.to_json()) == {"domain", "q", "lambda_domain", "lambda_disc", "holds", "est_grid_error"}


def test_faber_krahn_disc_self_comparison():
    rep = faber_krahn_compare(DomainSpec.disc(1.0), 1.0, 128)
    assert abs(rep.lambda_domain - rep.lambda_disc) / rep.lambda_disc <= 0.02


def test_faber_krahn_elongation_gap_grows():
    s = math.sqrt(math.pi)
    gaps = [faber_krahn_compare(DomainSpec.rectangle(2 * s * k, s / (2 * k)), 1.0, 32).margin for k in (1, 2)]
    assert 0 < gaps[0] < gaps[1]


def test_faber_krahn_rejects_wrong_area():
    with pytest.raises(VolumeMismatch):
        faber_krahn_compare(DomainSpec.rectangle(1, 1), 1.0, 32)


def test_faber_krahn_ball_trivial():
    rep = faber_krahn_compare(DomainSpec.ball(3), 2.0, 100)
    assert rep.holds and rep.lambda_domain == rep.lambda_disc
