import math
from dataclasses import replace

import numpy as np
import pytest

from lanemden import closedform
from lanemden.asymptotics import (
    BetaSweepRecord,
    beta_sweep,
    check_limit_ball,
    check_pair,
    energy_check,
    read_beta_csv,
    scaling_exponent,
    solve_system,
    write_beta_csv,
)
from lanemden.eigen import _signed_power, rayleigh_quotient
from lanemden.errors import AlphaBetaProductOne, DomainMismatch, SupercriticalPair
from lanemden.geometry import lq_norm


@pytest.fixture(scope="module")
def sol13(ball3_fine):
    return solve_system(ball3_fine, 1.0, 3.0)


def test_pair_guards():
    with pytest.raises(AlphaBetaProductOne):
        check_pair(3, 1.0, 1.0)
    with pytest.raises(SupercriticalPair):
        check_pair(3, 5.0, 5.0)
    check_pair(3, 1.0, 3.0)


def test_positive_radial_pair(sol13):
    assert sol13.converged
    for w in (sol13.U.values, sol13.V.values):
        assert np.all(w > 0)
        assert np.all(np.diff(w) <= 1e-12 * w.max())
    assert sol13.residual <= 1e-6 * sol13.U.max()


def test_energy_two_ways(ball3_fine, sol13):
    assert sol13.energy_J == pytest.approx(energy_check(ball3_fine, sol13), rel=1e-10)
    # at a solution J = (1/(alpha+1) - 1/(beta+1)) |U|_{alpha+1}^{alpha+1}
    mass = lq_norm(ball3_fine, sol13.U.values, 2.0) ** 2
    assert sol13.energy_J == pytest.approx((0.5 - 0.25) * mass, rel=1e-6)


def test_scaling_bridge(ball3_fine, sol13):
    U = sol13.U.values
    norm = lq_norm(ball3_fine, U, 2.0)
    assert rayleigh_quotient(ball3_fine, U / norm, 4 / 3, 2.0) == pytest.approx(sol13.lambda_used, rel=1e-11)
    assert norm == pytest.approx(sol13.lambda_used ** scaling_exponent(1.0, 3.0), rel=1e-8)


def test_v_recovery_consistency(ball3_fine, sol13):
    V = ball3_fine.solve(_signed_power(sol13.U.values, 1.0))
    assert np.allclose(V, sol13.V.values, rtol=0, atol=1e-12 * V.max())
    assert sol13.v_pointwise_gap < 1e-4


@pytest.fixture(scope="module")
def sweep(ball3_fine):
    return beta_sweep(ball3_fine, 1.0, [4, 8, 16, 32, 64])


def test_sweep_trend(sweep):
    recs, sols = sweep
    kap = 12 * math.pi
    tv = [r.tv_U for r in recs]
    assert all(abs(b - kap) < abs(a - kap) for a, b in zip(tv, tv[1:]))
    assert max(tv) < 20 * kap
    assert all(s.converged for s in sols)


def test_truncated_sweep_fails_monotonicity(sweep):
    rep = check_limit_ball(sweep[0][:1], 3, 1.0)
    assert not rep.criteria[1].passed and "needs >= 3 points" in rep.criteria[1].detail


def test_zeroed_tv_fails_a(sweep):
    recs = [replace(r, tv_U=0.0) for r in sweep[0]]
    rep = check_limit_ball(recs, 3, 1.0)
    assert not rep.criteria[0].passed and not rep.passed
    assert "overall: FAIL" in rep.to_text()


def test_report_json_shape(sweep):
    d = check_limit_ball(sweep[0], 3, 1.0, {"v_max_band": (0.8, 1.02)}).to_json()
    assert set(d) == {"passed", "criteria", "numbers"} and len(d["criteria"]) == 4
    assert d["numbers"]["kappa"] == pytest.approx(closedform.kappa(3, 1.0))


def test_domain_mismatch(sweep):
    with pytest.raises(DomainMismatch):
        check_limit_ball([replace(sweep[0][0], domain="other")], 3, 1.0)
    with pytest.raises(DomainMismatch):
        check_limit_ball(sweep[0], 4, 1.0)


def test_general_domain_sweep_runs(kite):
    recs, sols = beta_sweep(kite, 1.0, [2, 4], r_min=0.1)
    assert all(r.domain == "other" for r in recs)
    assert all(np.all(s.U.values > 0) for s in sols)


def test_csv_round_trip(sweep, tmp_path):
    write_beta_csv(sweep[0], tmp_path / "b.csv")
    assert (tmp_path / "b.csv").read_text().splitlines()[0] == "beta,tv_U,sup_err_U,sup_err_V,v_max,lambda_used,iters"
    back = read_beta_csv(tmp_path / "b.csv")
    assert [r.row() for r in back] == [r.row() for r in sweep[0]]
    assert isinstance(back[0], BetaSweepRecord)


def test_sweep_argument_checks(ball3):
    with pytest.raises(ValueError):
        beta_sweep(ball3, 1.0, [8, 4])
    with pytest.raises(AlphaBetaProductOne):
        beta_sweep(ball3, 0.5, [2, 4])
