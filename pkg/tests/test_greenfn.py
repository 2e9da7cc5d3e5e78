import json
import math

import numpy as np
import pytest

from lanemden.errors import ExponentOutOfRange
from lanemden.geometry import DomainSpec, build_grid, lq_norm, torsion
from lanemden.greenfn import (
    disc_lambda_one_exact,
    green_column,
    green_columns,
    jensen_bound_terms,
    jensen_lower_bound_check,
    lambda_one,
    landscape,
)


def test_unit_mass_and_positivity(kite):
    for y in (0, kite.n // 3, kite.n - 1):
        G = green_column(kite, y).field
        assert np.all(G.values > 0)
        assert float(kite.weights @ -kite.apply_laplacian(G.values)) == pytest.approx(1.0, abs=1e-10)


def test_disc_centre_column_is_log_kernel():
    g = build_grid(DomainSpec.disc(), 128)
    c = g.nearest_node(0.0, 0.0)
    G = green_column(g, c).field.values
    r = np.hypot(*g.points.T)
    band = (r > 0.3) & (r < 0.7)
    exact = -np.log(r[band]) / (2 * math.pi)
    assert np.abs(G[band] - exact).max() < 0.01 * exact.max()


def test_radial_origin_column_is_ball_kernel():
    g = build_grid(DomainSpec.ball(3), 2000)
    G = green_column(g, 0).field.values
    band = (g.r > 0.1) & (g.r < 0.9)
    exact = (1 / g.r[band] - 1) / (4 * math.pi)
    assert np.allclose(G[band], exact, rtol=1e-3)


def test_reciprocity(kite, ball3):
    for g in (kite, ball3):
        src = [1, g.n // 2, g.n - 2]
        G = green_columns(g, src)
        for a in range(3):
            for b in range(3):
                assert G[src[a], b] == pytest.approx(G[src[b], a], rel=1e-8)


def test_q1_landscape_is_torsion(kite, ball3):
    for g in (kite, ball3):
        assert np.allclose(landscape(g, 1.0).values, torsion(g).values, rtol=1e-10)


def test_disc_argmax_at_centre(disc32):
    for q in (1.0, 2.0, 3.5):
        res = lambda_one(disc32, q, stride=4)
        assert res.x_M == disc32.nearest_node(0.0, 0.0)


def test_lambda_one_invariants(kite):
    res = lambda_one(kite, 2.0)
    G = green_column(kite, res.x_M).field
    assert res.lam * G.norm(2.0) == pytest.approx(1.0, abs=1e-10)
    assert res.profile.norm(2.0) == pytest.approx(1.0, abs=1e-10)
    assert res.landscape.values[res.x_M] == res.landscape.values.max()
    assert res.evaluated.all()


def test_green_torsion_identity(square64):
    lam = lambda_one(square64, 1.0).lam
    assert lam * torsion(square64).max() == pytest.approx(1.0, abs=1e-8)


def test_stride_search_finds_full_maximum(kite):
    full = lambda_one(kite, 1.7)
    sub = lambda_one(kite, 1.7, stride=3)
    assert sub.x_M == full.x_M and sub.lam == pytest.approx(full.lam, rel=1e-12)
    assert not sub.evaluated.all()
    assert np.all(np.isfinite(sub.landscape.values))


def test_tie_detection():
    sym = lambda_one(build_grid(DomainSpec.rectangle(1, 1), 16), 1.0)
    assert not sym.tie_detected  # odd interior count: unique centre node
    even = lambda_one(build_grid(DomainSpec.rectangle(1, 1), 17), 1.0)
    assert even.tie_detected
    assert even.x_M == min(k for k in range(even.grid.n) if even.landscape.values[k] >= even.landscape.values.max() * (1 - 1e-9))


def test_integrability_guard(ball3):
    with pytest.raises(ExponentOutOfRange):
        landscape(ball3, 3.0)
    with pytest.raises(ExponentOutOfRange):
        lambda_one(ball3, 0.5)


@pytest.mark.parametrize("q,target", [(1.0, 6.0), (2.0, math.sqrt(12 * math.pi))])
def test_ball_lambda_converges(q, target, ball3_fine):
    assert lambda_one(ball3_fine, q).lam == pytest.approx(target, rel=1e-3)


def test_disc_exact_values():
    assert disc_lambda_one_exact(1.0) == pytest.approx(4.0)
    assert disc_lambda_one_exact(2.0) == pytest.approx(math.sqrt(8 * math.pi))


def test_jensen_cases(kite):
    one = lambda_one(kite, 2.0)
    gmax = 1.0 / one.lam
    dirac = np.zeros(kite.n)
    dirac[one.x_M] = 2.5
    lhs, rhs = jensen_bound_terms(kite, 2.0, dirac, gmax)
    assert lhs == pytest.approx(rhs, rel=1e-9)
    lhs, rhs = jensen_bound_terms(kite, 2.0, np.ones(kite.n), gmax)
    assert lhs < rhs * (1 - 1e-6)
    two = np.zeros(kite.n)
    two[[3, kite.n - 4]] = [1.0, 0.5]
    assert jensen_lower_bound_check(kite, 2.0, two, gmax)
    with pytest.raises(ValueError):
        jensen_lower_bound_check(kite, 2.0, -np.ones(kite.n))


def test_json_shape(kite, ball3):
    d = lambda_one(kite, 1.5).to_json()
    assert set(d) == {"q", "lambda", "x_M", "tie_detected", "solver_tol"}
    assert set(d["x_M"]) == {"i", "j"}
    json.dumps(d)
    assert set(lambda_one(ball3, 1.0).to_json()["x_M"]) == {"i"}
