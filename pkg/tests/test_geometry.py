import math

import numpy as np
import pytest

from lanemden.errors import InvalidResolution, SolverDiverged, UnsupportedDomain
from lanemden.geometry import (
    DomainSpec,
    Grid2D,
    RadialGrid,
    ScalarField,
    ball_volume,
    build_grid,
    discrete_laplacian,
    poisson_solve,
    read_field_csv,
    torsion,
    write_field_csv,
)


def test_square_grid_shape(square64):
    assert isinstance(square64, Grid2D)
    assert square64.n == 63 * 63
    assert square64.h == pytest.approx(1 / 64)


def test_ball_grid_shape():
    g = build_grid(DomainSpec.ball(3), 1000)
    assert isinstance(g, RadialGrid)
    assert g.nr == 1000 and g.h == pytest.approx(1e-3)
    assert g.r[0] == pytest.approx(g.h)


def test_polygon_unit_square_matches_rectangle(square64):
    poly = build_grid(DomainSpec.polygon([(0, 0), (1, 0), (1, 1), (0, 1)]), 64)
    assert np.array_equal(poly.interior_mask, square64.interior_mask)


def test_build_grid_errors():
    with pytest.raises(UnsupportedDomain):
        build_grid(DomainSpec.spinning_top(), 64)
    with pytest.raises(InvalidResolution):
        build_grid(DomainSpec.disc(), 7)
    with pytest.raises(UnsupportedDomain):
        DomainSpec("torus")


def test_domain_dict_round_trip():
    for spec in (DomainSpec.ball(4), DomainSpec.rectangle(2, 0.5), DomainSpec.disc(0.7),
                 DomainSpec.polygon([(0, 0), (1, 0), (0, 1)]), DomainSpec.spinning_top()):
        assert DomainSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(UnsupportedDomain):
        DomainSpec.from_dict({"kind": "disc", "radius": 1, "colour": "red"})


@pytest.mark.parametrize("nr", [1000, 37])
def test_radial_weights_reproduce_volume(nr):
    g = RadialGrid(3, nr)
    total = g.weights.sum() + g.boundary_weight
    assert total == pytest.approx(ball_volume(3), rel=1e-12)
    # interior weights alone are within the documented 0.5% at nr = 1000
    if nr == 1000:
        assert g.weights.sum() == pytest.approx(ball_volume(3), rel=5e-3)


def test_zero_field_laplacian(square64, ball3):
    for g in (square64, ball3):
        assert not np.any(discrete_laplacian(g)(np.zeros(g.n)))


def test_square_eigenfunction_laplacian(square64):
    x, y = square64.points.T
    u = np.sin(math.pi * x) * np.sin(math.pi * y)
    lap = discrete_laplacian(square64)(u)
    rel = np.abs(lap + 2 * math.pi**2 * u).max() / (2 * math.pi**2 * np.abs(u).max())
    # second order: the stencil symbol gives 2 pi^2 h^2/12 relative error
    assert rel < 2 * math.pi**2 / 64**2


@pytest.mark.parametrize("N", [2, 3, 5])
def test_radial_laplacian_exact_on_quadratic(N):
    g = RadialGrid(N, 50)
    lap = g.apply_laplacian(1 - g.r**2)
    # the last node sees the pinned boundary value 0, which equals 1 - 1^2
    assert np.allclose(lap, -2 * N, rtol=0, atol=1e-9)


def test_matrix_matches_stencil(kite, ball3):
    rng = np.random.default_rng(1)
    for g in (kite, ball3):
        u = rng.standard_normal(g.n)
        L = discrete_laplacian(g)
        assert np.allclose(L.matrix @ u, L(u), rtol=1e-12, atol=1e-9)


def test_torsion_disc_and_ball():
    disc = torsion(build_grid(DomainSpec.disc(), 64))
    assert disc.max() == pytest.approx(0.25, rel=0.02)
    ball = torsion(build_grid(DomainSpec.ball(3), 1000))
    assert ball.max() == pytest.approx(1 / 6, rel=1e-5)


def test_poisson_zero_rhs(kite):
    assert not np.any(poisson_solve(kite, 0.0).values)


def test_cg_matches_direct(kite):
    f = np.random.default_rng(2).random(kite.n)
    a = poisson_solve(kite, f, backend="direct").values
    b = poisson_solve(kite, f, tol=1e-12, backend="cg").values
    assert np.allclose(a, b, rtol=1e-9, atol=1e-12)
    resid = np.linalg.norm(kite.apply_laplacian(b) + f) / np.linalg.norm(f)
    assert resid <= 1e-10


def test_cg_reports_divergence(square64):
    with pytest.raises(SolverDiverged) as info:
        square64.solve_cg(np.ones(square64.n), tol=1e-14, maxiter=3)
    assert info.value.iterations == 3 and info.value.residual > 1e-14


def test_maximum_principle(kite):
    f = np.zeros(kite.n)
    f[kite.n // 2] = 1.0
    assert np.all(poisson_solve(kite, f).values > 0)


def _torsion_square_max(terms=200):
    # unit-square torsion at the centre, double sine series
    s = 0.0
    for m in range(1, terms, 2):
        for n in range(1, terms, 2):
            s += 16 / (math.pi**4 * m * n * (m * m + n * n)) * math.sin(m * math.pi / 2) * math.sin(n * math.pi / 2)
    return s


def test_square_torsion_series_oracle():
    ref = _torsion_square_max()
    assert ref == pytest.approx(0.07367, abs=1e-5)
    assert torsion(build_grid(DomainSpec.rectangle(1, 1), 64)).max() == pytest.approx(ref, rel=1e-3)


@pytest.mark.parametrize("spec", [DomainSpec.rectangle(1, 1), DomainSpec.ball(3)])
def test_torsion_refinement_order(spec):
    exact = _torsion_square_max() if spec.kind == "rectangle" else 1 / 6
    res = [16, 32, 64] if spec.kind == "rectangle" else [100, 200, 400]
    errs = [abs(torsion(build_grid(spec, r)).max() - exact) for r in res]
    order = np.polyfit(np.log([1 / r for r in res]), np.log(errs), 1)[0]
    assert order >= 1.8


def test_field_norms(ball3):
    u = ScalarField(ball3, np.ones(ball3.n))
    assert u.norm(1) == pytest.approx(ball3.weights.sum())
    assert u.norm(math.inf) == 1.0
    assert ScalarField(ball3, np.zeros(ball3.n)).norm(2) == 0.0
    assert (u * 3).norm(2) == pytest.approx(3 * u.norm(2))
    with pytest.raises(ValueError):
        ScalarField(ball3, np.ones(3))


def test_tv_is_l1_of_laplacian(kite):
    u = torsion(kite)
    assert u.tv() == pytest.approx(float(kite.weights @ np.abs(kite.apply_laplacian(u.values))))


@pytest.mark.parametrize("which", ["kite", "ball3"])
def test_csv_round_trip(which, request, tmp_path):
    g = request.getfixturevalue(which)
    fld = ScalarField(g, np.random.default_rng(3).standard_normal(g.n))
    path = tmp_path / "f.csv"
    write_field_csv(fld, path)
    header = path.read_text().splitlines()[0]
    assert header == ("i,r,value" if which == "ball3" else "i,j,x,y,value")
    back = read_field_csv(path, g)
    assert np.array_equal(back.values, fld.values)
