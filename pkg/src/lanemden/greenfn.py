"""Discrete Dirichlet Green functions and the p = 1 eigenvalue.

For a grid with stiffness matrix ``A = -Delta_h`` and quadrature weights
``w``, the Green column with source ``y`` solves ``A G = e_y / w_y``, so the
discrete Laplacian of every column has unit total mass. The landscape is
``h(x) = |G(., x)|_q^q``; its maximizer ``x_M`` gives

    Lambda_{1,q} = 1 / |G(., x_M)|_q,  minimizer  G(., x_M) / |G(., x_M)|_q.

On a :class:`~lanemden.geometry.RadialGrid` a "source" at node ``y`` is the
uniform layer on the sphere ``|x| = r_y`` (the only sources a radial grid
can carry); the source at node 1 is the point source at the origin.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ExponentOutOfRange
from .geometry import Grid2D, RadialGrid, ScalarField, lq_norm

TIE_RTOL = 1e-9


def check_exponent(grid, q: float) -> None:
    if not q >= 1:
        raise ExponentOutOfRange(f"q must be >= 1, got {q}")
    if isinstance(grid, RadialGrid) and grid.N >= 3 and q >= grid.N / (grid.N - 2):
        raise ExponentOutOfRange(
            f"q={q} outside the integrability range q < N/(N-2) = {grid.N / (grid.N - 2):.6g}"
        )


@dataclass(frozen=True)
class GreenColumn:
    source: int
    field: ScalarField


@dataclass(frozen=True, eq=False)
class LambdaOneResult:
    q: float
    lam: float
    x_M: int
    landscape: ScalarField
    profile: ScalarField
    tie_detected: bool
    solver_tol: float
    evaluated: np.ndarray = field(repr=False)
    stride: int = 1

    @property
    def grid(self):
        return self.profile.grid

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "lambda": self.lam,
            "x_M": self.grid.node_label(self.x_M),
            "tie_detected": self.tie_detected,
            "solver_tol": self.solver_tol,
        }


def _dirac_block(grid, sources) -> np.ndarray:
    B = np.zeros((grid.n, len(sources)))
    B[sources, np.arange(len(sources))] = 1.0 / grid.weights[sources]
    return B


def green_column(grid, y: int, tol: float = 1e-10) -> GreenColumn:
    """Solve ``-Delta_h G = delta_y`` (discrete Dirac ``1/w_y`` at node ``y``).

    Direct solves are used, so ``tol`` is recorded but not needed.
    """
    if not 0 <= y < grid.n:
        raise IndexError(f"source {y} is not an interior node")
    g = grid.solve(_dirac_block(grid, [y]))[:, 0]
    return GreenColumn(int(y), ScalarField(grid, g))


def green_columns(grid, sources) -> np.ndarray:
    """Green columns for several sources at once, shape ``(n, len(sources))``."""
    sources = np.asarray(sources, dtype=np.int64)
    return np.asarray(grid.solve(_dirac_block(grid, sources)))


def _block_size(grid) -> int:
    return int(max(1, min(512, 4_000_000 // max(grid.n, 1))))


def landscape_values(grid, q: float, sources, jobs: int = 1) -> np.ndarray:
    """``h(y) = |G(., y)|_q^q`` for the given source nodes."""
    sources = np.asarray(sources, dtype=np.int64)
    w = np.ascontiguousarray(grid.weights, dtype=float)
    bs = _block_size(grid)
    blocks = [sources[k : k + bs] for k in range(0, len(sources), bs)]

    def run(block):
        X = np.ascontiguousarray(green_columns(grid, block))
        return kernels.column_power_sums(X, float(q), w)

    if jobs > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    return np.concatenate(parts) if parts else np.zeros(0)


def landscape(grid, q: float, tol: float = 1e-10, jobs: int = 1) -> ScalarField:
    """The full landscape ``h(x) = |G(., x)|_q^q`` (one solve per node)."""
    check_exponent(grid, q)
    return ScalarField(grid, landscape_values(grid, q, np.arange(grid.n), jobs=jobs))


# --------------------------------------------------------------------------
# coarse-to-fine maximization


def _coarse_sources(grid, stride: int) -> np.ndarray:
    if isinstance(grid, RadialGrid):
        return np.arange(0, grid.n, stride)
    i, j = grid.ij
    return np.flatnonzero((i % stride == 0) & (j % stride == 0))


def _window(grid, k: int, radius: int) -> np.ndarray:
    if isinstance(grid, RadialGrid):
        return np.arange(max(0, k - radius), min(grid.n, k + radius + 1))
    i, j = grid.ij
    ci, cj = i[k], j[k]
    return np.flatnonzero((np.abs(i - ci) <= radius) & (np.abs(j - cj) <= radius))


def _fill(grid, h: np.ndarray, evaluated: np.ndarray) -> np.ndarray:
    """Interpolate the landscape at nodes that were never evaluated."""
    if evaluated.all():
        return h
    out = h.copy()
    if isinstance(grid, RadialGrid):
        out[~evaluated] = np.interp(grid.r[~evaluated], grid.r[evaluated], h[evaluated])
        return out
    from scipy.interpolate import griddata

    pts = grid.points
    known = pts[evaluated]
    lin = griddata(known, h[evaluated], pts[~evaluated], method="linear")
    near = griddata(known, h[evaluated], pts[~evaluated], method="nearest")
    out[~evaluated] = np.where(np.isnan(lin), near, lin)
    return out


def maximize_landscape(grid, q: float, stride: int = 1, jobs: int = 1):
    """Return ``(values, evaluated_mask)`` with the landscape maximum located.

    With ``stride > 1`` only every ``stride``-th lattice node is evaluated,
    then the search hill-climbs over full-resolution windows of half-width
    ``stride`` around the incumbent until it stops moving.
    """
    check_exponent(grid, q)
    h = np.full(grid.n, -np.inf)
    evaluated = np.zeros(grid.n, dtype=bool)

    def evaluate(nodes):
        nodes = nodes[~evaluated[nodes]]
        if len(nodes):
            h[nodes] = landscape_values(grid, q, nodes, jobs=jobs)
            evaluated[nodes] = True

    if stride <= 1:
        evaluate(np.arange(grid.n))
        return h, evaluated
    evaluate(_coarse_sources(grid, stride))
    best = int(np.argmax(h))
    while True:
        evaluate(_window(grid, best, stride))
        new = int(np.argmax(h))
        if new == best:
            break
        best = new
    return h, evaluated


def lambda_one(grid, q: float, tol: float = 1e-10, stride: int = 1, jobs: int = 1) -> LambdaOneResult:
    """``Lambda_{1,q}`` of the grid through the Green-function characterization."""
    check_exponent(grid, q)
    h, evaluated = maximize_landscape(grid, q, stride=stride, jobs=jobs)
    hmax = h[evaluated].max()
    near = evaluated & (h >= hmax - TIE_RTOL * abs(hmax))
    x_M = int(np.flatnonzero(near)[0])  # lowest index among ties, independent of roundoff
    ties = int(np.count_nonzero(near))
    col = green_column(grid, x_M, tol).field
    gnorm = col.norm(q)
    return LambdaOneResult(
        q=float(q),
        lam=1.0 / gnorm,
        x_M=x_M,
        landscape=ScalarField(grid, _fill(grid, h, evaluated)),
        profile=col / gnorm,
        tie_detected=ties > 1,
        solver_tol=float(tol),
        evaluated=evaluated,
        stride=int(max(stride, 1)),
    )


def jensen_bound_terms(grid, q: float, mu, max_green_norm: float | None = None):
    """``(|sum_y mu_y G(., y)|_q, mu(Omega) * max_y |G(., y)|_q)``."""
    check_exponent(grid, q)
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (grid.n,) or np.any(mu < 0) or mu.sum() <= 0:
        raise ValueError("mu must be a nonnegative node vector with positive mass")
    if max_green_norm is None:
        h, _ = maximize_landscape(grid, q)
        max_green_norm = float(h.max()) ** (1.0 / q)
    g_mu = grid.solve(mu / grid.weights)
    return lq_norm(grid, g_mu, q), float(mu.sum()) * max_green_norm


def jensen_lower_bound_check(grid, q: float, mu, max_green_norm: float | None = None) -> bool:
    """Check ``|int G(., y) dmu(y)|_q <= mu(Omega) max_y |G(., y)|_q``."""
    lhs, rhs = jensen_bound_terms(grid, q, mu, max_green_norm)
    return lhs <= rhs * (1.0 + 1e-9)


def disc_lambda_one_exact(q: float, radius: float = 1.0) -> float:
    """``Lambda_{1,q}`` of the disc from the log kernel, by closed form.

    ``|G(., 0)|_q^q = (2 pi)^{1-q} R^{2} Gamma(q+1) / 2^{q+1}`` for the unit
    disc; radius ``R`` rescales lengths.
    """
    # -Delta G = delta in 2-D: G_R(x) = G_1(x/R), so |G_R|_q^q = R^2 |G_1|_q^q
    val = (2 * math.pi) ** (1 - q) * math.gamma(q + 1) / 2 ** (q + 1) * radius**2
    return val ** (-1.0 / q)
