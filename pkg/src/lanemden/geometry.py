"""Domains, finite-difference grids, scalar fields and the Poisson solver.

Two discretizations are provided:

* :class:`Grid2D` -- a uniform node lattice with a boolean interior mask and
  the five-point Laplacian. Out-of-mask neighbours contribute zero, which is
  a homogeneous Dirichlet condition on a staircase boundary.
* :class:`RadialGrid` -- radial functions on the unit ball of
  :math:`\\mathbb{R}^N`, nodes at ``r_i = i h`` (``i = 1..nr``, ``r_nr = 1``
  pinned to zero), discretized with a conservative (finite-volume) radial
  Laplacian. The control volume of node 1 extends to the origin, so the
  origin flux vanishes: this is the even-symmetry closure ``u_0 = u_1``.

Both discrete Laplacians are symmetric with respect to the grid quadrature
weights, so ``sum(w * u * lap(v)) == sum(w * lap(u) * v)``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import kernels
from .errors import InvalidResolution, SolverDiverged, UnsupportedDomain

KINDS = ("ball", "rectangle", "disc", "polygon", "spinning_top")


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


def ball_volume(N: int) -> float:
    return math.pi ** (N / 2) / math.gamma(N / 2 + 1)


@dataclass(frozen=True)
class DomainSpec:
    """Declarative description of a computational domain.

    Use the constructors :meth:`ball`, :meth:`rectangle`, :meth:`disc`,
    :meth:`polygon` and :meth:`spinning_top` rather than the raw fields.
    """

    kind: str
    N: int = 2
    a: float = 1.0
    b: float = 1.0
    radius: float = 1.0
    vertices: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedDomain(f"unknown domain kind {self.kind!r}")
        if self.kind == "ball" and self.N < 2:
            raise UnsupportedDomain(f"ball dimension must be >= 2, got {self.N}")
        if self.kind == "rectangle" and not (self.a > 0 and self.b > 0):
            raise UnsupportedDomain("rectangle sides must be positive")
        if self.kind == "disc" and not self.radius > 0:
            raise UnsupportedDomain("disc radius must be positive")
        if self.kind == "polygon" and len(self.vertices) < 3:
            raise UnsupportedDomain("polygon needs at least three vertices")

    @classmethod
    def ball(cls, N: int) -> "DomainSpec":
        return cls("ball", N=int(N))

    @classmethod
    def rectangle(cls, a: float, b: float) -> "DomainSpec":
        return cls("rectangle", a=float(a), b=float(b))

    @classmethod
    def disc(cls, radius: float = 1.0) -> "DomainSpec":
        return cls("disc", radius=float(radius))

    @classmethod
    def polygon(cls, vertices: Sequence[Sequence[float]]) -> "DomainSpec":
        return cls("polygon", vertices=tuple((float(x), float(y)) for x, y in vertices))

    @classmethod
    def spinning_top(cls) -> "DomainSpec":
        return cls("spinning_top", N=3)

    @property
    def dim(self) -> int:
        if self.kind == "ball":
            return self.N
        return 3 if self.kind == "spinning_top" else 2

    def measure(self) -> float:
        """Exact Lebesgue measure of the domain (area in 2-D, volume in N-D)."""
        if self.kind == "ball":
            return ball_volume(self.N)
        if self.kind == "rectangle":
            return self.a * self.b
        if self.kind == "disc":
            return math.pi * self.radius**2
        if self.kind == "polygon":
            v = np.asarray(self.vertices)
            x, y = v[:, 0], v[:, 1]
            return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
        # {(x,y,z): |(x,y)| < 1, |(x,y)| < z < 2}
        return 4.0 * math.pi / 3.0

    def to_dict(self) -> dict:
        if self.kind == "ball":
            return {"kind": "ball", "N": self.N}
        if self.kind == "rectangle":
            return {"kind": "rectangle", "a": self.a, "b": self.b}
        if self.kind == "disc":
            return {"kind": "disc", "radius": self.radius}
        if self.kind == "polygon":
            return {"kind": "polygon", "vertices": [list(v) for v in self.vertices]}
        return {"kind": "spinning_top"}

    @classmethod
    def from_dict(cls, d: dict) -> "DomainSpec":
        d = dict(d)
        kind = d.pop("kind", None)
        allowed = {
            "ball": {"N"},
            "rectangle": {"a", "b"},
            "disc": {"radius"},
            "polygon": {"vertices"},
            "spinning_top": set(),
        }
        if kind not in allowed:
            raise UnsupportedDomain(f"unknown domain kind {kind!r}")
        extra = set(d) - allowed[kind]
        if extra:
            raise UnsupportedDomain(f"unexpected keys for {kind}: {sorted(extra)}")
        if kind == "ball":
            return cls.ball(d.get("N", 3))
        if kind == "rectangle":
            return cls.rectangle(d["a"], d["b"])
        if kind == "disc":
            return cls.disc(d.get("radius", 1.0))
        if kind == "polygon":
            return cls.polygon(d["vertices"])
        return cls.spinning_top()


# --------------------------------------------------------------------------
# grids


@dataclass(frozen=True, eq=False)
class Grid2D:
    """Uniform planar node lattice with an interior mask.

    Nodes are ``(x[i], y[j])``; ``interior_mask[i, j]`` selects the unknowns.
    Interior unknowns are numbered in C order of the mask (``np.nonzero``).
    """

    x: np.ndarray
    y: np.ndarray
    h: float
    interior_mask: np.ndarray
    spec: DomainSpec | None = None

    dim = 2

    def __post_init__(self):
        m = np.ascontiguousarray(self.interior_mask, dtype=bool)
        if m.shape != (len(self.x), len(self.y)):
            raise ValueError("mask shape does not match node coordinates")
        if m[0, :].any() or m[-1, :].any() or m[:, 0].any() or m[:, -1].any():
            raise ValueError("interior nodes must not touch the bounding box")
        m.setflags(write=False)
        object.__setattr__(self, "interior_mask", m)

    @property
    def nx(self) -> int:
        return len(self.x)

    @property
    def ny(self) -> int:
        return len(self.y)

    @cached_property
    def ij(self) -> tuple[np.ndarray, np.ndarray]:
        return np.nonzero(self.interior_mask)

    @property
    def n(self) -> int:
        return len(self.ij[0])

    @property
    def cell_volume(self) -> float:
        return self.h * self.h

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.full(self.n, self.cell_volume)
        w.setflags(write=False)
        return w

    @cached_property
    def points(self) -> np.ndarray:
        """Interior node coordinates, shape ``(n, 2)``."""
        i, j = self.ij
        return np.column_stack([self.x[i], self.y[j]])

    @cached_property
    def _index(self) -> np.ndarray:
        idx = np.full(self.interior_mask.shape, -1, dtype=np.int64)
        idx[self.ij] = np.arange(self.n)
        return idx

    def node_index(self, i: int, j: int) -> int:
        """Unknown number of lattice node ``(i, j)``; -1 if not interior."""
        return int(self._index[i, j])

    def node_label(self, k: int) -> dict:
        return {"i": int(self.ij[0][k]), "j": int(self.ij[1][k])}

    def nearest_node(self, px: float, py: float) -> int:
        d = (self.points[:, 0] - px) ** 2 + (self.points[:, 1] - py) ** 2
        return int(np.argmin(d))

    def to_array(self, values: np.ndarray) -> np.ndarray:
        out = np.zeros(self.interior_mask.shape)
        out[self.ij] = values
        return out

    def apply_laplacian(self, values: np.ndarray) -> np.ndarray:
        u = np.ascontiguousarray(self.to_array(values))
        mask = self.interior_mask.view(np.uint8)
        return kernels.laplacian_5pt(u, mask, self.h)[self.ij]

    @cached_property
    def stiffness(self) -> sp.csc_matrix:
        """Sparse matrix of ``-Delta_h`` on the interior unknowns."""
        idx = self._index
        i, j = self.ij
        rows, cols, vals = [np.arange(self.n)], [np.arange(self.n)], [np.full(self.n, 4.0)]
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = idx[i + di, j + dj]
            ok = nb >= 0
            rows.append(np.flatnonzero(ok))
            cols.append(nb[ok])
            vals.append(np.full(int(ok.sum()), -1.0))
        A = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n, self.n),
        )
        return (A / (self.h * self.h)).tocsc()

    @cached_property
    def _lu(self):
        return splu(self.stiffness)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Direct solve of ``-Delta_h u = rhs``; ``rhs`` may have columns."""
        return self._lu.solve(np.asarray(rhs, dtype=float))

    def solve_cg(self, rhs: np.ndarray, tol: float, maxiter: int | None = None):
        if maxiter is None:
            maxiter = max(100, int(50 * math.sqrt(self.n)))
        f = np.ascontiguousarray(self.to_array(rhs))
        mask = self.interior_mask.view(np.uint8)
        u, it, res = kernels.pcg_5pt(f, mask, self.h, tol, maxiter)
        if res > tol:
            raise SolverDiverged(
                f"CG stopped after {it} iterations at relative residual {res:.3e}",
                residual=res,
                iterations=it,
            )
        return u[self.ij]


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Radial discretization of the unit ball in R^N.

    ``nr`` nodes at ``r_i = i/nr``; the last one is the boundary (value 0)
    and the remaining ``nr - 1`` are the unknowns. Node ``i`` owns the shell
    between faces ``r_{i-1/2}`` and ``r_{i+1/2}`` (node 1 from the origin,
    the boundary node up to ``r = 1``), and the quadrature weight is the
    exact volume of that shell, so the weights sum to ``|B_1|``.
    """

    N: int
    nr: int

    def __post_init__(self):
        if self.N < 2:
            raise UnsupportedDomain("radial grids need N >= 2")
        if self.nr < 8:
            raise InvalidResolution(f"resolution must be >= 8, got {self.nr}")

    @property
    def dim(self) -> int:
        return self.N

    @property
    def h(self) -> float:
        return 1.0 / self.nr

    @property
    def n(self) -> int:
        return self.nr - 1

    @cached_property
    def r(self) -> np.ndarray:
        """Radii of the unknowns, ``r_1 .. r_{nr-1}``."""
        r = np.arange(1, self.nr) * self.h
        r.setflags(write=False)
        return r

    @property
    def points(self) -> np.ndarray:
        return self.r[:, None]

    @cached_property
    def _faces(self) -> np.ndarray:
        f = np.concatenate([[0.0], (np.arange(1, self.nr) + 0.5) * self.h])
        return f  # inner face of node 1 .. outer face of node nr-1

    @cached_property
    def weights(self) -> np.ndarray:
        f = self._faces
        w = sphere_area(self.N) * (f[1:] ** self.N - f[:-1] ** self.N) / self.N
        w.setflags(write=False)
        return w

    @property
    def boundary_weight(self) -> float:
        return ball_volume(self.N) * (1.0 - self._faces[-1] ** self.N)

    @cached_property
    def tridiagonal(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(sub, diag, sup)`` of ``-Delta_h``."""
        f = self._faces
        flux = sphere_area(self.N) * f ** (self.N - 1) / self.h
        cin, cout = flux[:-1], flux[1:]
        w = self.weights
        diag = (cin + cout) / w
        sub = -cin / w
        sup = -cout / w
        sub[0] = 0.0
        sup[-1] = 0.0
        for a in (sub, diag, sup):
            a.setflags(write=False)
        return sub, diag, sup

    @cached_property
    def stiffness(self) -> sp.csc_matrix:
        sub, diag, sup = self.tridiagonal
        return sp.diags([sub[1:], diag, sup[:-1]], [-1, 0, 1], format="csc")

    def node_index(self, i: int) -> int:
        """Unknown number of node ``r_i = i h`` (1-based radial index)."""
        return i - 1 if 1 <= i < self.nr else -1

    def node_label(self, k: int) -> dict:
        return {"i": int(k + 1)}

    def apply_laplacian(self, values: np.ndarray) -> np.ndarray:
        sub, diag, sup = self.tridiagonal
        u = np.asarray(values, dtype=float)
        out = -diag * u
        out[1:] -= sub[1:] * u[:-1]
        out[:-1] -= sup[:-1] * u[1:]
        return out

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        sub, diag, sup = self.tridiagonal
        return kernels.tridiag_solve(sub, diag, sup, np.asarray(rhs, dtype=float))

    def solve_cg(self, rhs, tol, maxiter=None):
        return self.solve(rhs)


Grid = Grid2D | RadialGrid


# --------------------------------------------------------------------------
# fields


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Values on a grid's interior unknowns; boundary values are zero."""

    grid: Grid2D | RadialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def norm(self, q: float) -> float:
        """Discrete L^q norm, ``(sum w |u|^q)^(1/q)``; ``q = inf`` is the sup."""
        if math.isinf(q):
            return float(np.max(np.abs(self.values), initial=0.0))
        return lq_norm(self.grid, self.values, q)

    def laplacian(self) -> "ScalarField":
        return ScalarField(self.grid, self.grid.apply_laplacian(self.values))

    def tv(self) -> float:
        """Total-variation surrogate: the discrete L^1 norm of the Laplacian."""
        return lq_norm(self.grid, self.grid.apply_laplacian(self.values), 1.0)

    def max(self) -> float:
        return float(self.values.max())

    def argmax(self) -> int:
        return int(np.argmax(self.values))

    def __mul__(self, c: float) -> "ScalarField":
        return ScalarField(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "ScalarField":
        return ScalarField(self.grid, self.values / float(c))


def lq_norm(grid, values, q: float) -> float:
    v = np.abs(np.asarray(values, dtype=float))
    if q == 1.0:
        return float(grid.weights @ v)
    if q == 2.0:
        return math.sqrt(float(grid.weights @ (v * v)))
    return float(grid.weights @ v**q) ** (1.0 / q)


# --------------------------------------------------------------------------
# operations


def _inside_polygon(px, py, vertices) -> np.ndarray:
    """Strict interior test (even-odd rule, points on an edge are outside)."""
    v = np.asarray(vertices, dtype=float)
    inside = np.zeros(px.shape, dtype=bool)
    on_edge = np.zeros(px.shape, dtype=bool)
    scale = float(np.ptp(v, axis=0).max())
    for k in range(len(v)):
        x1, y1 = v[k]
        x2, y2 = v[(k + 1) % len(v)]
        crosses = (y1 > py) != (y2 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (px < xint)
        ex, ey = x2 - x1, y2 - y1
        L2 = ex * ex + ey * ey
        t = np.clip(((px - x1) * ex + (py - y1) * ey) / L2, 0.0, 1.0)
        d = np.hypot(px - (x1 + t * ex), py - (y1 + t * ey))
        on_edge |= d <= 1e-12 * scale
    return inside & ~on_edge


def build_grid(spec: DomainSpec, resolution: int) -> Grid2D | RadialGrid:
    """Discretize ``spec`` with ``resolution`` nodes per unit length.

    Ball specs give a :class:`RadialGrid` with ``nr = resolution``. Planar
    specs give a :class:`Grid2D` with spacing ``1/resolution``; rectangles
    snap the spacing to ``a / round(a * resolution)`` so that the x-sides
    fall on grid lines.
    """
    if spec.kind == "spinning_top":
        raise UnsupportedDomain("the spinning top is only used by axisymmetric quadrature")
    if int(resolution) != resolution or resolution < 8:
        raise InvalidResolution(f"resolution must be an integer >= 8, got {resolution}")
    resolution = int(resolution)
    if spec.kind == "ball":
        return RadialGrid(spec.N, resolution)

    if spec.kind == "disc":
        h = 1.0 / resolution
        m = math.ceil(spec.radius * resolution) + 1
        x = (np.arange(2 * m + 1) - m) * h
        X, Y = np.meshgrid(x, x, indexing="ij")
        mask = X**2 + Y**2 < spec.radius**2 * (1.0 - 1e-12)
        return Grid2D(x, x.copy(), h, mask, spec)

    if spec.kind == "rectangle":
        na = max(2, round(spec.a * resolution))
        h = spec.a / na
        nb = math.ceil(spec.b / h - 1e-9)
        x = np.arange(na + 2) * h
        y = np.arange(nb + 2) * h
        X, Y = np.meshgrid(x, y, indexing="ij")
        tol = 1e-9 * h
        mask = (X > tol) & (X < spec.a - tol) & (Y > tol) & (Y < spec.b - tol)
        return Grid2D(x, y, h, mask, spec)

    v = np.asarray(spec.vertices, dtype=float)
    h = 1.0 / resolution
    lo, hi = v.min(axis=0), v.max(axis=0)
    nx = math.ceil((hi[0] - lo[0]) / h - 1e-9) + 2
    ny = math.ceil((hi[1] - lo[1]) / h - 1e-9) + 2
    x = lo[0] + np.arange(nx) * h
    y = lo[1] + np.arange(ny) * h
    X, Y = np.meshgrid(x, y, indexing="ij")
    mask = _inside_polygon(X, Y, v)
    return Grid2D(x, y, h, mask, spec)


class DiscreteLaplacian:
    """The discrete Laplacian of a grid, acting on fields or raw arrays."""

    def __init__(self, grid):
        self.grid = grid

    @property
    def matrix(self) -> sp.spmatrix:
        return -self.grid.stiffness

    def __call__(self, u):
        if isinstance(u, ScalarField):
            return u.laplacian()
        return self.grid.apply_laplacian(np.asarray(u, dtype=float))


def discrete_laplacian(grid) -> DiscreteLaplacian:
    return DiscreteLaplacian(grid)


def poisson_solve(grid, f, tol: float = 1e-10, backend: str = "direct") -> ScalarField:
    """Solve ``-Delta_h u = f`` with zero boundary values.

    ``backend="direct"`` uses a cached sparse factorization (tridiagonal
    elimination on radial grids) and ignores ``tol``; ``backend="cg"`` runs
    Jacobi-preconditioned conjugate gradients to relative residual ``tol``
    and raises :class:`SolverDiverged` when the iteration cap is hit.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    values = f.values if isinstance(f, ScalarField) else np.broadcast_to(
        np.asarray(f, dtype=float), (grid.n,)
    )
    if backend == "direct":
        u = grid.solve(values)
    elif backend == "cg":
        u = grid.solve_cg(values, tol)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return ScalarField(grid, u)


def torsion(grid) -> ScalarField:
    """Solution of ``-Delta_h u = 1``."""
    return poisson_solve(grid, np.ones(grid.n))


# --------------------------------------------------------------------------
# CSV


def write_field_csv(fld: ScalarField, path) -> None:
    g = fld.grid
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        if isinstance(g, RadialGrid):
            wr.writerow(["i", "r", "value"])
            for k, (r, v) in enumerate(zip(g.r, fld.values)):
                wr.writerow([k + 1, repr(float(r)), repr(float(v))])
        else:
            wr.writerow(["i", "j", "x", "y", "value"])
            for i, j, v in zip(*g.ij, fld.values):
                wr.writerow([int(i), int(j), repr(float(g.x[i])), repr(float(g.y[j])), repr(float(v))])


def read_field_csv(path, grid) -> ScalarField:
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        rows = list(rd)
    values = np.zeros(grid.n)
    if isinstance(grid, RadialGrid):
        if header != ["i", "r", "value"]:
            raise ValueError(f"unexpected radial header {header}")
        for i, _, v in rows:
            values[grid.node_index(int(i))] = float(v)
    else:
        if header != ["i", "j", "x", "y", "value"]:
            raise ValueError(f"unexpected planar header {header}")
        for i, j, _, _, v in rows:
            k = grid.node_index(int(i), int(j))
            if k < 0:
                raise ValueError(f"node ({i},{j}) is not interior")
            values[k] = float(v)
    return ScalarField(grid, values)
