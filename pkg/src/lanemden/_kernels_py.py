"""NumPy/SciPy implementations of the hot kernels.

These are the reference versions; ``_kernels.pyx`` mirrors them loop for
loop. Arrays are ``float64``; 2-D grids are indexed ``[i, j]`` with ``i``
along x. A masked node's out-of-mask neighbours are treated as zero
(homogeneous Dirichlet closure).
"""
import numpy as np
from scipy.linalg import solve_banded

BACKEND = "python"


def laplacian_5pt(u, mask, h):
    """Five-point Laplacian of ``u`` on the masked nodes, zero elsewhere."""
    m = mask.astype(bool)
    v = np.where(m, u, 0.0)
    out = np.zeros_like(v)
    out[1:-1, 1:-1] = (
        v[2:, 1:-1] + v[:-2, 1:-1] + v[1:-1, 2:] + v[1:-1, :-2] - 4.0 * v[1:-1, 1:-1]
    ) / (h * h)
    out[~m] = 0.0
    return out


def pcg_5pt(f, mask, h, tol, maxiter):
    """Jacobi-preconditioned CG for ``-Delta_h u = f`` on the mask.

    Returns ``(u, iterations, relative_residual)``.
    """
    m = mask.astype(bool)
    f = np.where(m, f, 0.0)
    dinv = h * h / 4.0
    u = np.zeros_like(f)
    r = f.copy()
    z = dinv * r
    p = z.copy()
    rz = float(np.vdot(r, z))
    fnorm = float(np.linalg.norm(f))
    if fnorm == 0.0:
        return u, 0, 0.0
    rnorm = fnorm
    it = 0
    while it < maxiter and rnorm > tol * fnorm:
        q = -laplacian_5pt(p, mask, h)
        a = rz / float(np.vdot(p, q))
        u += a * p
        r -= a * q
        z = dinv * r
        rz_new = float(np.vdot(r, z))
        rnorm = float(np.linalg.norm(r))
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
    return u, it, rnorm / fnorm


def tridiag_solve(sub, diag, sup, rhs):
    """Solve a tridiagonal system.

    ``sub[i]`` multiplies ``x[i-1]`` and ``sup[i]`` multiplies ``x[i+1]`` in
    row ``i``; ``sub[0]`` and ``sup[-1]`` are ignored. ``rhs`` may hold one
    system per column.
    """
    n = len(diag)
    ab = np.zeros((3, n))
    ab[0, 1:] = sup[:-1]
    ab[1] = diag
    ab[2, :-1] = sub[1:]
    return solve_banded((1, 1), ab, np.asarray(rhs, dtype=float))


def column_power_sums(X, q, w):
    """``out[k] = sum_i w[i] * |X[i, k]|**q``."""
    X = np.asarray(X)
    if q == 1.0:
        return w @ np.abs(X)
    if q == 2.0:
        return w @ (X * X)
    return w @ np.abs(X) ** q
