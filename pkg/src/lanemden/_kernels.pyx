# cython: language_level=3
"""Compiled inner loops.

Same signatures and semantics as :mod:`lanemden._kernels_py`; see there for
documentation of each routine.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt

cnp.import_array()

BACKEND = "cython"


def laplacian_5pt(const double[:, ::1] u, const unsigned char[:, ::1] mask, double h):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], i, j
    cdef double inv = 1.0 / (h * h)
    out_arr = np.zeros((nx, ny), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    _apply_5pt(u, mask, inv, out, nx, ny)
    return out_arr


cdef inline void _apply_5pt(const double[:, ::1] u, const unsigned char[:, ::1] mask,
                            double inv, double[:, ::1] out,
                            Py_ssize_t nx, Py_ssize_t ny) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            if mask[i, j]:
                s = -4.0 * u[i, j]
                if mask[i + 1, j]:
                    s += u[i + 1, j]
                if mask[i - 1, j]:
                    s += u[i - 1, j]
                if mask[i, j + 1]:
                    s += u[i, j + 1]
                if mask[i, j - 1]:
                    s += u[i, j - 1]
                out[i, j] = s * inv
            else:
                out[i, j] = 0.0


def pcg_5pt(const double[:, ::1] f, const unsigned char[:, ::1] mask, double h,
            double tol, Py_ssize_t maxiter):
    cdef Py_ssize_t nx = f.shape[0], ny = f.shape[1], i, j, it = 0
    cdef double inv = 1.0 / (h * h)
    cdef double dinv = h * h / 4.0      # Jacobi: diagonal of -Delta_h is 4/h^2
    u_arr = np.zeros((nx, ny))
    r_arr = np.zeros((nx, ny))
    z_arr = np.zeros((nx, ny))
    p_arr = np.zeros((nx, ny))
    q_arr = np.zeros((nx, ny))
    cdef double[:, ::1] u = u_arr, r = r_arr, z = z_arr, p = p_arr, q = q_arr
    cdef double fnorm = 0.0, rz = 0.0, rz_new, pq, a, b, rnorm
    for i in range(nx):
        for j in range(ny):
            if mask[i, j]:
                r[i, j] = f[i, j]
                z[i, j] = dinv * f[i, j]
                p[i, j] = z[i, j]
                fnorm += f[i, j] * f[i, j]
                rz += r[i, j] * z[i, j]
    fnorm = sqrt(fnorm)
    if fnorm == 0.0:
        return u_arr, 0, 0.0
    rnorm = fnorm
    with nogil:
        while it < maxiter and rnorm > tol * fnorm:
            _apply_5pt(p, mask, -inv, q, nx, ny)      # q = -Delta_h p
            pq = 0.0
            for i in range(nx):
                for j in range(ny):
                    pq += p[i, j] * q[i, j]
            a = rz / pq
            rnorm = 0.0
            rz_new = 0.0
            for i in range(nx):
                for j in range(ny):
                    if mask[i, j]:
                        u[i, j] += a * p[i, j]
                        r[i, j] -= a * q[i, j]
                        z[i, j] = dinv * r[i, j]
                        rnorm += r[i, j] * r[i, j]
                        rz_new += r[i, j] * z[i, j]
            rnorm = sqrt(rnorm)
            b = rz_new / rz
            rz = rz_new
            for i in range(nx):
                for j in range(ny):
                    if mask[i, j]:
                        p[i, j] = z[i, j] + b * p[i, j]
            it += 1
    return u_arr, it, rnorm / fnorm


def tridiag_solve(const double[::1] sub, const double[::1] diag, const double[::1] sup, rhs):
    """Thomas algorithm; ``rhs`` may be 1-D or 2-D (one column per system)."""
    cdef Py_ssize_t n = diag.shape[0], i, k, m
    rhs2 = np.ascontiguousarray(rhs, dtype=np.float64)
    one_d = rhs2.ndim == 1
    if one_d:
        rhs2 = rhs2.reshape(n, 1)
    m = rhs2.shape[1]
    out_arr = np.array(rhs2, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] x = out_arr
    cp_arr = np.empty(n)
    cdef double[::1] cp = cp_arr
    cdef double denom
    denom_arr = np.empty(n)
    cdef double[::1] dn = denom_arr
    with nogil:
        dn[0] = diag[0]
        cp[0] = sup[0] / diag[0] if n > 1 else 0.0
        for i in range(1, n):
            dn[i] = diag[i] - sub[i] * cp[i - 1]
            if i < n - 1:
                cp[i] = sup[i] / dn[i]
        for k in range(m):
            x[0, k] = x[0, k] / dn[0]
        for i in range(1, n):
            for k in range(m):
                x[i, k] = (x[i, k] - sub[i] * x[i - 1, k]) / dn[i]
        for i in range(n - 2, -1, -1):
            for k in range(m):
                x[i, k] -= cp[i] * x[i + 1, k]
    return out_arr[:, 0].copy() if one_d else out_arr


def column_power_sums(const double[:, ::1] X, double q, const double[::1] w):
    cdef Py_ssize_t n = X.shape[0], m = X.shape[1], i, k
    out_arr = np.zeros(m)
    cdef double[::1] out = out_arr
    cdef double a
    with nogil:
        if q == 1.0:
            for i in range(n):
                for k in range(m):
                    out[k] += w[i] * fabs(X[i, k])
        elif q == 2.0:
            for i in range(n):
                for k in range(m):
                    out[k] += w[i] * X[i, k] * X[i, k]
        else:
            for i in range(n):
                for k in range(m):
                    a = fabs(X[i, k])
                    if a > 0.0:
                        out[k] += w[i] * pow(a, q)
    return out_arr
