"""Closed forms on the unit ball B_1 of R^N, N >= 3.

The Dirichlet Green function of B_1 with pole at the origin is
``c_N (|x|^{2-N} - 1)``. Its L^q norms are Beta integrals, which gives
explicit values of the first 1-bilaplacian eigenvalue ``Lambda_{1,q}(B_1)``,
the limit profile constants and the least-energy level.

Gamma values come from :func:`math.lgamma` (double precision, ~15 digits).
Arguments closer than ``POLE_GUARD`` to the pole at 0 are rejected.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .errors import DimensionOutOfRange, ExponentOutOfRange, InvalidRadius, QuadratureError
from .geometry import sphere_area

POLE_GUARD = 1e-6


def _lgamma(x: float) -> float:
    if x < POLE_GUARD:
        raise ExponentOutOfRange(f"Gamma argument {x:.3g} at or past the pole at 0")
    return math.lgamma(x)


def _check_N(N: int) -> None:
    if int(N) != N or N < 3:
        raise DimensionOutOfRange(f"closed forms need an integer N >= 3, got {N}")


def critical_exponent(N: int) -> float:
    """``N/(N-2)``: upper integrability limit for q."""
    _check_N(N)
    return N / (N - 2)


def check_ball_params(N: int, q: float | None = None, alpha: float | None = None) -> None:
    _check_N(N)
    if q is not None and not (1.0 <= q < N / (N - 2)):
        raise ExponentOutOfRange(f"need 1 <= q < N/(N-2) = {N / (N - 2):.6g}, got q={q}")
    if alpha is not None and not (0.0 < alpha < 2.0 / (N - 2)):
        raise ExponentOutOfRange(f"need 0 < alpha < 2/(N-2) = {2 / (N - 2):.6g}, got {alpha}")


def c_N(N: int) -> float:
    """Normalization ``1/((N-2)|dB_1|)`` of the ball Green function."""
    _check_N(N)
    return 1.0 / ((N - 2) * sphere_area(N))


def green_ball_lq_norm(N: int, q: float) -> float:
    """``|G_{B_1}(., 0)|_q``."""
    check_ball_params(N, q)
    s = N / (N - 2)
    log_inner = (
        0.5 * N * math.log(math.pi)
        - math.lgamma(N / 2 + 1)
        + _lgamma(s - q)
        + math.lgamma(q + 1)
        - math.lgamma(s)
    )
    return c_N(N) * math.exp(log_inner / q)


def lambda_1q_ball(N: int, q: float) -> float:
    """``Lambda_{1,q}(B_1)``, attained by ``|x|^{2-N} - 1`` for every q."""
    check_ball_params(N, q)
    s = N / (N - 2)
    pref = 4.0 * math.pi ** (N / 2) / math.exp(math.lgamma(N / 2 - 1))
    log_inner = (
        math.lgamma(s)
        + math.lgamma(N / 2 + 1)
        - 0.5 * N * math.log(math.pi)
        - _lgamma(s - q)
        - math.lgamma(q + 1)
    )
    return pref * math.exp(log_inner / q)


def a_coeff(N: int, alpha: float) -> float:
    """Amplitude ``A_{N,alpha}`` of the limit ``U_inf = A (r^{2-N} - 1)``."""
    check_ball_params(N, alpha=alpha)
    t = 2.0 / (N - 2)
    log_base = math.log(2 * N) + math.lgamma(t) - math.lgamma(alpha + 2) - _lgamma(t - alpha)
    return math.exp(log_base / alpha)


def kappa(N: int, alpha: float) -> float:
    """Limit total variation ``kappa_{N,alpha} = Lambda_{1,alpha+1}^{(alpha+1)/alpha}``."""
    check_ball_params(N, alpha=alpha)
    return lambda_1q_ball(N, alpha + 1.0) ** ((alpha + 1.0) / alpha)


def kappa_direct(N: int, alpha: float) -> float:
    """Same constant, from the c_N-based expression (independent algebra)."""
    check_ball_params(N, alpha=alpha)
    log_inner = (
        math.lgamma(N / (N - 2))
        + math.lgamma(N / 2 + 1)
        - 0.5 * N * math.log(math.pi)
        - _lgamma(2.0 / (N - 2) - alpha)
        - math.lgamma(alpha + 2)
    )
    return c_N(N) ** (-1.0 - 1.0 / alpha) * math.exp(log_inner / alpha)


def u_infty_profile(N: int, alpha: float, r):
    """``A_{N,alpha} (r^{2-N} - 1)``; accepts a scalar or an array of radii."""
    rr = np.asarray(r, dtype=float)
    if np.any(rr <= 0):
        raise InvalidRadius("U_inf is singular at r = 0; need r > 0")
    out = a_coeff(N, alpha) * (rr ** (2.0 - N) - 1.0)
    return float(out) if out.ndim == 0 else out


def v_infty_profile(N: int, alpha: float, r, rtol: float = 1e-10):
    """Bounded radial solution of ``-Delta V = U_inf^alpha``, ``V(1) = 0``.

    Uses the radial Green representation
    ``V(r) = 1/(N-2) [ (r^{2-N}-1) int_0^r t^{N-1} U^a dt
                      + int_r^1 t^{N-1} U^a (t^{2-N}-1) dt ]``,
    both integrals by adaptive quadrature. ``r = 0`` gives the centre value.
    """
    check_ball_params(N, alpha=alpha)
    A = a_coeff(N, alpha)

    def source(t):
        return t ** (N - 1) * (A * (t ** (2.0 - N) - 1.0)) ** alpha

    def one(r):
        if r < 0 or r > 1:
            raise InvalidRadius(f"radius must lie in [0, 1], got {r}")
        if r == 1.0:
            return 0.0
        inner, err_a = (0.0, 0.0)
        if r > 0:
            inner, err_a = integrate.quad(source, 0.0, r, epsabs=0.0, epsrel=rtol, limit=200)
            inner *= r ** (2.0 - N) - 1.0
            err_a *= r ** (2.0 - N) - 1.0
        outer, err_b = integrate.quad(
            lambda t: source(t) * (t ** (2.0 - N) - 1.0),
            r,
            1.0,
            epsabs=0.0,
            epsrel=rtol,
            limit=200,
        )
        val = (inner + outer) / (N - 2)
        if abs(err_a) + abs(err_b) > 1e-8 * max(abs(inner + outer), 1e-300):
            raise QuadratureError(f"V_inf quadrature did not converge at r={r}")
        return val

    rr = np.asarray(r, dtype=float)
    if rr.ndim == 0:
        return one(float(rr))
    return np.array([one(float(x)) for x in rr])


def least_energy_level(q: float, lam: float) -> float:
    """Least-energy level ``(q-1)/q * Lambda^{q/(q-1)}``."""
    if not q > 1:
        raise ExponentOutOfRange(f"least-energy level needs q > 1, got {q}")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    return (q - 1.0) / q * lam ** (q / (q - 1.0))


def ball_summary(N: int, q: float | None = None, alpha: float | None = None) -> dict:
    """All ball constants for the requested parameters (the CLI ``ball`` record).

    When only one of ``q``/``alpha`` is given the other follows from
    ``q = alpha + 1``. Quantities that are undefined for the parameters are
    reported as ``None``.
    """
    if q is None and alpha is None:
        raise ValueError("give q or alpha")
    if q is None:
        q = alpha + 1.0
    if alpha is None:
        alpha = q - 1.0
    check_ball_params(N, q)
    lam = lambda_1q_ball(N, q)
    out = {
        "N": N,
        "q": q,
        "alpha": alpha,
        "c_N": c_N(N),
        "green_norm": green_ball_lq_norm(N, q),
        "lambda_1q": lam,
        "A": None,
        "kappa": None,
        "level": least_energy_level(q, lam) if q > 1 else None,
    }
    if 0 < alpha < 2.0 / (N - 2):
        out["A"] = a_coeff(N, alpha)
        out["kappa"] = kappa(N, alpha)
    return out
