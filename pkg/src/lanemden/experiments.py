"""Two numerical experiments built on the Green characterization.

Spinning top: for the solid of revolution bounded by the cone
``z = rho - t`` and the plane ``z = 2 - t`` (axis coordinates shifted so the
pole sits at height ``t``), the function

    h_q(t) = 2 pi int_0^1 rho int_{rho-t}^{2-t} (rho^2 + z^2)^{-q} dz drho

is the ``L^{2q}`` mass of ``|x|^{-1}`` seen from a pole on the axis; its
maximizer ``y_M(q)`` locates where the fundamental solution is most
concentrated. For ``q >= 3/2`` the integral diverges at the pole and the
t-independent full-line contribution is subtracted (the maximizer and the
derivative are unchanged).

Faber-Krahn: ``Lambda_{1,q}`` of a planar domain of area pi compared with the
unit disc.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import ArgumentOutOfRange, ExponentOutOfRange, NoBracket, VolumeMismatch
from .geometry import DomainSpec, build_grid

QUAD_RTOL = 1e-10
DIVERGENCE_Q = 1.5
ROOT_BRACKET = (0.5, 1.9)
VOLUME_RTOL = 5e-3


# --------------------------------------------------------------------------
# spinning top


def _check_t_q(t: float, q: float) -> None:
    if not 0.0 < t < 2.0:
        raise ArgumentOutOfRange(f"t must lie in (0, 2), got {t}")
    if not 0.0 <= q < 3.0:
        raise ExponentOutOfRange(f"q must lie in [0, 3), got {q}")


def _quad(f, a, b, points=None, epsabs=0.0, **kw):
    if points is not None:
        points = [x for x in points if a < x < b] or None
    val, _ = integrate.quad(f, a, b, epsabs=epsabs, epsrel=QUAD_RTOL, limit=400, points=points, **kw)
    return val


def _kernel(rho, z, q):
    return (rho * rho + z * z) ** (-q)


def _inner_quad(rho: float, a: float, b: float, q: float) -> float:
    """``int_a^b (rho^2+z^2)^{-q} dz`` by quadrature in z, split at the peak z = 0."""
    return _quad(lambda z: _kernel(rho, z, q), a, b, points=[0.0])


def _inner_closed(rho: float, a: float, b: float, q: float) -> float:
    if q == 1:
        return (math.atan(b / rho) - math.atan(a / rho)) / rho

    def anti(z):
        return z / (2 * rho**2 * (rho**2 + z**2)) + math.atan(z / rho) / (2 * rho**3)

    return anti(b) - anti(a)


def _angle_integral(lo: float, hi: float, q: float) -> float:
    """``int_lo^hi sin(phi)^{2q-2} dphi``.

    With ``z = rho cot(phi)``, ``int_c^inf (rho^2+z^2)^{-q} dz`` equals
    ``rho^{1-2q}`` times this integral from 0 to ``atan2(rho, c)``.
    """
    if q == 1:
        return hi - lo
    return _quad(lambda phi: math.sin(phi) ** (2 * q - 2), lo, hi)


def _upper_tail_q2(rho: float, c: float) -> float:
    """``int_c^inf (rho^2+z^2)^{-2} dz`` in closed form, for any real c."""
    if c < 0:
        return math.pi / (2 * rho**3) - _upper_tail_q2(rho, -c)
    if c == 0:
        return math.pi / (4 * rho**3)
    x = rho / c
    if x < 0.05:
        x2 = x * x
        return (1 / 3 - x2 * (2 / 5 - x2 * (3 / 7 - x2 * (4 / 9 - x2 * 5 / 11)))) / c**3
    return (math.atan(x) - rho * c / (rho**2 + c**2)) / (2 * rho**3)


def spinning_top_h(t: float, q: float, method: str = "auto") -> float:
    """``h_q(t)``; renormalized for ``q >= 3/2``.

    ``method="auto"`` uses the closed-form inner antiderivative for q in
    {1, 2} and angle-variable quadrature otherwise. ``method="quad"``
    integrates the inner integral directly in z (split at z = 0); it is an
    independent path for cross-checks and only covers ``q < 3/2``.
    """
    _check_t_q(t, q)
    if method not in ("auto", "quad"):
        raise ValueError(f"unknown method {method!r}")
    if q == 0:
        return 4.0 * math.pi / 3.0
    if method == "quad":
        if q >= DIVERGENCE_Q:
            raise ExponentOutOfRange("direct z quadrature diverges for q >= 3/2")
        return 2 * math.pi * _quad(
            lambda rho: rho * _inner_quad(rho, rho - t, 2 - t, q) if rho > 0 else 0.0,
            0.0,
            1.0,
            points=[t],
        )
    if q < DIVERGENCE_Q:
        if q == 1:
            return 2 * math.pi * _quad(
                lambda rho: rho * _inner_closed(rho, rho - t, 2 - t, q) if rho > 0 else 0.0,
                0.0,
                1.0,
                points=[t],
            )

        def angles(rho):
            return _angle_integral(math.atan2(rho, 2 - t), math.atan2(rho, rho - t), q)

        if q > 0.5:
            # rho * rho^{1-2q} with a smooth angle factor: algebraic weight at 0
            return 2 * math.pi * _quad(angles, 0.0, 1.0, weight="alg", wvar=(2 - 2 * q, 0.0))
        return 2 * math.pi * _quad(lambda rho: rho ** (2 - 2 * q) * angles(rho) if rho > 0 else 0.0, 0.0, 1.0)

    if q == 2:

        def outer(rho):
            return rho * (_upper_tail_q2(rho, t - rho) + _upper_tail_q2(rho, 2 - t)) if rho > 0 else 0.0

    else:

        def outer(rho):
            if rho == 0:
                return 0.0
            a = _angle_integral(0.0, math.atan2(rho, t - rho), q)
            b = _angle_integral(0.0, math.atan2(rho, 2 - t), q)
            return rho ** (2 - 2 * q) * (a + b)

    return -2 * math.pi * _quad(outer, 0.0, 1.0, points=[t])


def spinning_top_hprime(t: float, q: float) -> float:
    """``h_q'(t) = 2 pi int_0^1 rho (f(rho, rho-t) - f(rho, 2-t)) drho``.

    The two terms cancel at the root, so an absolute floor tied to the size
    of the first term keeps the quadrature from chasing roundoff.
    """
    _check_t_q(t, q)
    scale = _quad(lambda rho: rho * _kernel(rho, rho - t, q), 0.0, 1.0)
    return 2 * math.pi * _quad(
        lambda rho: rho * (_kernel(rho, rho - t, q) - _kernel(rho, 2 - t, q)),
        0.0,
        1.0,
        epsabs=1e-13 * scale,
    )


@dataclass(frozen=True)
class SpinningTopResult:
    q: float
    y_M: float
    h_at_root: float
    bracket: tuple
    evals: int
    hprime_at_root: float = 0.0

    def to_json(self) -> dict:
        return {"q": self.q, "y_M": self.y_M, "bracket": list(self.bracket), "evals": self.evals}


def spinning_top_root(q: float, bracket=ROOT_BRACKET, xtol: float = 1e-13) -> SpinningTopResult:
    """Maximizer of ``h_q`` on the axis, as the root of ``h_q'``."""
    a, b = bracket
    _check_t_q(a, q)
    _check_t_q(b, q)
    count = [0]

    def fp(t):
        count[0] += 1
        return spinning_top_hprime(t, q)

    fa, fb = fp(a), fp(b)
    if not fa * fb < 0:
        raise NoBracket(f"h_q' has no sign change on [{a}, {b}] for q={q}: {fa:.3g}, {fb:.3g}")
    y = optimize.brentq(fp, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    return SpinningTopResult(
        q=float(q),
        y_M=float(y),
        h_at_root=spinning_top_h(y, q) if q > 0 else 4 * math.pi / 3,
        bracket=(float(a), float(b)),
        evals=count[0],
        hprime_at_root=spinning_top_hprime(y, q),
    )


# --------------------------------------------------------------------------
# Faber-Krahn


def disc_green_lq_norm(q: float) -> float:
    """``|G_disc(., 0)|_q`` for the unit disc, ``G = -log(r)/(2 pi)``, by quadrature."""
    if not q >= 1:
        raise ExponentOutOfRange(f"q must be >= 1, got {q}")
    val, _ = integrate.quad(
        lambda r: r * (-math.log(r) / (2 * math.pi)) ** q if r > 0 else 0.0,
        0.0,
        1.0,
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    return (2 * math.pi * val) ** (1.0 / q)


def disc_lambda_analytic(q: float) -> float:
    """``Lambda_{1,q}`` of the unit disc."""
    return 1.0 / disc_green_lq_norm(q)


@dataclass(frozen=True)
class FaberKrahnReport:
    domain: dict
    q: float
    lambda_domain: float
    lambda_disc: float
    holds: bool
    est_grid_error: float
    resolution: int

    @property
    def margin(self) -> float:
        return self.lambda_domain - self.lambda_disc

    @property
    def genuine_failure(self) -> bool:
        """A deficit larger than the grid error estimate."""
        return not self.holds and -self.margin > self.est_grid_error

    def to_json(self) -> dict:
        return {
            "domain": self.domain,
            "q": self.q,
            "lambda_domain": self.lambda_domain,
            "lambda_disc": self.lambda_disc,
            "holds": self.holds,
            "est_grid_error": self.est_grid_error,
        }


def faber_krahn_compare(spec: DomainSpec, q: float, resolution: int, stride: int = 8, jobs: int = 1) -> FaberKrahnReport:
    """Compare ``Lambda_{1,q}`` of an area-pi planar domain with the unit disc.

    The grid error estimate is ``|Lambda_h - Lambda_{2h}|`` from a second run
    at half the resolution.
    """
    from . import closedform
    from .greenfn import lambda_one

    if spec.kind == "ball":
        lam = closedform.lambda_1q_ball(spec.N, q)
        return FaberKrahnReport(spec.to_dict(), float(q), lam, lam, True, 0.0, int(resolution))
    if spec.kind == "spinning_top" or spec.dim != 2:
        raise VolumeMismatch(f"{spec.kind} is not a planar domain")
    area = spec.measure()
    if abs(area - math.pi) > VOLUME_RTOL * math.pi:
        raise VolumeMismatch(f"area {area:.6g} is not within 0.5% of pi")
    fine = lambda_one(build_grid(spec, resolution), q, stride=stride, jobs=jobs).lam
    coarse = lambda_one(build_grid(spec, max(8, resolution // 2)), q, stride=max(1, stride // 2), jobs=jobs).lam
    disc = disc_lambda_analytic(q)
    return FaberKrahnReport(
        domain=spec.to_dict(),
        q=float(q),
        lambda_domain=fine,
        lambda_disc=disc,
        holds=fine >= disc,
        est_grid_error=abs(fine - coarse),
        resolution=int(resolution),
    )
