"""Least-energy solutions of the Lane-Emden system and their beta -> inf limit.

The pair ``(U, V)`` solving ``-Delta U = |V|^{beta-1} V``,
``-Delta V = |U|^{alpha-1} U`` is obtained from a normalized minimizer ``u``
of the ``(p, q) = ((beta+1)/beta, alpha+1)`` Rayleigh quotient by

    U = Lambda^{p/(q-p)} u = Lambda^{(beta+1)/(alpha beta - 1)} u,
    V = (-Delta_h)^{-1} |U|^{alpha-1} U,

where ``Lambda = |Delta u|_p / |u|_q``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import closedform
from .eigen import EigenOptions, _signed_power, ambient_dim, hamiltonian_residual, minimize_lambda
from .errors import AlphaBetaProductOne, DomainMismatch, SupercriticalPair
from .geometry import RadialGrid, ScalarField, lq_norm

BETA_HEADER = ("beta", "tv_U", "sup_err_U", "sup_err_V", "v_max", "lambda_used", "iters")


def check_pair(N: int, alpha: float, beta: float) -> None:
    if not (alpha > 0 and beta > 0):
        raise SupercriticalPair("alpha and beta must be positive")
    if abs(alpha * beta - 1.0) < 1e-12:
        raise AlphaBetaProductOne("alpha * beta = 1 is the eigenvalue case, not a power system")
    if not 1.0 / (alpha + 1) + 1.0 / (beta + 1) > (N - 2) / N:
        raise SupercriticalPair(
            f"1/(alpha+1) + 1/(beta+1) = {1 / (alpha + 1) + 1 / (beta + 1):.6g} "
            f"is not above (N-2)/N = {(N - 2) / N:.6g}"
        )


def scaling_exponent(alpha: float, beta: float) -> float:
    """Exponent ``e`` with ``U = Lambda^e u``: ``(beta+1)/(alpha beta - 1)``."""
    return (beta + 1.0) / (alpha * beta - 1.0)


def energy(grid, U, alpha: float, beta: float) -> float:
    """``beta/(beta+1) |Delta U|_p^p - |U|_{alpha+1}^{alpha+1}/(alpha+1)``."""
    U = U.values if isinstance(U, ScalarField) else np.asarray(U)
    p = (beta + 1.0) / beta
    lap = grid.apply_laplacian(U)
    return beta / (beta + 1.0) * float(np.sum(grid.weights * np.abs(lap) ** p)) - float(
        np.sum(grid.weights * np.abs(U) ** (alpha + 1.0))
    ) / (alpha + 1.0)


@dataclass(frozen=True, eq=False)
class SystemSolution:
    alpha: float
    beta: float
    U: ScalarField
    V: ScalarField
    lambda_used: float
    energy_J: float
    residual: float
    v_pointwise_gap: float
    iters: int
    converged: bool
    u_normalized: ScalarField = field(repr=False)

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "lambda_used": self.lambda_used,
            "energy_J": self.energy_J,
            "residual": self.residual,
            "v_pointwise_gap": self.v_pointwise_gap,
            "U_max": self.U.max(),
            "V_max": self.V.max(),
            "iters": self.iters,
            "converged": self.converged,
        }


def solve_system(grid, alpha: float, beta: float, opts: EigenOptions | None = None) -> SystemSolution:
    """Positive least-energy pair ``(U, V)`` on the grid.

    ``v_pointwise_gap`` compares ``V`` with ``-|Delta U|^{1/beta-1} Delta U``,
    relative to ``max V``; it is a consistency diagnostic only.
    """
    check_pair(ambient_dim(grid), alpha, beta)
    p = (beta + 1.0) / beta
    q = alpha + 1.0
    res = minimize_lambda(grid, p, q, opts)
    lam = res.lam
    U = lam ** scaling_exponent(alpha, beta) * res.u.values
    V = grid.solve(_signed_power(U, alpha))
    V_pt = -_signed_power(grid.apply_laplacian(U), 1.0 / beta)
    return SystemSolution(
        alpha=float(alpha),
        beta=float(beta),
        U=ScalarField(grid, U),
        V=ScalarField(grid, V),
        lambda_used=lam,
        energy_J=energy(grid, U, alpha, beta),
        residual=hamiltonian_residual(grid, U, V, alpha, beta),
        v_pointwise_gap=float(np.abs(V - V_pt).max() / np.abs(V).max()),
        iters=res.iters,
        converged=res.converged,
        u_normalized=res.u,
    )


@dataclass(frozen=True)
class BetaSweepRecord:
    beta: float
    tv_U: float
    sup_err_U: float
    sup_err_V: float
    v_max: float
    lambda_used: float
    iters: int
    converged: bool = True
    domain: str = "ball"
    N: int = 3

    def row(self) -> list:
        return [self.beta, self.tv_U, self.sup_err_U, self.sup_err_V, self.v_max, self.lambda_used, self.iters]


def limit_profiles(grid, alpha: float, r_min: float):
    """Reference limits ``(U_inf, V_inf)`` on the comparison window, and the window mask.

    Ball grids use the closed forms. Other grids use the discrete limit
    ``U_inf = Lambda_{1,alpha+1}^{(alpha+1)/alpha} G(., x_M)`` built from the
    Green characterization, with the window ``|x - x_M| >= r_min``.
    """
    if isinstance(grid, RadialGrid):
        mask = grid.r >= r_min
        rr = grid.r[mask]
        return closedform.u_infty_profile(grid.N, alpha, rr), closedform.v_infty_profile(grid.N, alpha, rr), mask
    from .greenfn import lambda_one

    one = lambda_one(grid, alpha + 1.0)
    G = one.profile.values / one.lam  # profile = G / |G|_q and |G|_q = 1/lambda
    U_inf = one.lam ** ((alpha + 1.0) / alpha) * G
    V_inf = grid.solve(_signed_power(U_inf, alpha))
    mask = np.linalg.norm(grid.points - grid.points[one.x_M], axis=1) >= r_min
    return U_inf[mask], V_inf[mask], mask


def beta_sweep(grid, alpha: float, beta_list, r_min: float = 0.2, opts: EigenOptions | None = None):
    """Warm-started sequence of system solutions along increasing ``beta``.

    Returns ``(records, solutions)``.
    """
    beta_list = [float(b) for b in beta_list]
    if any(b <= a for a, b in zip(beta_list, beta_list[1:])):
        raise ValueError("beta_list must be strictly increasing")
    if not 0 < r_min < 1:
        raise ValueError("r_min must lie in (0, 1)")
    for b in beta_list:
        check_pair(ambient_dim(grid), alpha, b)
    opts = opts or EigenOptions()
    U_ref, V_ref, mask = limit_profiles(grid, alpha, r_min)
    is_ball = isinstance(grid, RadialGrid)
    records, sols = [], []
    seed = opts.seed_profile
    for b in beta_list:
        sol = solve_system(grid, alpha, b, replace(opts, seed_profile=seed))
        seed = sol.u_normalized
        records.append(
            BetaSweepRecord(
                beta=b,
                tv_U=sol.U.tv(),
                sup_err_U=float(np.abs(sol.U.values[mask] - U_ref).max()),
                sup_err_V=float(np.abs(sol.V.values[mask] - V_ref).max()),
                v_max=sol.V.max(),
                lambda_used=sol.lambda_used,
                iters=sol.iters,
                converged=sol.converged,
                domain="ball" if is_ball else "other",
                N=ambient_dim(grid),
            )
        )
        sols.append(sol)
    return records, sols


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class LimitReport:
    criteria: tuple
    numbers: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def to_text(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}" for c in self.criteria]
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "criteria": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.criteria],
            "numbers": self.numbers,
        }


def default_tolerances(N: int, alpha: float) -> dict:
    return {"tol_tv": 0.1, "tol_U": 0.15 * closedform.a_coeff(N, alpha), "tol_V": 0.05}


def _strictly_decreasing(xs) -> bool:
    return len(xs) >= 3 and all(b < a for a, b in zip(xs, xs[1:]))


def check_limit_ball(records, N: int, alpha: float, tolerances: dict | None = None) -> LimitReport:
    """Compare a ball beta-sweep with the closed-form limit.

    (a) relative tv error of the last record against ``kappa(N, alpha)``;
    (b) and (c) sup errors of U and V strictly decreasing (at least three
    records) with final values within tolerance. An optional
    ``v_max_band = (lo, hi)`` adds the check ``lo < v_max(last) <= hi``.
    """
    if not records:
        raise ValueError("no records")
    for rec in records:
        if rec.domain != "ball" or rec.N != N:
            raise DomainMismatch(f"record for beta={rec.beta} is not from a ball grid in dimension {N}")
    tol = default_tolerances(N, alpha)
    tol.update(tolerances or {})
    kap = closedform.kappa(N, alpha)
    last = records[-1]
    tv_err = abs(last.tv_U - kap) / kap
    eu = [r.sup_err_U for r in records]
    ev = [r.sup_err_V for r in records]
    crit = [
        CriterionResult(
            "(a) tv_U -> kappa",
            tv_err <= tol["tol_tv"],
            f"tv_U={last.tv_U:.6g}, kappa={kap:.6g}, rel err={tv_err:.4g} (tol {tol['tol_tv']:.4g})",
        ),
        CriterionResult(
            "(b) sup_err_U",
            _strictly_decreasing(eu) and eu[-1] <= tol["tol_U"],
            f"sequence={[round(x, 6) for x in eu]}, final tol {tol['tol_U']:.4g}"
            + ("" if len(eu) >= 3 else " (monotonicity needs >= 3 points)"),
        ),
        CriterionResult(
            "(c) sup_err_V",
            _strictly_decreasing(ev) and ev[-1] <= tol["tol_V"],
            f"sequence={[round(x, 6) for x in ev]}, final tol {tol['tol_V']:.4g}"
            + ("" if len(ev) >= 3 else " (monotonicity needs >= 3 points)"),
        ),
    ]
    if "v_max_band" in tol:
        lo, hi = tol["v_max_band"]
        crit.append(
            CriterionResult("v_max band", lo < last.v_max <= hi, f"v_max={last.v_max:.6g} in ({lo}, {hi}]")
        )
    numbers = {"kappa": kap, "records": [dict(zip(BETA_HEADER, r.row())) for r in records]}
    return LimitReport(tuple(crit), numbers)


def write_beta_csv(records, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(BETA_HEADER)
        for rec in records:
            wr.writerow([repr(x) if isinstance(x, float) else x for x in rec.row()])


def read_beta_csv(path, domain: str = "ball", N: int = 3) -> list[BetaSweepRecord]:
    with open(Path(path), newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if tuple(header) != BETA_HEADER:
            raise ValueError(f"unexpected header {header}")
        return [
            BetaSweepRecord(*(float(x) for x in r[:6]), int(r[6]), domain=domain, N=N) for r in rd
        ]


def energy_check(grid, sol: SystemSolution) -> float:
    """Second evaluation of the energy via norms, for cross-checking ``energy_J``."""
    p = (sol.beta + 1.0) / sol.beta
    q = sol.alpha + 1.0
    lap = lq_norm(grid, sol.U.laplacian().values, p)
    return sol.beta / (sol.beta + 1.0) * lap**p - lq_norm(grid, sol.U.values, q) ** q / q
