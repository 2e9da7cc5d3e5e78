"""Nonlinear eigenvalue ``Lambda_{p,q} = inf |Delta u|_p / |u|_q`` for p > 1.

The minimizer is computed by a nonlinear inverse-power iteration that
alternates two linear Dirichlet solves,

    v = (-Delta_h)^{-1} |u|^{q-2} u,
    w = (-Delta_h)^{-1} |v|^{beta-1} v,        beta = 1/(p-1),
    u <- normalize((1-d) u + d w/|w|_q),

whose fixed points satisfy the discrete Euler-Lagrange equation
``Delta(|Delta u|^{p-2} Delta u) = Lambda^p |u|^{q-2} u``.
"""
from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ExponentOutOfRange, SubcriticalityViolated, ZeroField
from .geometry import RadialGrid, ScalarField, lq_norm

log = logging.getLogger(__name__)

SWEEP_HEADER = ("p", "q", "lambda", "tv_u", "profile_err", "iters", "converged")
LOW_P_DAMPING = 0.25
# relative quotient increases below this are summation roundoff, not divergence
MONOTONE_NOISE = 1e-10


def _values(u) -> np.ndarray:
    return np.asarray(u.values if isinstance(u, ScalarField) else u, dtype=float)


def ambient_dim(grid) -> int:
    return grid.N if isinstance(grid, RadialGrid) else 2


@dataclass(frozen=True)
class EigenOptions:
    """Iteration controls.

    ``seed_profile`` is ``"torsion"``, ``("random", seed)`` or an array or
    :class:`ScalarField` of node values. Convergence requires both the
    relative quotient change to drop below ``rq_tol`` and the sup-norm
    change of the normalized iterate, relative to its sup, below ``u_tol``.
    """

    max_iters: int = 200_000
    rq_tol: float = 1e-12
    damping: float = 1.0
    eps_reg: float = 0.0
    seed_profile: object = "torsion"
    u_tol: float = 1e-11

    def __post_init__(self):
        if not self.rq_tol > 0:
            raise ValueError("rq_tol must be positive")
        if not self.eps_reg >= 0:
            raise ValueError("eps_reg must be nonnegative")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not self.u_tol > 0:
            raise ValueError("u_tol must be positive")


@dataclass(frozen=True, eq=False)
class EigenResult:
    p: float
    q: float
    lam: float
    u: ScalarField
    residual_history: list = field(repr=False)
    iters: int
    converged: bool
    diagnostic: str = ""

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "lambda": self.lam,
            "iters": self.iters,
            "converged": self.converged,
            "diagnostic": self.diagnostic,
        }


@dataclass(frozen=True)
class SweepRecord:
    p: float
    q: float
    lam: float
    tv_u: float
    profile_err: float
    iters: int
    converged: bool

    def row(self) -> list:
        return [self.p, self.q, self.lam, self.tv_u, self.profile_err, self.iters, self.converged]


def rayleigh_quotient(grid, u, p: float, q: float) -> float:
    """``|Delta_h u|_p / |u|_q`` with the grid quadrature."""
    if p < 1 or q < 1:
        raise ExponentOutOfRange("p and q must be >= 1")
    u = _values(u)
    if not np.any(u):
        raise ZeroField("Rayleigh quotient of the zero field")
    return lq_norm(grid, grid.apply_laplacian(u), p) / lq_norm(grid, u, q)


def check_subcritical(grid, p: float, q: float) -> None:
    if not p > 1:
        raise ExponentOutOfRange(f"need p > 1, got {p} (use the Green characterization at p = 1)")
    if not q >= 1:
        raise ExponentOutOfRange(f"need q >= 1, got {q}")
    N = ambient_dim(grid)
    if not (N - 2 * p) * q < N * p:
        raise SubcriticalityViolated(f"(N-2p)q < Np fails for N={N}, p={p}, q={q}")


def _signed_power(x: np.ndarray, s: float) -> np.ndarray:
    """``|x|^{s-1} x`` (``sign(x)`` for s = 0)."""
    if s == 1.0:
        return x.copy()
    a = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(a > 0, a ** (s - 1.0) * x, 0.0)
    return out


def seed_values(grid, seed_profile) -> np.ndarray:
    if isinstance(seed_profile, str):
        if seed_profile != "torsion":
            raise ValueError(f"unknown seed profile {seed_profile!r}")
        return grid.solve(np.ones(grid.n))
    if isinstance(seed_profile, tuple) and len(seed_profile) == 2 and seed_profile[0] == "random":
        rng = np.random.default_rng(seed_profile[1])
        return rng.random(grid.n) + 1e-3
    u0 = _values(seed_profile)
    if u0.shape != (grid.n,):
        raise ValueError("provided seed does not match the grid")
    if not np.any(u0):
        raise ZeroField("seed profile is identically zero")
    return u0


def inverse_power_step(grid, u: np.ndarray, p: float, q: float) -> np.ndarray:
    """One undamped step; returns ``w/|w|_q``."""
    beta = 1.0 / (p - 1.0)
    v = grid.solve(_signed_power(u, q - 1.0))
    vmax = np.abs(v).max()
    if vmax == 0:
        raise ZeroField("intermediate potential vanished")
    # rescaling by the max keeps |v|^beta in range; it only changes the scale of w
    w = grid.solve(_signed_power(v / vmax, beta))
    return w / lq_norm(grid, w, q)


def minimize_lambda(grid, p: float, q: float, opts: EigenOptions | None = None) -> EigenResult:
    """Minimize the Rayleigh quotient ``|Delta u|_p / |u|_q``.

    Never raises on non-convergence; check ``converged`` and ``diagnostic``.
    """
    opts = opts or EigenOptions()
    check_subcritical(grid, p, q)
    damping = min(opts.damping, LOW_P_DAMPING) if p < 1.1 else opts.damping
    u = seed_values(grid, opts.seed_profile)
    u = u / lq_norm(grid, u, q)
    hist: list[float] = []
    converged = False
    monotone = True
    diag = ""
    k = 0
    for k in range(1, opts.max_iters + 1):
        w = inverse_power_step(grid, u, p, q)
        # keep the branch with the sign of u
        if np.dot(w, u) < 0:
            w = -w
        un = (1.0 - damping) * u + damping * w
        un /= lq_norm(grid, un, q)
        du = np.abs(un - u).max() / np.abs(un).max()
        u = un
        lam = rayleigh_quotient(grid, u, p, q)
        if k > 3 and monotone and lam > hist[-1] * (1.0 + max(10 * opts.rq_tol, MONOTONE_NOISE)):
            monotone = False
            diag = f"quotient increased at iteration {k}: {hist[-1]!r} -> {lam!r}"
            log.warning(diag)
        hist.append(lam)
        if k > 1 and abs(hist[-1] - hist[-2]) <= opts.rq_tol * lam and du <= opts.u_tol:
            converged = True
            break
    if not converged and not diag:
        diag = f"max_iters={opts.max_iters} reached"
    if u.sum() < 0:
        u = -u
    return EigenResult(
        p=float(p),
        q=float(q),
        lam=hist[-1],
        u=ScalarField(grid, u),
        residual_history=hist,
        iters=k,
        converged=converged and monotone,
        diagnostic=diag,
    )


def hamiltonian_residual(grid, u, v, alpha: float, beta: float) -> float:
    """Sup-norm defect of ``(u, v)`` as a solution of the Lane-Emden system."""
    u = _values(u)
    v = _values(v)
    r1 = grid.apply_laplacian(u) + _signed_power(v, beta)
    r2 = grid.apply_laplacian(v) + _signed_power(u, alpha)
    return float(max(np.abs(r1).max(), np.abs(r2).max()))


def p_sweep(
    grid,
    q: float,
    p_list,
    opts: EigenOptions | None = None,
    warm_start: bool = True,
    jobs: int = 1,
    reference_profile: ScalarField | None = None,
) -> list[SweepRecord]:
    """Minimizers along a decreasing list of ``p``, compared with the p = 1 profile.

    ``profile_err`` is the discrete ``L^q`` distance between ``|u_p|`` and
    the normalized Green column from :func:`lanemden.greenfn.lambda_one`.
    """
    from .greenfn import lambda_one

    opts = opts or EigenOptions()
    p_list = [float(p) for p in p_list]
    if any(p <= 1 for p in p_list):
        raise ExponentOutOfRange("all p must exceed 1")
    if any(b >= a for a, b in zip(p_list, p_list[1:])):
        raise ValueError("p_list must be strictly decreasing")
    if reference_profile is None:
        reference_profile = lambda_one(grid, q).profile
    ref = reference_profile.values

    def record(res: EigenResult) -> SweepRecord:
        u = res.u.values
        return SweepRecord(
            p=res.p,
            q=res.q,
            lam=res.lam,
            tv_u=res.u.tv(),
            profile_err=lq_norm(grid, np.abs(u) - ref, q),
            iters=res.iters,
            converged=res.converged,
        )

    if not warm_start:
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
            results = list(ex.map(lambda p: minimize_lambda(grid, p, q, opts), p_list))
        return [record(r) for r in results]

    out = []
    seed = opts.seed_profile
    for p in p_list:
        res = minimize_lambda(grid, p, q, _with_seed(opts, seed))
        seed = res.u
        out.append(record(res))
    return out


def _with_seed(opts: EigenOptions, seed) -> EigenOptions:
    from dataclasses import replace

    return replace(opts, seed_profile=seed)


def write_sweep_csv(records, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(SWEEP_HEADER)
        for rec in records:
            wr.writerow([repr(x) if isinstance(x, float) else x for x in rec.row()])


def read_sweep_csv(path) -> list[SweepRecord]:
    with open(Path(path), newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if tuple(header) != SWEEP_HEADER:
            raise ValueError(f"unexpected header {header}")
        return [
            SweepRecord(
                float(r[0]), float(r[1]), float(r[2]), float(r[3]), float(r[4]), int(r[5]), r[6] == "True"
            )
            for r in rd
        ]
