"""Acceptance checks, shared by ``lanemden verify`` and the test suite.

Each check returns an :class:`Outcome`; tolerances are explicit keyword
arguments so callers can pin them.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import closedform
from .asymptotics import beta_sweep, solve_system
from .eigen import EigenOptions, minimize_lambda, p_sweep, rayleigh_quotient
from .experiments import faber_krahn_compare, spinning_top_root
from .geometry import DomainSpec, build_grid, lq_norm, poisson_solve
from .greenfn import green_columns, jensen_bound_terms, lambda_one


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    detail: str
    numbers: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:>2}: {self.title}: {self.detail}"


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        out.seconds = time.perf_counter() - t0
        return out

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def closed_form_exactness(limit_tol=1e-6, exact_tol=1e-10, q_offset=1e-7) -> Outcome:
    errs = {N: abs(closedform.lambda_1q_ball(N, 1 + q_offset) - 2 * N) for N in (3, 4, 5)}
    e3 = abs(closedform.lambda_1q_ball(3, 1.0) - 6.0)
    ok = all(e <= limit_tol for e in errs.values()) and e3 <= exact_tol
    return Outcome(
        1,
        "closed-form exactness",
        ok,
        f"max |Lambda(N,1+) - 2N| = {max(errs.values()):.2e} (tol {limit_tol:g}); |Lambda(3,1) - 6| = {e3:.2e} (tol {exact_tol:g})",
        {"limit_errors": errs, "exact_error": e3},
    )


def reciprocal_grid():
    """Nine (N, q) pairs spread over the admissible range 1 <= q < N/(N-2)."""
    pts = []
    for N in (3, 4, 5):
        s = N / (N - 2)
        pts += [(N, 1.0), (N, 1 + 0.5 * (s - 1)), (N, 1 + 0.9 * (s - 1))]
    return pts


@_timed
def reciprocal_identity(tol=1e-12) -> Outcome:
    errs = [
        abs(closedform.lambda_1q_ball(N, q) * closedform.green_ball_lq_norm(N, q) - 1.0) for N, q in reciprocal_grid()
    ]
    return Outcome(2, "reciprocal identity", max(errs) <= tol, f"max |Lambda*|G|_q - 1| = {max(errs):.2e} (tol {tol:g})")


@_timed
def green_torsion_identity(tol=1e-8, resolution=64) -> Outcome:
    specs = [DomainSpec.rectangle(1, 1), DomainSpec.disc(1), DomainSpec.polygon([(0, 0), (1, 0), (0.3, 0.8)]),
             DomainSpec.ball(3)]
    errs = {}
    for spec in specs:
        g = build_grid(spec, resolution)
        stride = 1 if spec.kind == "ball" else 4
        lam = lambda_one(g, 1.0, stride=stride).lam
        errs[spec.kind] = abs(lam * poisson_solve(g, np.ones(g.n)).max() - 1.0)
    worst = max(errs.values())
    return Outcome(3, "Green vs torsion", worst <= tol, f"max |lambda*max(torsion) - 1| = {worst:.2e} over {sorted(errs)} (tol {tol:g})", errs)


@_timed
def disc_convergence(final_tol=0.02, min_order=1.0, resolutions=(32, 64, 128), strides=(2, 4, 8)) -> Outcome:
    hs, errs, lams = [], [], []
    for res, st in zip(resolutions, strides):
        lam = lambda_one(build_grid(DomainSpec.disc(1), res), 1.0, stride=st).lam
        hs.append(1.0 / res)
        lams.append(lam)
        errs.append(abs(lam - 4.0) / 4.0)
    order = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    ok = errs[-1] <= final_tol and order >= min_order
    return Outcome(
        4,
        "disc convergence",
        ok,
        f"lambda={[round(x, 6) for x in lams]}, rel err final {errs[-1]:.3%} (tol {final_tol:.0%}), "
        f"fitted order {order:.3f} (need >= {min_order})",
        {"h": hs, "lambda": lams, "rel_err": errs, "order": order},
    )


@_timed
def spinning_top(band1=(1.27, 1.29), band2=(1.26, 1.28)) -> Outcome:
    y1 = spinning_top_root(1).y_M
    y2 = spinning_top_root(2).y_M
    ok = band1[0] <= y1 <= band1[1] and band2[0] <= y2 <= band2[1] and y2 < y1
    return Outcome(5, "spinning top", ok, f"y_M(1)={y1:.5f} in {list(band1)}, y_M(2)={y2:.5f} in {list(band2)}, y_M(2)<y_M(1)")


@_timed
def p_continuity(final_tol=0.05, nr=2000, p_list=(1.5, 1.25, 1.1, 1.05)) -> Outcome:
    g = build_grid(DomainSpec.ball(3), nr)
    target = math.sqrt(12 * math.pi)
    recs = p_sweep(g, 2.0, p_list)
    errs = [abs(r.lam - target) / target for r in recs]
    dec = all(b < a for a, b in zip(errs, errs[1:]))
    return Outcome(
        6,
        "p->1 continuity",
        dec and errs[-1] <= final_tol,
        f"rel errors {[round(e, 4) for e in errs]} strictly decreasing={dec}, final {errs[-1]:.2%} (tol {final_tol:.0%})",
        {"lambda": [r.lam for r in recs], "rel_err": errs},
    )


@_timed
def rayleigh_sanity(tol=0.01, nr=2000) -> Outcome:
    lam = minimize_lambda(build_grid(DomainSpec.ball(3), nr), 2.0, 2.0).lam
    err = abs(lam - math.pi**2) / math.pi**2
    return Outcome(7, "Rayleigh sanity", err <= tol, f"lambda={lam:.8f} vs pi^2, rel err {err:.2e} (tol {tol:.0%})")


@_timed
def beta_limit(tv_tol=0.10, u_tol_factor=0.15, v_band=(0.8, 1.02), nr=2000, betas=(4, 8, 16, 32, 64)) -> Outcome:
    N, alpha = 3, 1.0
    g = build_grid(DomainSpec.ball(N), nr)
    recs, _ = beta_sweep(g, alpha, betas, r_min=0.2)
    kap = 12 * math.pi
    tv_err = abs(recs[-1].tv_U - kap) / kap
    su = [r.sup_err_U for r in recs]
    a_ok = tv_err <= tv_tol
    b_ok = all(y < x for x, y in zip(su, su[1:])) and su[-1] <= u_tol_factor * 3.0
    vmax = recs[-1].v_max
    c_ok = v_band[0] < vmax <= v_band[1]
    return Outcome(
        8,
        "beta-sweep limit",
        a_ok and b_ok and c_ok,
        f"(a) tv_U={recs[-1].tv_U:.4f} rel err {tv_err:.1%} (tol {tv_tol:.0%}) {'ok' if a_ok else 'FAIL'}; "
        f"(b) sup_err_U={[round(x, 4) for x in su]} final tol {u_tol_factor * 3:.2f} {'ok' if b_ok else 'FAIL'}; "
        f"(c) V_max={vmax:.4f} in ({v_band[0]}, {v_band[1]}] {'ok' if c_ok else 'FAIL'}",
        {"tv_U": [r.tv_U for r in recs], "sup_err_U": su, "v_max": [r.v_max for r in recs]},
    )


@_timed
def faber_krahn(resolution=96, qs=(1.0, 2.0)) -> Outcome:
    s = math.sqrt(math.pi)
    reps = [faber_krahn_compare(DomainSpec.rectangle(s, s), q, resolution) for q in qs]
    ok = all(r.lambda_domain > r.lambda_disc and r.margin > r.est_grid_error for r in reps)
    detail = "; ".join(
        f"q={r.q:g}: square {r.lambda_domain:.5f} vs disc {r.lambda_disc:.5f}, margin {r.margin:.4f} > grid err {r.est_grid_error:.2e}"
        for r in reps
    )
    return Outcome(9, "Faber-Krahn", ok, detail)


@_timed
def invariant_suite(reciprocity_tol=1e-8, adjoint_tol=1e-10, norm_tol=1e-10, jensen_tol=1e-9, seed=0) -> Outcome:
    """Deterministic instance of the property suites (the tests use hypothesis)."""
    rng = np.random.default_rng(seed)
    checks = {}
    grids = [
        build_grid(DomainSpec.polygon([(0, 0), (1, 0), (1.2, 0.7), (0.2, 1.0)]), 24),
        build_grid(DomainSpec.ball(3), 200),
    ]
    for g in grids:
        tag = type(g).__name__
        src = rng.choice(g.n, size=6, replace=False)
        G = green_columns(g, src)
        rec = max(abs(G[src[a], b] - G[src[b], a]) / abs(G[:, a]).max() for a in range(6) for b in range(6))
        checks[f"{tag} reciprocity"] = rec <= reciprocity_tol
        checks[f"{tag} positivity"] = bool(np.all(G > 0))
        u, v = rng.standard_normal(g.n), rng.standard_normal(g.n)
        lhs = np.dot(g.weights * u, g.apply_laplacian(v))
        rhs = np.dot(g.weights * g.apply_laplacian(u), v)
        checks[f"{tag} self-adjoint"] = abs(lhs - rhs) <= adjoint_tol * max(abs(lhs), 1.0)
        r1 = rayleigh_quotient(g, u, 1.5, 2.0)
        r2 = rayleigh_quotient(g, 17.3 * u, 1.5, 2.0)
        checks[f"{tag} scale invariance"] = abs(r1 - r2) <= 1e-13 * r1
        res = minimize_lambda(g, 2.0, 2.0)
        checks[f"{tag} |u|_q = 1"] = abs(lq_norm(g, res.u.values, 2.0) - 1) <= norm_tol
        one = lambda_one(g, 2.0)
        mu = np.zeros(g.n)
        mu[one.x_M] = 1.0
        lhs, rhs = jensen_bound_terms(g, 2.0, mu)
        checks[f"{tag} Jensen saturation"] = abs(lhs - rhs) <= jensen_tol * rhs
    g = grids[1]
    res = minimize_lambda(g, 1.5, 2.0)
    sol = solve_system(g, 1.0, 3.0)
    for name, w in (("u", res.u.values), ("U", sol.U.values), ("V", sol.V.values)):
        checks[f"radial {name} positive"] = bool(np.all(w > 0))
        checks[f"radial {name} monotone"] = bool(np.all(np.diff(w) <= 1e-12 * w.max()))
    failed = [k for k, ok in checks.items() if not ok]
    return Outcome(
        10,
        "invariant suites",
        not failed,
        f"{len(checks) - len(failed)}/{len(checks)} invariants hold" + (f"; failed: {failed}" if failed else ""),
        {k: bool(v) for k, v in checks.items()},
    )


ALL_CHECKS = (
    closed_form_exactness,
    reciprocal_identity,
    green_torsion_identity,
    disc_convergence,
    spinning_top,
    p_continuity,
    rayleigh_sanity,
    beta_limit,
    faber_krahn,
    invariant_suite,
)


def run_all(select=None) -> list[Outcome]:
    return [chk() for k, chk in enumerate(ALL_CHECKS, 1) if select is None or k in select]
