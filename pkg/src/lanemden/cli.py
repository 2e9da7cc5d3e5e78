"""Command-line driver.

Usage::

    lanemden ball --param N=3 --param q=1 --out out/ball
    lanemden --config run.json --out out/run --plots

Each run writes ``results.json`` with top-level keys ``command``,
``config_echo``, ``results``, ``timings`` and ``versions``; everything except
``timings`` is a deterministic function of the configuration and seed.
Exit codes: 0 success, 1 computational failure (or a failed ``verify``),
2 configuration error.
"""
from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, closedform, kernels, svg
from .errors import ConfigInvalid, LanemdenError, ParseError
from .geometry import DomainSpec, RadialGrid, build_grid, write_field_csv

COMMANDS = ("ball", "green", "eigen", "sweep-p", "sweep-beta", "spinning-top", "faber-krahn", "verify")
TOP_KEYS = {"command", "domain", "parameters", "output_dir", "emit_plots", "seed"}

# allowed parameter names per command, with defaults
PARAMS = {
    "ball": {"N": 3, "q": None, "alpha": None},
    "green": {"N": None, "q": 1.0, "resolution": 64, "stride": 1},
    "eigen": {"N": None, "p": 2.0, "q": 2.0, "resolution": 400, "max_iters": 200_000, "rq_tol": 1e-12,
              "damping": 1.0, "seed_profile": "torsion"},
    "sweep-p": {"N": None, "q": 2.0, "p_list": [1.5, 1.25, 1.1, 1.05], "resolution": 2000, "warm_start": True},
    "sweep-beta": {"N": 3, "alpha": 1.0, "beta_list": [4, 8, 16, 32, 64], "resolution": 2000, "r_min": 0.2,
                   "tolerances": None},
    "spinning-top": {"q": 1.0},
    "faber-krahn": {"q": 1.0, "resolution": 96, "stride": 8},
    "verify": {"criteria": None},
}


@dataclass
class RunConfig:
    command: str
    domain: DomainSpec | None
    parameters: dict
    output_dir: str = "out"
    emit_plots: bool = False
    seed: int = 0
    echo: dict = field(default_factory=dict)


def _need(cond: bool, name: str, message: str) -> None:
    if not cond:
        raise ConfigInvalid(name, message)


def _num(params, name, integer=False):
    v = params[name]
    ok = isinstance(v, int) if integer else isinstance(v, (int, float))
    _need(ok and not isinstance(v, bool), name, f"must be {'an integer' if integer else 'a number'}")
    return v


def _default_domain(command: str, params: dict) -> DomainSpec | None:
    if command in ("ball", "sweep-beta"):
        return DomainSpec.ball(params["N"])
    if command in ("green", "eigen", "sweep-p"):
        return DomainSpec.ball(params["N"]) if params.get("N") is not None else DomainSpec.disc(1.0)
    if command == "faber-krahn":
        s = math.sqrt(math.pi)
        return DomainSpec.rectangle(s, s)
    return None


def _validate(cmd: str, p: dict, domain: DomainSpec | None) -> None:
    from .asymptotics import check_pair
    from .errors import AlphaBetaProductOne, SupercriticalPair

    if "resolution" in p:
        _need(_num(p, "resolution", integer=True) >= 8, "resolution", "must be >= 8")
    if domain is not None and cmd not in ("ball", "spinning-top", "verify"):
        _need(domain.kind != "spinning_top", "domain", "the spinning top is never gridded")
    dim = domain.dim if domain is not None else None
    if cmd == "ball":
        _need(_num(p, "N", integer=True) >= 3, "N", "closed forms need N >= 3")
        _need(p["q"] is not None or p["alpha"] is not None, "q", "give q or alpha")
        if p["q"] is not None:
            q = _num(p, "q")
            _need(1 <= q < p["N"] / (p["N"] - 2), "q", f"need 1 <= q < N/(N-2) = {p['N'] / (p['N'] - 2):.6g}")
        if p["alpha"] is not None:
            a = _num(p, "alpha")
            _need(0 < a < 2 / (p["N"] - 2), "alpha", f"need 0 < alpha < 2/(N-2) = {2 / (p['N'] - 2):.6g}")
    elif cmd == "green":
        q = _num(p, "q")
        _need(q >= 1, "q", "need q >= 1")
        if domain.kind == "ball" and domain.N >= 3:
            _need(q < domain.N / (domain.N - 2), "q", f"need q < N/(N-2) = {domain.N / (domain.N - 2):.6g}")
        _need(_num(p, "stride", integer=True) >= 1, "stride", "must be >= 1")
    elif cmd == "eigen":
        pp, q = _num(p, "p"), _num(p, "q")
        _need(pp > 1, "p", "need p > 1 (p = 1 is handled by the command 'green')")
        _need(q >= 1, "q", "need q >= 1")
        _need((dim - 2 * pp) * q < dim * pp, "p", f"subcriticality (N-2p)q < Np fails for N={dim}")
        _need(0 < _num(p, "damping") <= 1, "damping", "must lie in (0, 1]")
        _need(_num(p, "rq_tol") > 0, "rq_tol", "must be > 0")
        _need(p["seed_profile"] in ("torsion", "random"), "seed_profile", "must be 'torsion' or 'random'")
    elif cmd == "sweep-p":
        pl = p["p_list"]
        _need(isinstance(pl, list) and len(pl) >= 1, "p_list", "must be a nonempty list")
        _need(all(isinstance(x, (int, float)) and x > 1 for x in pl), "p_list", "every p must exceed 1")
        _need(all(b < a for a, b in zip(pl, pl[1:])), "p_list", "must be strictly decreasing")
        q = _num(p, "q")
        _need(q >= 1, "q", "need q >= 1")
        for x in pl:
            _need((dim - 2 * x) * q < dim * x, "p_list", f"subcriticality (N-2p)q < Np fails at p={x}")
    elif cmd == "sweep-beta":
        _need(_num(p, "N", integer=True) >= 3, "N", "need N >= 3")
        a = _num(p, "alpha")
        bl = p["beta_list"]
        _need(isinstance(bl, list) and len(bl) >= 1, "beta_list", "must be a nonempty list")
        _need(all(isinstance(x, (int, float)) and x > 0 for x in bl), "beta_list", "every beta must be positive")
        _need(all(b > x for x, b in zip(bl, bl[1:])), "beta_list", "must be strictly increasing")
        _need(0 < a < 2 / (p["N"] - 2), "alpha", f"need 0 < alpha < 2/(N-2) = {2 / (p['N'] - 2):.6g}")
        for b in bl:
            try:
                check_pair(p["N"], a, b)
            except AlphaBetaProductOne:
                raise ConfigInvalid("beta_list", f"alpha*beta = 1 at beta={b}") from None
            except SupercriticalPair:
                raise ConfigInvalid(
                    "beta_list", f"1/(alpha+1) + 1/(beta+1) > (N-2)/N fails at beta={b}"
                ) from None
        _need(0 < _num(p, "r_min") < 1, "r_min", "must lie in (0, 1)")
        tol = p["tolerances"]
        if tol is not None:
            _need(isinstance(tol, dict) and set(tol) <= {"tol_tv", "tol_U", "tol_V"}, "tolerances",
                  "allowed keys are tol_tv, tol_U, tol_V")
    elif cmd == "spinning-top":
        _need(0 <= _num(p, "q") < 3, "q", "need 0 <= q < 3")
    elif cmd == "faber-krahn":
        _need(_num(p, "q") >= 1, "q", "need q >= 1")
        if domain.kind != "ball":
            _need(abs(domain.measure() - math.pi) <= 5e-3 * math.pi, "domain", "area must be within 0.5% of pi")
    elif cmd == "verify":
        c = p["criteria"]
        if c is not None:
            _need(isinstance(c, list) and all(isinstance(k, int) and 1 <= k <= 10 for k in c), "criteria",
                  "must be a list of criterion numbers 1..10")


def build_config(obj: dict) -> RunConfig:
    """Validate a decoded configuration object (strict keys)."""
    if not isinstance(obj, dict):
        raise ConfigInvalid("config", "top level must be a JSON object")
    extra = set(obj) - TOP_KEYS
    if extra:
        raise ConfigInvalid(sorted(extra)[0], "unknown top-level key")
    cmd = obj.get("command")
    if cmd not in COMMANDS:
        raise ConfigInvalid("command", f"must be one of {', '.join(COMMANDS)}")
    given = obj.get("parameters", {}) or {}
    if not isinstance(given, dict):
        raise ConfigInvalid("parameters", "must be an object")
    unknown = set(given) - set(PARAMS[cmd])
    if unknown:
        raise ConfigInvalid(sorted(unknown)[0], f"unknown parameter for {cmd}")
    params = dict(PARAMS[cmd])
    params.update(given)
    domain = None
    if "domain" in obj:
        try:
            domain = DomainSpec.from_dict(obj["domain"])
        except (LanemdenError, KeyError, TypeError, ValueError) as exc:
            raise ConfigInvalid("domain", str(exc)) from None
        if cmd in ("ball", "sweep-beta") and domain.kind != "ball":
            raise ConfigInvalid("domain", f"{cmd} needs a ball domain")
        if cmd in ("ball", "sweep-beta"):
            params["N"] = domain.N
    elif cmd not in ("spinning-top", "verify"):
        if params.get("N") is not None:
            _need(_num(params, "N", integer=True) >= 2, "N", "need N >= 2")
        domain = _default_domain(cmd, params)
    _validate(cmd, params, domain)
    seed = obj.get("seed", 0)
    _need(isinstance(seed, int) and seed >= 0, "seed", "must be a nonnegative integer")
    emit = obj.get("emit_plots", False)
    _need(isinstance(emit, bool), "emit_plots", "must be true or false")
    out = obj.get("output_dir", "out")
    _need(isinstance(out, str), "output_dir", "must be a string")
    echo = {"command": cmd, "parameters": params, "seed": seed}
    if domain is not None:
        echo["domain"] = domain.to_dict()
    return RunConfig(cmd, domain, params, out, emit, seed, echo)


def parse_config(json_text: str) -> RunConfig:
    """Parse and validate a JSON configuration.

    Raises :class:`ParseError` (with line and column) on malformed JSON and
    :class:`ConfigInvalid` (naming the field) on any violated constraint.
    """
    try:
        obj = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return build_config(obj)


# --------------------------------------------------------------------------
# command drivers; each returns (results, files) and may write into ``out``


def _grid(cfg: RunConfig):
    return build_grid(cfg.domain, cfg.parameters["resolution"])


def _field_plot(fld, path, title, mark=None):
    g = fld.grid
    if isinstance(g, RadialGrid):
        svg.line_chart({title: (g.r, fld.values)}, path, title=title, xlabel="r", ylabel="value")
    else:
        svg.heatmap(g.to_array(fld.values), path, title=title, mark=mark)


def run_ball(cfg, out):
    p = cfg.parameters
    return closedform.ball_summary(p["N"], p["q"], p["alpha"])


def run_green(cfg, out, jobs):
    from .greenfn import lambda_one

    p = cfg.parameters
    g = _grid(cfg)
    res = lambda_one(g, float(p["q"]), stride=p["stride"], jobs=jobs)
    write_field_csv(res.landscape, out / "landscape.csv")
    write_field_csv(res.profile, out / "profile.csv")
    results = res.to_json()
    results["n_nodes"] = g.n
    results["h"] = g.h
    if cfg.emit_plots:
        mark = None if isinstance(g, RadialGrid) else tuple(int(x) for x in g.node_label(res.x_M).values())
        _field_plot(res.landscape, out / "landscape.svg", f"landscape h, q={p['q']}", mark)
    return results


def run_eigen(cfg, out):
    from .eigen import EigenOptions, minimize_lambda

    p = cfg.parameters
    g = _grid(cfg)
    seed = "torsion" if p["seed_profile"] == "torsion" else ("random", cfg.seed)
    opts = EigenOptions(max_iters=p["max_iters"], rq_tol=p["rq_tol"], damping=p["damping"], seed_profile=seed)
    res = minimize_lambda(g, float(p["p"]), float(p["q"]), opts)
    write_field_csv(res.u, out / "u.csv")
    if cfg.emit_plots:
        h = res.residual_history
        svg.line_chart({"quotient": (list(range(1, len(h) + 1)), h)}, out / "history.svg",
                       title="Rayleigh quotient per iteration", xlabel="iteration", ylabel="lambda")
        _field_plot(res.u, out / "u.svg", "minimizer u")
    return res.to_json()


def run_sweep_p(cfg, out, jobs):
    from .eigen import p_sweep, write_sweep_csv
    from .greenfn import lambda_one

    p = cfg.parameters
    g = _grid(cfg)
    one = lambda_one(g, float(p["q"]))
    recs = p_sweep(g, float(p["q"]), p["p_list"], warm_start=p["warm_start"], jobs=jobs, reference_profile=one.profile)
    write_sweep_csv(recs, out / "sweep_p.csv")
    results = {"lambda_one_grid": one.lam, "records": [dict(zip(("p", "q", "lambda", "tv_u", "profile_err", "iters", "converged"), r.row())) for r in recs]}
    if isinstance(g, RadialGrid) and g.N >= 3:
        results["lambda_one_exact"] = closedform.lambda_1q_ball(g.N, float(p["q"]))
    if cfg.emit_plots:
        svg.line_chart({"Lambda_{p,q}": ([r.p for r in recs], [r.lam for r in recs])}, out / "sweep_p.svg",
                       title="p -> 1 sweep", xlabel="p", ylabel="lambda",
                       hlines={"Lambda_{1,q} (grid)": one.lam})
    return results


def run_sweep_beta(cfg, out):
    from .asymptotics import beta_sweep, check_limit_ball, write_beta_csv

    p = cfg.parameters
    g = _grid(cfg)
    recs, sols = beta_sweep(g, float(p["alpha"]), p["beta_list"], r_min=p["r_min"])
    write_beta_csv(recs, out / "sweep_beta.csv")
    write_field_csv(sols[-1].U, out / "U_last.csv")
    write_field_csv(sols[-1].V, out / "V_last.csv")
    report = check_limit_ball(recs, p["N"], float(p["alpha"]), p["tolerances"])
    results = {"records": report.numbers["records"], "check": report.to_json(),
               "solutions": [s.to_json() for s in sols]}
    if cfg.emit_plots:
        b = [r.beta for r in recs]
        svg.line_chart({"sup_err_U": (b, [r.sup_err_U for r in recs]), "sup_err_V": (b, [r.sup_err_V for r in recs])},
                       out / "sweep_beta_errors.svg", title="distance to the limit profiles", xlabel="beta",
                       ylabel="sup error", logy=True)
        svg.line_chart({"tv_U": (b, [r.tv_U for r in recs])}, out / "sweep_beta_tv.svg", title="|Delta U|_1",
                       xlabel="beta", ylabel="tv", hlines={"kappa": report.numbers["kappa"]})
    return results


def run_spinning_top(cfg, out):
    from .experiments import spinning_top_root

    res = spinning_top_root(float(cfg.parameters["q"]))
    results = res.to_json()
    results["model"] = "fundamental solution |x|^{-1} on the axisymmetric spinning top (heuristic)"
    return results


def run_faber_krahn(cfg, out, jobs):
    from .experiments import faber_krahn_compare

    p = cfg.parameters
    return faber_krahn_compare(cfg.domain, float(p["q"]), p["resolution"], stride=p["stride"], jobs=jobs).to_json()


def run_verify(cfg, out):
    from . import acceptance

    sel = cfg.parameters["criteria"]
    outcomes = acceptance.run_all(set(sel) if sel else None)
    for o in outcomes:
        print(o.line())
    return {
        "passed": all(o.passed for o in outcomes),
        "criteria": [{"number": o.number, "title": o.title, "passed": o.passed, "detail": o.detail} for o in outcomes],
    }, {f"criterion_{o.number}": o.seconds for o in outcomes}


def versions() -> dict:
    import scipy

    return {
        "lanemden": __version__,
        "kernels": kernels.BACKEND,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def _dump(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n")


def run(cfg: RunConfig, jobs: int = 1) -> int:
    """Execute one command and write ``results.json``; returns the exit code."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    timings = {}
    doc = {"command": cfg.command, "config_echo": cfg.echo, "versions": versions()}
    code = 0
    try:
        if cfg.command == "ball":
            results = run_ball(cfg, out)
        elif cfg.command == "green":
            results = run_green(cfg, out, jobs)
        elif cfg.command == "eigen":
            results = run_eigen(cfg, out)
        elif cfg.command == "sweep-p":
            results = run_sweep_p(cfg, out, jobs)
        elif cfg.command == "sweep-beta":
            results = run_sweep_beta(cfg, out)
        elif cfg.command == "spinning-top":
            results = run_spinning_top(cfg, out)
        elif cfg.command == "faber-krahn":
            results = run_faber_krahn(cfg, out, jobs)
        else:
            results, timings = run_verify(cfg, out)
            code = 0 if results["passed"] else 1
        doc["results"] = results
    except LanemdenError as exc:
        doc["results"] = None
        doc["error"] = {"type": type(exc).__name__, "message": str(exc)}
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = 1
    timings["total"] = time.perf_counter() - t0
    doc["timings"] = timings
    _dump(out / "results.json", doc)
    return code


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lanemden", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS, help="command (or take it from --config)")
    ap.add_argument("--config", help="JSON configuration file")
    ap.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                    help="set a parameter (value parsed as JSON); repeatable")
    ap.add_argument("--domain", help="domain as a JSON object, e.g. '{\"kind\": \"disc\", \"radius\": 1}'")
    ap.add_argument("--out", help="output directory (default from config, else ./out)")
    ap.add_argument("--jobs", type=int, default=1, help="worker threads for independent solves")
    ap.add_argument("--plots", action="store_true", help="write SVG plots")
    ap.add_argument("--seed", type=int, help="seed for random initial profiles")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.config:
            text = Path(args.config).read_text()
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        else:
            obj = {}
        if args.command:
            if "command" in obj and obj["command"] != args.command:
                raise ConfigInvalid("command", f"config says {obj['command']!r}, command line says {args.command!r}")
            obj["command"] = args.command
        if args.param:
            params = dict(obj.get("parameters", {}) or {})
            for item in args.param:
                name, sep, value = item.partition("=")
                if not sep:
                    raise ConfigInvalid(item, "expected NAME=VALUE")
                params[name] = _parse_value(value)
            obj["parameters"] = params
        if args.domain:
            try:
                obj["domain"] = json.loads(args.domain)
            except json.JSONDecodeError as exc:
                raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        if args.out:
            obj["output_dir"] = args.out
        if args.plots:
            obj["emit_plots"] = True
        if args.seed is not None:
            obj["seed"] = args.seed
        if args.jobs < 1:
            raise ConfigInvalid("jobs", "must be >= 1")
        cfg = build_config(obj)
    except (ParseError, ConfigInvalid) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg, jobs=args.jobs)


if __name__ == "__main__":
    sys.exit(main())
