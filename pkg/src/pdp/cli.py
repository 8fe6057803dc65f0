"""Command-line front end: batch runs, manifests, CSV/JSON artifacts.

Subcommands: evaluate, optimize, sweep, simulate, gradcheck, filter.
All runs are driven by a JSON config (see config.DEFAULTS); flags override
individual fields.  Outputs are CSV for arrays and JSON for manifests,
formatted deterministically so identical configs reproduce files
byte-identically.

Exit codes: 0 success, 2 domain error (no bound state, infeasible point),
3 solver failure, 4 configuration error.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import datetime
import json
import os
import sys

import numpy as np

from . import __version__, fgr, optimizer, timedomain
from .config import builders, load_config
from .errors import ConfigError, PdpError, SolverFailure
from .grid import Grid, PotentialField, h1_norm_sq, trapz
from .spectral import distorted_plane_waves, solve_ground_state, wronskian_at_zero

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4


def _fmt(value) -> str:
    """Deterministic shortest-roundtrip cell formatting."""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: str, obj: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


class Emitter:
    """Collects written artifact names for the run manifest."""

    def __init__(self, out_dir: str | None):
        self.out_dir = out_dir
        self.outputs: list[str] = []
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)

    def csv(self, name: str, header: list[str], rows) -> None:
        if self.out_dir is None:
            return
        _write_csv(os.path.join(self.out_dir, name), header, rows)
        self.outputs.append(name)

    def manifest(self, command: str, cfg: dict, headline: dict) -> None:
        if self.out_dir is None:
            return
        doc = {
            "command": command,
            "config": cfg,
            "version": __version__,
            "generated": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "outputs": sorted(self.outputs),
            "headline": headline,
        }
        _write_json(os.path.join(self.out_dir, "manifest.json"), doc)


def _load_potential_csv(path: str, grid: Grid, a: float) -> PotentialField:
    """Read an (x, V) CSV and sample it onto the working grid."""
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read potential file {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"potential file {path} is not (x,V) CSV: {exc}") from exc
    if data.shape[1] < 2:
        raise ConfigError(f"potential file {path} needs x and V columns")
    vals = np.interp(grid.x, data[:, 0], data[:, 1], left=0.0, right=0.0)
    vals = np.where(np.abs(grid.x) <= a, vals, 0.0)
    return PotentialField(grid, vals, a)


def _resolve_potential(cfg: dict, grid: Grid, path: str | None) -> PotentialField:
    if path is None:
        return builders.initial_potential(cfg, grid)
    return _load_potential_csv(path, grid, float(cfg["design"]["a"]))


def _emit_potential_artifacts(em: Emitter, V: PotentialField, params, res) -> None:
    x = V.grid.x
    em.csv("V_opt.csv", ["x", "V"], zip(x, V.values))
    em.csv("psi.csv", ["x", "psi"], zip(x, res.bound_state.psi))
    ks = np.linspace(0.1, 4.0, 40)
    rows = []
    for k in ks:
        st = distorted_plane_waves(V, float(k))
        rows.append((k, abs(st.t) ** 2, st.t.real, st.t.imag))
    em.csv("transmission.csv", ["k", "t_sq", "re_t", "im_t"], rows)


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config)
    grid = builders.grid(cfg)
    params = builders.design(cfg, grid)
    V = _resolve_potential(cfg, grid, args.potential)
    res = fgr.gamma(V, params)
    wr = wronskian_at_zero(V, params.wronskian_tol)
    diag = res.diagnostics()
    diag.update(
        {
            "w0": wr.w0,
            "wronskian_variance": wr.variance,
            "margin_resonance": res.bound_state.lam + params.mu,
            "margin_wronskian": wr.w0**2 - params.delta,
            "margin_h1": params.b**2 - h1_norm_sq(V),
            "n_bound_states": res.bound_state.count_negative_eigenvalues,
        }
    )
    for key in sorted(diag):
        print(f"{key} = {_fmt(diag[key])}")
    em = Emitter(args.out)
    if args.out:
        _emit_potential_artifacts(em, V, params, res)
        em.manifest("evaluate", cfg, diag)
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    if args.symmetric:
        cfg["optimizer"]["symmetric"] = True
    grid = builders.grid(cfg)
    params = builders.design(cfg, grid)
    opts = builders.opt_options(cfg)
    V0 = _resolve_potential(cfg, grid, args.potential)
    gamma_init = fgr.gamma(V0, params).gamma
    out = optimizer.optimize(V0, params, opts)
    headline = {
        "gamma_init": gamma_init,
        "gamma_opt": out.result.gamma,
        "lambda": out.result.bound_state.lam,
        "k_res": out.result.k_res,
        "iterations": out.iterations,
        "status": out.status,
        "mechanism": optimizer.classify_mechanism(out.result),
        "margins": list(out.margins),
    }
    print(
        f"gamma: {_fmt(gamma_init)} -> {_fmt(out.result.gamma)} "
        f"in {out.iterations} iterations ({out.status})"
    )
    em = Emitter(args.out)
    if args.out:
        trace_cols = [
            "iter",
            "tau",
            "gamma",
            "barrier_value",
            "grad_norm",
            "step_length",
            "margin_resonance",
            "margin_wronskian",
            "margin_h1",
            "wronskian_variance",
        ]
        em.csv(
            "trace.csv",
            trace_cols,
            ([rec[c] for c in trace_cols] for rec in out.trace.iterates),
        )
        _emit_potential_artifacts(em, out.V_opt, params, out.result)
        em.manifest("optimize", cfg, headline)
    return EXIT_OK


def _sweep_entry(job):
    label, cfg = job
    grid = builders.grid(cfg)
    params = builders.design(cfg, grid)
    opts = builders.opt_options(cfg)
    V0 = builders.initial_potential(cfg, grid)
    return optimizer.sweep([(label, V0, params, opts)])[0]


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    vary = args.vary or cfg["sweep"]["vary"]
    if args.values:
        values = [float(v) for v in args.values.split(",")]
    else:
        values = [float(v) for v in cfg["sweep"]["values"]]
    if vary not in ("a", "mu", "b", "delta"):
        raise ConfigError(f"cannot sweep over {vary!r} (one of a, mu, b, delta)")
    jobs = []
    for v in values:
        sub = json.loads(json.dumps(cfg))
        sub["design"][vary] = v
        jobs.append((f"{vary}={_fmt(v)}", sub))
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            runs = list(pool.map(_sweep_entry, jobs))
    else:
        runs = [_sweep_entry(j) for j in jobs]
    em = Emitter(args.out)
    rows = []
    for value, run in zip(values, runs):
        rows.append(
            (
                run.label,
                value,
                "" if run.gamma_init is None else _fmt(run.gamma_init),
                "" if run.gamma_opt is None else _fmt(run.gamma_opt),
                run.iterations,
                run.mechanism or "",
                run.error or "",
            )
        )
        print(
            f"{run.label}: gamma_opt="
            + ("failed: " + run.error if run.error else _fmt(run.gamma_opt))
        )
    if args.out:
        em.csv(
            "summary.csv",
            ["label", vary, "gamma_init", "gamma_opt", "iterations", "mechanism", "error"],
            rows,
        )
        for run in runs:
            if run.potential is not None:
                name = f"V_opt_{run.label.replace('=', '_')}.csv"
                em.csv(name, ["x", "V"], zip(run.potential.grid.x, run.potential.values))
        em.manifest(
            "sweep",
            cfg,
            {
                "vary": vary,
                "values": values,
                "gamma_opt": [r.gamma_opt for r in runs],
                "errors": [r.error for r in runs],
            },
        )
    return EXIT_OK


def _sim_inputs(cfg, args):
    sim = builders.sim_config(cfg)
    grid = builders.grid(cfg)
    a = float(cfg["design"]["a"])
    V_design = _resolve_potential(cfg, grid, args.potential)
    V = timedomain.resample_potential(V_design, sim.domain)
    hw = float(cfg["design"]["beta_halfwidth"])
    if cfg["design"]["beta_mode"] == "equals_v":
        beta = V
    else:
        beta = PotentialField(
            sim.domain, np.where(np.abs(sim.domain.x) <= hw, 1.0, 0.0), a
        )
    return sim, V, beta


def _emit_sim(em: Emitter, cfg: dict, command: str, result) -> None:
    em.csv(
        "projection.csv",
        ["t", "projection_sq", "norm"],
        zip(result.times, result.projection_sq, result.norm),
    )
    em.manifest(
        command,
        cfg,
        {
            "final_projection_sq": float(result.projection_sq[-1]),
            "initial_projection_sq": float(result.projection_sq[0]),
            "fitted_rate": None if np.isnan(result.fitted_rate) else result.fitted_rate,
        },
    )


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    sim, V, beta = _sim_inputs(cfg, args)
    psi = solve_ground_state(V).psi
    result = timedomain.propagate(V, beta, psi.astype(np.complex128), sim)
    try:
        window = tuple(cfg["simulator"]["fit_window"])
        result.fitted_rate = timedomain.fit_decay_rate(result, window)
    except ValueError:
        pass  # non-positive data or empty window: rate stays nan
    print(
        f"projection_sq: {_fmt(result.projection_sq[0])} -> {_fmt(result.projection_sq[-1])}"
        + ("" if np.isnan(result.fitted_rate) else f", fitted rate {_fmt(result.fitted_rate)}")
    )
    em = Emitter(args.out)
    if args.out:
        _emit_sim(em, cfg, "simulate", result)
    return EXIT_OK


def cmd_filter(args) -> int:
    cfg = load_config(args.config)
    sim, V, beta = _sim_inputs(cfg, args)
    amp = float(cfg["simulator"]["noise_amplitude"])
    seed = int(cfg["simulator"]["seed"]) if args.seed is None else args.seed
    result = timedomain.filter_experiment(V, beta, sim, amp, seed)
    retained = result.projection_sq[-1] / result.projection_sq[0]
    print(f"projection retained: {_fmt(retained)}")
    em = Emitter(args.out)
    if args.out:
        _emit_sim(em, cfg, "filter", result)
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    cfg = load_config(args.config)
    grid = builders.grid(cfg)
    params = builders.design(cfg, grid)
    gc = cfg["gradcheck"]
    rng = np.random.default_rng(int(gc["seed"]))
    eps = float(gc["fd_step"])
    n_dir = int(gc["n_directions"])
    V = builders.initial_potential(cfg, grid)
    x = grid.x
    a = params.a

    def bump():
        c = rng.uniform(-0.7 * a, 0.7 * a)
        width = rng.uniform(0.5, 2.0)
        w = np.exp(-(((x - c) / width) ** 2))
        return np.where(np.abs(x) <= a, w, 0.0)

    res = fgr.gamma(V, params)
    wr = wronskian_at_zero(V, params.wronskian_tol)
    fields = {
        "gamma": (fgr.gamma_gradient(V, params, res), lambda W: fgr.gamma(W, params).gamma),
        "lambda": (
            fgr.lambda_gradient(V, res.bound_state),
            lambda W: solve_ground_state(W).lam,
        ),
        "k": (fgr.k_gradient(V, params, res), lambda W: fgr.gamma(W, params).k_res),
        "wronskian": (fgr.wronskian_gradient(V, wr), lambda W: wronskian_at_zero(W).w0),
    }
    worst = {}
    for name, (gfield, functional) in fields.items():
        errs = []
        for _ in range(n_dir):
            w = bump()
            fp = functional(V.with_values(V.values + eps * w))
            fm = functional(V.with_values(V.values - eps * w))
            fd = (fp - fm) / (2 * eps)
            an = gfield.pair(w)
            errs.append(abs(fd - an) / max(abs(fd), 1e-300))
        worst[name] = max(errs)
    failed = False
    for name in sorted(worst):
        ok = worst[name] < 1e-3
        failed |= not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: max relative error {worst[name]:.3e}")
    if args.out:
        em = Emitter(args.out)
        em.manifest("gradcheck", cfg, {"max_relative_errors": worst, "passed": not failed})
    return 1 if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pdp",
        description="Design of Schrodinger potentials minimizing the "
        "golden-rule decay rate of a forced bound state.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_required=False):
        p.add_argument("--config", help="JSON config file (defaults used if omitted)")
        p.add_argument("--out", required=out_required, help="output directory for artifacts")

    p = sub.add_parser("evaluate", help="Gamma and diagnostics for one potential")
    common(p)
    p.add_argument("--potential", help="(x,V) CSV; default: sech well from config")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="barrier L-BFGS minimization of Gamma")
    common(p, out_required=False)
    p.add_argument("--potential", help="starting potential CSV (default: config init)")
    p.add_argument("--symmetric", action="store_true", help="optimize in the symmetric subspace")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="independent optimize runs over a parameter")
    common(p)
    p.add_argument("--vary", help="design field to vary (a, mu, b, delta)")
    p.add_argument("--values", help="comma-separated values")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="time-domain propagation from the bound state")
    common(p)
    p.add_argument("--potential", help="(x,V) CSV; default: sech well from config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("filter", help="noisy-start filtering experiment")
    common(p)
    p.add_argument("--potential", help="(x,V) CSV; default: sech well from config")
    p.add_argument("--seed", type=int, help="noise seed (overrides config)")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("gradcheck", help="finite-difference validation of gradients")
    common(p)
    p.set_defaults(func=cmd_gradcheck)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except PdpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
