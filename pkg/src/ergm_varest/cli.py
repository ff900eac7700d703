"""Command-line entry point: simulate / meanfield / solve2group / phase-sweep /
estimate / montecarlo, with a run manifest accompanying every persisted output.

Exit codes: 0 success, 2 invalid input, 3 resource limit exceeded,
4 non-convergence when --fail-on-nonconvergence is set.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io as _io
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NonConvergenceError, ResourceLimitError
from .estimators import PARAM_NAMES, mc_mle, mf_mle, mple
from .experiments import ExperimentConfig, phase_diagram_sweep, run_experiment
from .graphon import two_group_solve
from .io import read_graph_tsv, read_params_json, resolve_types_arg, write_graph_tsv
from .meanfield import solve_mf
from .model import sufficient_stats
from .sampler import ChainConfig, UniformKernel, sample_chain

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_RESOURCE = 3
EXIT_NONCONVERGED = 4


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(directory: Path, subcommand: str, config: dict, seed, outputs, wall_time):
    manifest = {
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "artifact_version": __version__,
        "wall_time_s": wall_time,
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2, default=str) + "\n")
    return path


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _cmd_simulate(args) -> int:
    params = read_params_json(args.params)
    types = resolve_types_arg(args.types, args.n)
    n = args.n
    burn = args.burnin if args.burnin is not None else 500 * n * n
    thin = args.thin if args.thin is not None else 100 * n * n
    cfg = ChainConfig(burn_in=burn, thin=thin, seed=args.seed)
    t0 = time.perf_counter()
    samples = sample_chain(cfg, UniformKernel(), types, params, count=args.count, n=n)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    trace_rows = []
    for k, adj in enumerate(samples):
        p = out / f"sample_{k:04d}.tsv"
        write_graph_tsv(p, adj)
        files.append(p)
        st = sufficient_stats(adj, types)
        trace_rows.append((burn + k * thin, st.edges, st.match_edges, st.twostar_sum))
    trace = out / "trace.csv"
    with trace.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "edges", "match_edges", "twostar_sum"])
        w.writerows(trace_rows)
    files.append(trace)
    cfg_dict = {
        "n": n, "params": args.params, "types": args.types,
        "burnin": burn, "thin": thin, "count": args.count,
    }
    _write_manifest(out, "simulate", cfg_dict, args.seed, files, time.perf_counter() - t0)
    print(f"wrote {args.count} samples to {out}")
    return EXIT_OK


def _cmd_meanfield(args) -> int:
    params = read_params_json(args.params)
    types = resolve_types_arg(args.types, args.n)
    t0 = time.perf_counter()
    res = solve_mf(
        types, params, restarts=args.restarts, tol=args.tol,
        max_sweeps=args.max_sweeps, seed=args.seed, rule=args.rule,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = {
        "psi_mf": res.psi_mf,
        "iterations": res.iterations,
        "restarts_used": res.restarts_used,
        "converged": res.converged,
        "restart_index": res.restart_index,
        "rule": args.rule,
    }
    rj = out / "result.json"
    rj.write_text(json.dumps(result, sort_keys=True, indent=2) + "\n")
    mu_path = out / "mu.csv"
    np.savetxt(mu_path, res.mu_star, delimiter=",", fmt="%.17g")
    cfg_dict = {
        "n": args.n, "params": args.params, "types": args.types,
        "restarts": args.restarts, "tol": args.tol, "rule": args.rule,
    }
    _write_manifest(out, "meanfield", cfg_dict, args.seed, [rj, mu_path],
                    time.perf_counter() - t0)
    print(json.dumps(result, sort_keys=True))
    if args.fail_on_nonconvergence and not res.converged:
        raise NonConvergenceError("mean-field solve did not converge")
    return EXIT_OK


def _two_group_json(sol) -> dict:
    return {
        "alpha1": sol.alpha1,
        "alpha2": sol.alpha2,
        "beta": sol.beta,
        "gamma_roots": sol.gamma_roots,
        "stationary_points": [
            {"u": p.u, "v": p.v, "F": p.f_value, "class": p.hessian_class, "gamma": p.gamma}
            for p in sol.stationary_points
        ],
        "global_maximizers": [
            {"u": p.u, "v": p.v, "F": p.f_value} for p in sol.global_maximizers
        ],
        "psi": sol.psi,
        "phase_transition": sol.phase_transition,
        "beta_threshold": sol.beta_threshold,
    }


def _cmd_solve2group(args) -> int:
    t0 = time.perf_counter()
    sol = two_group_solve(args.alpha1, args.alpha2, args.beta)
    text = json.dumps(_two_group_json(sol), sort_keys=True, indent=2)
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        rj = out / "result.json"
        rj.write_text(text + "\n")
        cfg = {"alpha1": args.alpha1, "alpha2": args.alpha2, "beta": args.beta}
        _write_manifest(out, "solve2group", cfg, None, [rj], time.perf_counter() - t0)
    return EXIT_OK


def _parse_range(spec: str) -> tuple[float, float]:
    try:
        lo, hi = spec.split(":")
        return float(lo), float(hi)
    except ValueError as exc:
        raise ValueError(f"range must be lo:hi, got {spec!r}") from exc


def _cmd_phase_sweep(args) -> int:
    t0 = time.perf_counter()
    dlo, dhi = _parse_range(args.alpha_diff_range)
    blo, bhi = _parse_range(args.beta_range)
    ds = np.linspace(dlo, dhi, args.grid)
    bs = np.linspace(blo, bhi, args.grid)
    cells = phase_diagram_sweep(ds, bs)
    buf = _io.StringIO()
    w = csv.writer(buf)
    w.writerow(["alpha_diff", "beta", "n_maximizers", "u_star", "v_star"])
    for c in cells:
        w.writerow([f"{c.alpha_diff:.17g}", f"{c.beta:.17g}", c.n_maximizers,
                    f"{c.u_star:.17g}", f"{c.v_star:.17g}"])
    text = buf.getvalue()
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        p = out / "sweep.csv"
        p.write_text(text)
        cfg = {"alpha_diff_range": args.alpha_diff_range, "beta_range": args.beta_range,
               "grid": args.grid}
        _write_manifest(out, "phase-sweep", cfg, None, [p], time.perf_counter() - t0)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    t0 = time.perf_counter()
    adj = read_graph_tsv(args.graph)
    types = resolve_types_arg(args.types, adj.shape[0])
    if args.method == "mple":
        res = mple(adj, types)
    elif args.method == "mfmle":
        res = mf_mle(adj, types, seed=args.seed)
    else:
        res = mc_mle(adj, types, n_samples=args.samples, seed=args.seed)
    payload = {
        "theta_hat": dict(zip(PARAM_NAMES, res.theta_hat)),
        "objective_at_opt": res.objective_at_opt,
        "method": res.method,
        "converged": res.converged,
        "iterations": res.iterations,
        "diagnostics": {k: v for k, v in res.diagnostics.items()},
    }
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n")
    manifest = {
        "subcommand": "estimate",
        "config": {"graph": args.graph, "types": args.types, "method": args.method},
        "seed": args.seed,
        "artifact_version": __version__,
        "wall_time_s": time.perf_counter() - t0,
        "outputs": {out.name: _sha256(out)},
    }
    Path(str(out) + ".manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    )
    print(json.dumps(payload, sort_keys=True, default=_json_default))
    if args.fail_on_nonconvergence and not res.converged:
        raise NonConvergenceError(f"{args.method} did not converge")
    return EXIT_OK


def _cmd_montecarlo(args) -> int:
    t0 = time.perf_counter()
    raw = json.loads(Path(args.config).read_text())
    cfg = ExperimentConfig(
        true_theta=tuple(raw["true_theta"]),
        n=int(raw["n"]),
        replications=int(raw["replications"]),
        methods=tuple(raw.get("methods", ["MPLE", "MFMLE"])),
        seed=int(raw.get("seed", 0)),
        burn_in=raw.get("burn_in"),
        mcmle_samples=int(raw.get("mcmle_samples", 300)),
        mcmle_thin=raw.get("mcmle_thin"),
        workers=args.threads,
    )
    table = run_experiment(cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "param", "median", "p5", "p25", "p75", "p95", "n_nonconverged"])
        for row in table.rows():
            w.writerow([row["method"], row["param"],
                        *(f"{row[p]:.17g}" for p in ("median", "p5", "p25", "p75", "p95")),
                        row["n_nonconverged"]])
    manifest = {
        "subcommand": "montecarlo",
        "config": raw,
        "seed": cfg.seed,
        "artifact_version": __version__,
        "wall_time_s": time.perf_counter() - t0,
        "outputs": {out.name: _sha256(out)},
    }
    Path(str(out) + ".manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    )
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergm-varest",
        description="Edge/two-star network-formation model: simulation, "
        "variational solvers, estimation.",
    )
    parser.add_argument(
        "--threads", type=int,
        default=int(os.environ.get("ERGM_VAREST_THREADS", "1")),
        help="worker cap for concurrent module operations",
    )
    sub = parser.add_subparsers(dest="subcommand")

    p = sub.add_parser("simulate", help="sample networks from the formation chain")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--params", required=True, help="model parameter JSON file")
    p.add_argument("--types", default="balanced2", help="types file or 'balanced2'")
    p.add_argument("--burnin", type=int, default=None)
    p.add_argument("--thin", type=int, default=None)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("meanfield", help="variational lower-bound solve")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--types", default="balanced2")
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-sweeps", type=int, default=10000)
    p.add_argument("--rule", choices=["conditional", "quadratic"], default="conditional")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--fail-on-nonconvergence", action="store_true")

    p = sub.add_parser("solve2group", help="balanced two-group limit solver")
    p.add_argument("--alpha1", type=float, required=True)
    p.add_argument("--alpha2", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("phase-sweep", help="maximizer counts over a parameter grid")
    p.add_argument("--alpha-diff-range", required=True, help="lo:hi")
    p.add_argument("--beta-range", required=True, help="lo:hi")
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--out", default=None)

    p = sub.add_parser("estimate", help="fit parameters to an observed network")
    p.add_argument("--graph", required=True, help="TSV edge list")
    p.add_argument("--types", required=True, help="types file or 'balanced2'")
    p.add_argument("--method", choices=["mple", "mfmle", "mcmle"], required=True)
    p.add_argument("--samples", type=int, default=1000, help="MC-MLE sample count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output JSON file")
    p.add_argument("--fail-on-nonconvergence", action="store_true")

    p = sub.add_parser("montecarlo", help="replicated estimator comparison")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", required=True, help="output CSV file")

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0,) else EXIT_OK
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return EXIT_INVALID
    handler = {
        "simulate": _cmd_simulate,
        "meanfield": _cmd_meanfield,
        "solve2group": _cmd_solve2group,
        "phase-sweep": _cmd_phase_sweep,
        "estimate": _cmd_estimate,
        "montecarlo": _cmd_montecarlo,
    }[args.subcommand]
    try:
        return handler(args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
