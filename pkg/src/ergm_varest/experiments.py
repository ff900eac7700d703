"""Monte Carlo harness: estimator comparison tables and phase-diagram sweeps."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import balanced_two_types
from .errors import NonConvergenceError, SeparationError
from .estimators import PARAM_NAMES, mc_mle, mf_mle, mple
from .graphon import phase_threshold, two_group_solve
from .model import ModelParams, ParametricAlpha
from .sampler import ChainConfig, UniformKernel, sample_chain

METHODS = ("MPLE", "MFMLE", "MCMLE")
PERCENTILES = ("median", "p5", "p25", "p75", "p95")


@dataclass(frozen=True)
class ExperimentConfig:
    true_theta: tuple
    n: int
    replications: int
    methods: tuple = ("MPLE", "MFMLE")
    seed: int = 0
    burn_in: int | None = None  # default: 500 n^2
    mcmle_samples: int = 300
    mcmle_thin: int | None = None  # default: 5 n^2
    workers: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.n < 10:
            raise ValueError("n must be >= 10")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {METHODS}")


@dataclass(frozen=True)
class PercentileTable:
    """Per method and parameter: median/p5/p25/p75/p95 plus the count of
    non-converged replications (excluded from the percentiles)."""

    stats: dict
    nonconverged: dict
    replications: int

    def rows(self):
        """Flat rows (method, param, median, p5, p25, p75, p95, n_nonconverged)."""
        out = []
        for method in self.stats:
            for param in PARAM_NAMES:
                cell = self.stats[method][param]
                out.append(
                    {
                        "method": method,
                        "param": param,
                        **{p: cell[p] for p in PERCENTILES},
                        "n_nonconverged": self.nonconverged[method],
                    }
                )
        return out


def _replication_seeds(seed: int, count: int) -> list[int]:
    ss = np.random.SeedSequence(seed)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in ss.spawn(count)]


def _one_replication(rep_seed: int, config: ExperimentConfig, types):
    theta = np.asarray(config.true_theta, dtype=float)
    params = ModelParams(ParametricAlpha(theta[0], theta[1]), theta[2])
    n = config.n
    burn = config.burn_in if config.burn_in is not None else 500 * n * n
    cfg = ChainConfig(burn_in=burn, thin=100 * n * n, seed=rep_seed)
    adj = sample_chain(cfg, UniformKernel(), types, params, count=1, n=n)[0]

    out = {}
    for method in config.methods:
        if method == "MPLE":
            try:
                out[method] = mple(adj, types)
            except SeparationError:
                out[method] = None
        elif method == "MFMLE":
            out[method] = mf_mle(adj, types, seed=rep_seed)
        elif method == "MCMLE":
            thin = config.mcmle_thin if config.mcmle_thin is not None else 5 * n * n
            try:
                out[method] = mc_mle(
                    adj, types, n_samples=config.mcmle_samples, thin=thin, seed=rep_seed
                )
            except SeparationError:
                out[method] = None
    return out


def run_experiment(config: ExperimentConfig) -> PercentileTable:
    """Replicate sample-then-estimate; aggregate percentiles per method/parameter.

    Non-converged fits (and fits whose estimate is undefined) are excluded from
    the percentiles and counted. Deterministic for a given config; replications
    run concurrently when workers > 1 with per-replication derived seeds.
    """
    types = balanced_two_types(config.n)
    seeds = _replication_seeds(config.seed, config.replications)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda s: _one_replication(s, config, types), seeds))
    else:
        results = [_one_replication(s, config, types) for s in seeds]

    stats: dict = {}
    noncv: dict = {}
    for method in config.methods:
        thetas = []
        bad = 0
        for r in results:
            res = r[method]
            if res is None or not res.converged or np.isnan(res.theta_hat).any():
                bad += 1
                continue
            thetas.append(res.theta_hat)
        if not thetas:
            raise NonConvergenceError(f"every replication failed to converge for {method}")
        arr = np.array(thetas)
        stats[method] = {}
        for k, name in enumerate(PARAM_NAMES):
            col = arr[:, k]
            stats[method][name] = {
                "median": float(np.median(col)),
                "p5": float(np.percentile(col, 5)),
                "p25": float(np.percentile(col, 25)),
                "p75": float(np.percentile(col, 75)),
                "p95": float(np.percentile(col, 95)),
            }
        noncv[method] = bad
    return PercentileTable(stats=stats, nonconverged=noncv, replications=config.replications)


@dataclass(frozen=True)
class PhaseCell:
    alpha_diff: float
    beta: float
    n_maximizers: int
    u_star: float
    v_star: float


def phase_diagram_sweep(alpha_diff_grid, beta_grid) -> list[PhaseCell]:
    """Two-group solve over a grid restricted to the plane alpha1+alpha2+beta=0.

    For each (d, beta): alpha1 = (d - beta)/2, alpha2 = -beta - alpha1 (so the
    plane holds to rounding); records the number of global maximizers and the
    sparse-most maximizer's coordinates.
    """
    ds = np.asarray(alpha_diff_grid, dtype=float)
    bs = np.asarray(beta_grid, dtype=float)
    if ds.size == 0 or bs.size == 0:
        raise ValueError("grids must be non-empty")
    cells = []
    for d in ds:
        for b in bs:
            a1 = (d - b) / 2.0
            a2 = -b - a1
            sol = two_group_solve(a1, a2, b)
            best = min(sol.global_maximizers, key=lambda p: p.u, default=None)
            cells.append(
                PhaseCell(
                    alpha_diff=float(d),
                    beta=float(b),
                    n_maximizers=len(sol.global_maximizers),
                    u_star=float(best.u) if best else float("nan"),
                    v_star=float(best.v) if best else float("nan"),
                )
            )
    return cells


def boundary_consistent(cells: list[PhaseCell], beta_grid) -> bool:
    """Check the maximizer count flips across the threshold within one grid cell."""
    bs = np.sort(np.asarray(beta_grid, dtype=float))
    if bs.shape[0] < 2:
        return True
    step = float(np.max(np.diff(bs)))
    by_d: dict = {}
    for c in cells:
        by_d.setdefault(c.alpha_diff, []).append(c)
    for d, col in by_d.items():
        col.sort(key=lambda c: c.beta)
        thr = phase_threshold(d)
        for c in col:
            expected = 2 if c.beta > thr else 1
            if c.n_maximizers != expected and abs(c.beta - thr) > step:
                return False
    return True
