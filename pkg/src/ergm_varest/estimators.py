"""Estimation of (theta_edge, theta_match, beta) from one observed network.

Three routes: maximum pseudo-likelihood (logistic fit of link indicators on
per-pair change statistics), variational MLE (simplex search on the
profile objective Q(g; theta) - n^2 psi_mf(theta)), and Monte Carlo MLE
(importance-ratio approximation against a reference parameter). Each is
available both as a plain function returning an EstimationResult and as an
sklearn-style estimator with fit(X, y) where X is the adjacency matrix and
y the node-type vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logsumexp
from sklearn.base import BaseEstimator

from ._validation import check_adjacency, check_types
from .errors import SeparationError
from .meanfield import solve_mf
from .model import ModelParams, ParametricAlpha, sufficient_stats
from .sampler import ChainConfig, UniformKernel, sample_chain

PARAM_NAMES = ("theta_edge", "theta_match", "beta")
_RUNAWAY_NORM = 25.0


@dataclass(frozen=True)
class EstimationResult:
    theta_hat: np.ndarray
    objective_at_opt: float
    method: str
    converged: bool
    iterations: int
    diagnostics: dict = field(default_factory=dict)


def change_statistics(adj, types) -> np.ndarray:
    """Per-pair covariates x_ij with theta . x_ij equal to the potential change
    from toggling the pair on: (2, 2*1{same type}, (deg_i + deg_j + 1)/n),
    degrees excluding the pair itself. Pairs in upper-triangle order."""
    a = check_adjacency(adj)
    n = a.shape[0]
    t = check_types(types, n)
    iu = np.triu_indices(n, 1)
    deg = a.sum(axis=1).astype(float)
    g = a[iu].astype(float)
    di = deg[iu[0]] - g
    dj = deg[iu[1]] - g
    same = (t[iu[0]] == t[iu[1]]).astype(float)
    return np.column_stack([np.full(g.shape[0], 2.0), 2.0 * same, (di + dj + 1.0) / n])


def pair_outcomes(adj) -> np.ndarray:
    a = check_adjacency(adj)
    iu = np.triu_indices(a.shape[0], 1)
    return a[iu].astype(float)


def _pseudo_loglik(theta, X, y):
    z = X @ theta
    return float(y @ z - np.logaddexp(0.0, z).sum())


def mple(
    adj,
    types,
    tol: float = 1e-8,
    max_iter: int = 100,
    columns: tuple = ("theta_edge", "theta_match", "beta"),
) -> EstimationResult:
    """Maximum pseudo-likelihood by damped Newton iterations.

    Collinear columns (for example theta_match with a single node type) are
    detected through pivoted-QR rank screening and dropped; their entries in
    theta_hat are nan. Columns excluded via `columns` are profiled at zero.
    An empty or complete graph raises SeparationError.
    """
    a = check_adjacency(adj)
    y = pair_outcomes(a)
    if y.sum() == 0 or y.sum() == y.shape[0]:
        raise SeparationError("pseudo-likelihood diverges on an empty or complete graph")

    X_full = change_statistics(a, types)
    requested = [k for k, name in enumerate(PARAM_NAMES) if name in columns]
    if not requested:
        raise ValueError("at least one column must be included")
    X = X_full[:, requested]

    # rank screening: drop dependent columns (pivoted QR orders columns by
    # independence; trailing near-zero pivots are redundant)
    from scipy.linalg import qr

    _, R, piv = qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > 1e-10 * max(diag[0], 1.0)))
    kept = sorted(requested[k] for k in piv[:rank])
    dropped = [PARAM_NAMES[requested[k]] for k in sorted(piv[rank:])]
    X = X_full[:, kept]

    theta = np.zeros(len(kept))
    trace = [_pseudo_loglik(theta, X, y)]
    converged = False
    singular = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        p = expit(X @ theta)
        grad = X.T @ (y - p)
        if np.abs(grad).max() <= tol:
            converged = True
            iterations -= 1
            break
        W = p * (1.0 - p)
        H = (X * W[:, None]).T @ X
        try:
            step = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            singular = True
            break
        # backtracking keeps the objective monotone
        lam = 1.0
        base = trace[-1]
        while lam > 1e-12:
            cand = theta + lam * step
            val = _pseudo_loglik(cand, X, y)
            if val >= base:
                break
            lam *= 0.5
        theta = theta + lam * step
        trace.append(_pseudo_loglik(theta, X, y))

    theta_hat = np.zeros(3)  # columns profiled at zero stay 0
    for pos, col in enumerate(kept):
        theta_hat[col] = theta[pos]
    for name in dropped:
        theta_hat[PARAM_NAMES.index(name)] = np.nan

    diagnostics: dict = {
        "objective_trace": trace,
        "dropped": dropped,
        "profiled_at_zero": [n_ for n_ in PARAM_NAMES if n_ not in columns],
    }
    if converged and not singular:
        p = expit(X @ theta)
        H = (X * (p * (1 - p))[:, None]).T @ X
        try:
            cov = np.linalg.inv(H)
            se = np.full(3, np.nan)
            for pos, col in enumerate(kept):
                se[col] = np.sqrt(cov[pos, pos])
            diagnostics["se"] = se
        except np.linalg.LinAlgError:
            pass
    if singular:
        diagnostics["singular_hessian"] = True

    return EstimationResult(
        theta_hat=theta_hat,
        objective_at_opt=trace[-1],
        method="MPLE",
        converged=converged and not singular,
        iterations=iterations,
        diagnostics=diagnostics,
    )


def _default_start(adj, types) -> np.ndarray:
    try:
        res = mple(adj, types)
        start = np.where(np.isnan(res.theta_hat), 0.0, res.theta_hat)
        return start
    except SeparationError:
        return np.zeros(3)


def mf_mle(
    adj,
    types,
    restarts: int = 5,
    mf_tol: float = 1e-8,
    max_sweeps: int = 600,
    seed: int = 0,
    xatol: float = 1e-5,
    fatol: float = 1e-6,
    maxfev: int = 500,
    start=None,
    rule: str = "conditional",
    fix_beta: float | None = None,
) -> EstimationResult:
    """Variational MLE: simplex maximization of Q(g; theta) - n^2 psi_mf(theta).

    The inner solve uses `restarts` restarts and a theta-independent seed, so
    the outer objective is deterministic; the outer search is Nelder-Mead from
    the pseudo-likelihood estimate (gradients are unreliable here), with a
    coordinate pattern-search refinement if the simplex stalls. A fit sliding
    to extreme parameters (sup-norm above 25) is flagged non-converged: with
    balanced two-type covariates the objective has an exactly flat tilted
    direction and can be unbounded along it.
    """
    a = check_adjacency(adj)
    n = a.shape[0]
    t = check_types(types, n)
    t_obs = sufficient_stats(a, t).as_vector(n)
    theta0 = _default_start(a, t) if start is None else np.asarray(start, dtype=float)

    def full_theta(x):
        if fix_beta is None:
            return np.asarray(x, dtype=float)
        return np.array([x[0], x[1], fix_beta])

    def negll(x):
        th = full_theta(x)
        params = ModelParams(ParametricAlpha(th[0], th[1]), th[2])
        res = solve_mf(
            t, params, restarts=restarts, tol=mf_tol, max_sweeps=max_sweeps,
            seed=seed, rule=rule, track_objective=False,
        )
        return -(th @ t_obs - n * n * res.psi_mf)

    x0 = theta0 if fix_beta is None else theta0[:2]
    opt = minimize(
        negll, x0, method="Nelder-Mead",
        options=dict(xatol=xatol, fatol=fatol, maxfev=maxfev),
    )
    theta, best = full_theta(opt.x), opt.fun
    refined = False
    if not opt.success:
        # pattern-search fallback: coordinate steps with halving radius.
        # Hard eval budget: along the flat ridge of the balanced-two-type
        # objective improvements never stop, so an uncapped search drifts.
        x = np.asarray(opt.x, dtype=float)
        radius = 0.1
        budget = 120
        while radius >= 1e-4 and budget > 0 and np.abs(x).max() <= _RUNAWAY_NORM:
            improved = False
            for k in range(x.shape[0]):
                for sgn in (1.0, -1.0):
                    cand = x.copy()
                    cand[k] += sgn * radius
                    val = negll(cand)
                    budget -= 1
                    if val < best - 1e-12:
                        x, best = cand, val
                        improved = True
            if not improved:
                radius /= 2.0
            refined = True
        theta = full_theta(x)

    runaway = bool(np.abs(theta).max() > _RUNAWAY_NORM)
    converged = bool((opt.success or refined) and not runaway)
    return EstimationResult(
        theta_hat=theta,
        objective_at_opt=-best,
        method="MFMLE",
        converged=converged,
        iterations=int(opt.nit),
        diagnostics={
            "nfev": int(opt.nfev),
            "restarts": restarts,
            "rule": rule,
            "runaway": runaway,
            "pattern_refined": refined,
            "start": theta0,
        },
    )


def mc_mle(
    adj,
    types,
    theta0=None,
    n_samples: int = 1000,
    burn_in: int | None = None,
    thin: int | None = None,
    seed: int = 0,
    ess_floor: float = 0.02,
) -> EstimationResult:
    """Monte Carlo MLE via the importance-ratio approximation at a reference
    parameter (defaults to the pseudo-likelihood estimate).

    Maximizes (theta - theta0) . t(g) - log mean_s exp((theta - theta0) . t_s)
    over samples t_s drawn at theta0. Convergence is refused when the
    effective sample size of the weights falls below ess_floor * n_samples,
    the expected failure mode near the slow-mixing region.
    """
    a = check_adjacency(adj)
    n = a.shape[0]
    t = check_types(types, n)
    if theta0 is None:
        theta0 = _default_start(a, t)
    theta0 = np.asarray(theta0, dtype=float)
    if burn_in is None:
        burn_in = 100 * n * n
    if thin is None:
        thin = 20 * n * n

    t_obs = sufficient_stats(a, t).as_vector(n)
    params0 = ModelParams(ParametricAlpha(theta0[0], theta0[1]), theta0[2])
    cfg = ChainConfig(burn_in=burn_in, thin=thin, seed=seed)
    graphs = sample_chain(cfg, UniformKernel(), t, params0, count=n_samples, n=n)
    t_s = np.array([sufficient_stats(g, t).as_vector(n) for g in graphs])

    def neg(th):
        d = th - theta0
        z = t_s @ d
        lse = logsumexp(z) - np.log(n_samples)
        w = np.exp(z - logsumexp(z))
        val = d @ t_obs - lse
        grad = t_obs - w @ t_s
        return -val, -grad

    # the ratio approximation is only trustworthy near the reference point;
    # a box keeps weight collapse from sending the search to infinity
    bounds = [(th - 10.0, th + 10.0) for th in theta0]
    opt = minimize(neg, theta0, jac=True, method="L-BFGS-B", bounds=bounds,
                   options=dict(maxiter=500))
    _, grad = neg(opt.x)
    grad_ok = bool(np.abs(grad).max() <= 1e-6 * max(1.0, np.abs(t_obs).max()))
    z = t_s @ (opt.x - theta0)
    w = np.exp(z - logsumexp(z))
    ess = float(1.0 / (w**2).sum()) if np.isfinite(w).all() else 0.0
    at_bound = bool(any(np.isclose(opt.x[k], b).any() for k, b in enumerate(bounds)))
    converged = bool(
        (opt.success or grad_ok) and not at_bound and ess >= ess_floor * n_samples
    )
    return EstimationResult(
        theta_hat=opt.x,
        objective_at_opt=float(-opt.fun),
        method="MCMLE",
        converged=converged,
        iterations=int(opt.nit),
        diagnostics={
            "ess": ess,
            "n_samples": n_samples,
            "theta0": theta0,
            "ess_floor": ess_floor,
            "optimizer_success": bool(opt.success),
        },
    )


class _FittedMixin:
    """Shared fitted-attribute wiring for the estimator classes."""

    def _finish(self, result: EstimationResult):
        self.result_ = result
        self.theta_ = result.theta_hat
        self.converged_ = result.converged
        self.n_iter_ = result.iterations
        return self


class MPLEstimator(BaseEstimator, _FittedMixin):
    """Pseudo-likelihood estimator. fit(X, y): X adjacency matrix, y node types."""

    def __init__(self, tol=1e-8, max_iter=100, columns=PARAM_NAMES):
        self.tol = tol
        self.max_iter = max_iter
        self.columns = columns

    def fit(self, X, y):
        return self._finish(mple(X, y, tol=self.tol, max_iter=self.max_iter, columns=self.columns))


class MeanFieldMLE(BaseEstimator, _FittedMixin):
    """Variational MLE. fit(X, y): X adjacency matrix, y node types."""

    def __init__(
        self, restarts=5, mf_tol=1e-8, max_sweeps=600, seed=0,
        xatol=1e-5, fatol=1e-6, maxfev=500, rule="conditional",
    ):
        self.restarts = restarts
        self.mf_tol = mf_tol
        self.max_sweeps = max_sweeps
        self.seed = seed
        self.xatol = xatol
        self.fatol = fatol
        self.maxfev = maxfev
        self.rule = rule

    def fit(self, X, y):
        return self._finish(
            mf_mle(
                X, y, restarts=self.restarts, mf_tol=self.mf_tol,
                max_sweeps=self.max_sweeps, seed=self.seed, xatol=self.xatol,
                fatol=self.fatol, maxfev=self.maxfev, rule=self.rule,
            )
        )


class MonteCarloMLE(BaseEstimator, _FittedMixin):
    """Importance-sampled MLE. fit(X, y): X adjacency matrix, y node types."""

    def __init__(self, n_samples=1000, burn_in=None, thin=None, seed=0, ess_floor=0.02):
        self.n_samples = n_samples
        self.burn_in = burn_in
        self.thin = thin
        self.seed = seed
        self.ess_floor = ess_floor

    def fit(self, X, y):
        return self._finish(
            mc_mle(
                X, y, n_samples=self.n_samples, burn_in=self.burn_in,
                thin=self.thin, seed=self.seed, ess_floor=self.ess_floor,
            )
        )
