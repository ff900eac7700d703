"""Limit-problem solvers: closed forms, univariate and two-group programs,
block sandwich bounds, and stationarity residuals.

The limiting variational problem maximizes, over symmetric kernels h on
[0,1]^2 with values in [0,1],

    int alpha h + (beta/2) int (int h dy)^2 dx - (1/2) int I(h),

with I(x) = x log x + (1-x) log(1-x). Piecewise-constant alpha reduces it to
finite-dimensional programs solved here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, xlogy

from ._validation import check_boundaries, check_symmetric_matrix
from .model import BlockAlpha

GRID_POINTS = 10_000
_ROOT_XTOL = 1e-13
_DEDUPE = 1e-9


def entropy_I(x):
    """I(x) = x log x + (1-x) log(1-x), with I(0) = I(1) = 0."""
    x = np.asarray(x, dtype=float)
    val = xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)
    return val if val.ndim else float(val)


def _bracketed_roots(f, lo: float, hi: float) -> list[float]:
    """All simple roots of f on [lo, hi] via a dense grid plus bracketing."""
    xs = np.linspace(lo, hi, GRID_POINTS + 1)
    vals = f(xs)
    roots = []
    for k in range(xs.shape[0] - 1):
        a, b = vals[k], vals[k + 1]
        if a == 0.0:
            roots.append(float(xs[k]))
        elif a * b < 0.0:
            roots.append(float(brentq(f, xs[k], xs[k + 1], xtol=_ROOT_XTOL)))
    if vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    out = []
    for r in sorted(roots):
        if not out or r - out[-1] > _DEDUPE:
            out.append(r)
    return out


@dataclass(frozen=True)
class BlockGraphon:
    """Piecewise-constant symmetric kernel with values in [0,1]."""

    boundaries: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = check_boundaries(self.boundaries)
        v = check_symmetric_matrix(self.values, "graphon values")
        if v.shape[0] != b.shape[0] - 1:
            raise ValueError("graphon value matrix must be MxM for M = len(boundaries) - 1")
        if (v < 0).any() or (v > 1).any():
            raise ValueError("graphon values must lie in [0, 1]")
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "values", v)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.boundaries)


def psi_beta_zero(alpha: BlockAlpha) -> float:
    """Closed form at beta = 0: (1/2) sum_{m,l} w_m w_l log(1 + e^{2 alpha_ml})."""
    w = alpha.widths
    return 0.5 * float((np.outer(w, w) * np.logaddexp(0.0, 2.0 * alpha.values)).sum())


@dataclass(frozen=True)
class UnivariateStationaryPoint:
    x: float
    value: float
    stable: bool  # reported flag: beta * x * (1 - x) < 1


@dataclass(frozen=True)
class UnivariateSolution:
    x_star: float
    value: float
    stationary: list


def univariate_solver(alpha: float, beta: float) -> UnivariateSolution:
    """Maximize alpha*x + (beta/2)x^2 - I(x)/2 on [0,1].

    Stationary points solve x = sigmoid(2(alpha + beta x)); they are located by
    a dense grid plus bracketed root refinement, the objective is compared at
    every stationary point and both endpoints, and each stationary point
    carries the stability flag beta*x*(1-x) < 1.
    """
    if not (np.isfinite(alpha) and np.isfinite(beta)):
        raise ValueError("alpha and beta must be finite")

    def gap(x):
        return expit(2.0 * (alpha + beta * np.asarray(x, dtype=float))) - x

    def objective(x):
        return alpha * x + 0.5 * beta * x * x - 0.5 * entropy_I(x)

    roots = _bracketed_roots(gap, 0.0, 1.0)
    stationary = [
        UnivariateStationaryPoint(x=r, value=float(objective(r)), stable=beta * r * (1 - r) < 1)
        for r in roots
    ]
    candidates = [(p.value, p.x) for p in stationary]
    candidates += [(float(objective(0.0)), 0.0), (float(objective(1.0)), 1.0)]
    value, x_star = max(candidates, key=lambda c: c[0])
    return UnivariateSolution(x_star=x_star, value=value, stationary=stationary)


def extreme_homophily_psi(boundaries, diag_alphas, beta: float) -> float:
    """Limit value when cross-group benefits are driven to -infinity.

    Each group solves its own univariate problem: a constant kernel x on a
    width-w block contributes w^2 [alpha x + (beta w / 2) x^2 - I(x)/2], so
    the two-star weight enters scaled by the block width:
    sum_m w_m^2 * univariate(alpha_mm, beta * w_m).
    """
    b = check_boundaries(boundaries)
    a = np.asarray(diag_alphas, dtype=float)
    if a.shape[0] != b.shape[0] - 1:
        raise ValueError("need one diagonal benefit per block")
    w = np.diff(b)
    return float(
        sum(w[m] ** 2 * univariate_solver(a[m], beta * w[m]).value for m in range(a.shape[0]))
    )


@dataclass(frozen=True)
class TwoGroupStationaryPoint:
    u: float
    v: float
    f_value: float
    hessian_class: str  # "max" | "saddle" | "min"
    gamma: float


@dataclass(frozen=True)
class TwoGroupSolution:
    gamma_roots: list
    stationary_points: list
    global_maximizers: list
    psi: float
    phase_transition: bool
    beta_threshold: float
    alpha1: float
    alpha2: float
    beta: float


def two_group_F(u, v, alpha1: float, alpha2: float, beta: float):
    """Objective of the balanced two-group program."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    val = (
        0.5 * alpha1 * u
        - 0.25 * entropy_I(u)
        + 0.5 * alpha2 * v
        - 0.25 * entropy_I(v)
        + 0.125 * beta * (u + v) ** 2
    )
    return val if val.ndim else float(val)


def two_group_G(gamma, alpha1: float, alpha2: float, beta: float):
    """Aggregate stationarity gap: sum of the two conditional densities minus gamma."""
    g = np.asarray(gamma, dtype=float)
    val = expit(2.0 * alpha1 + beta * g) + expit(2.0 * alpha2 + beta * g) - g
    return val if val.ndim else float(val)


def phase_threshold(alpha_diff: float) -> float:
    """Two-star weight above which (on the plane alpha1+alpha2+beta=0) the
    program acquires two global maximizers: (1+e^d)^2 / (2 e^d) = 1 + cosh(d)."""
    if not np.isfinite(alpha_diff):
        raise ValueError("alpha difference must be finite")
    return 1.0 + float(np.cosh(alpha_diff))


def _classify(u: float, v: float, beta: float) -> str:
    if beta <= 0.0:
        return "max"
    eta = u * (1.0 - u) + v * (1.0 - v)
    return "max" if eta < 1.0 / beta else "saddle"


def two_group_solve(alpha1: float, alpha2: float, beta: float) -> TwoGroupSolution:
    """Solve the balanced two-group program.

    Roots of the aggregate stationarity gap on [0, 2] (gamma = u + v) are
    located by grid plus bracketing, mapped to (u, v), classified through the
    Hessian condition u(1-u) + v(1-v) vs 1/beta, and compared on the objective
    together with the four corners of the unit square.
    """
    if not all(np.isfinite([alpha1, alpha2, beta])):
        raise ValueError("parameters must be finite")

    roots = _bracketed_roots(lambda g: two_group_G(g, alpha1, alpha2, beta), 0.0, 2.0)
    points = []
    for g in roots:
        u = float(expit(2.0 * alpha1 + beta * g))
        v = float(expit(2.0 * alpha2 + beta * g))
        points.append(
            TwoGroupStationaryPoint(
                u=u,
                v=v,
                f_value=two_group_F(u, v, alpha1, alpha2, beta),
                hessian_class=_classify(u, v, beta),
                gamma=g,
            )
        )

    corner_best = max(
        two_group_F(u, v, alpha1, alpha2, beta) for u in (0.0, 1.0) for v in (0.0, 1.0)
    )
    stationary_best = max((p.f_value for p in points), default=-np.inf)
    psi = max(corner_best, stationary_best)
    maximizers = [p for p in points if p.f_value >= stationary_best - 1e-10]

    threshold = phase_threshold(alpha1 - alpha2)
    on_plane = abs(alpha1 + alpha2 + beta) <= 1e-12
    return TwoGroupSolution(
        gamma_roots=roots,
        stationary_points=points,
        global_maximizers=maximizers,
        psi=psi,
        phase_transition=bool(on_plane and beta > threshold),
        beta_threshold=threshold,
        alpha1=alpha1,
        alpha2=alpha2,
        beta=beta,
    )


@dataclass(frozen=True)
class BlockBounds:
    lower: float
    upper: float
    argmax_lower: BlockGraphon = field(repr=False)


def _row_functional(u_row, alpha_row, w, beta):
    s = float(w @ u_row)
    return float(w @ (alpha_row * u_row)) + 0.5 * beta * s * s - 0.5 * float(w @ entropy_I(u_row))


def _block_value(u, alpha, w, beta):
    return float(sum(w[m] * _row_functional(u[m], alpha[m], w, beta) for m in range(w.shape[0])))


def _ascend_symmetric(u, alpha, w, beta, tol=1e-12, max_sweeps=20000):
    M = w.shape[0]
    for _ in range(max_sweeps):
        delta = 0.0
        s = u @ w
        for m in range(M):
            for l in range(m, M):
                new = float(expit(2.0 * alpha[m, l] + beta * (s[m] + s[l])))
                d = new - u[m, l]
                if d != 0.0:
                    s[m] += w[l] * d
                    if l != m:
                        s[l] += w[m] * d
                    u[m, l] = u[l, m] = new
                delta = max(delta, abs(d))
        if delta < tol:
            break
    return u


def _ascend_row(u_row, alpha_row, w, beta, tol=1e-12, max_sweeps=20000):
    M = w.shape[0]
    for _ in range(max_sweeps):
        delta = 0.0
        s = float(w @ u_row)
        for l in range(M):
            new = float(expit(2.0 * alpha_row[l] + 2.0 * beta * s))
            d = new - u_row[l]
            s += w[l] * d
            u_row[l] = new
            delta = max(delta, abs(d))
        if delta < tol:
            break
    return u_row


def block_bounds(
    alpha: BlockAlpha, beta: float, multistarts: int = 16, seed: int = 0
) -> BlockBounds:
    """Finite-dimensional sandwich for the limiting value.

    Lower: best symmetric block kernel (coordinate ascent with the closed-form
    logistic update, multistart). Upper: per-row suprema of the same row
    functional with symmetry not enforced; each row search is also seeded with
    the lower argmax's row, which guarantees lower <= upper.
    """
    w = alpha.widths
    a = alpha.values
    M = w.shape[0]
    rng = np.random.default_rng(seed)

    starts = [np.full((M, M), float(expit(2.0 * a.mean()))), np.full((M, M), 0.05),
              np.full((M, M), 0.95)]
    while len(starts) < max(multistarts, 3):
        r = rng.random((M, M))
        starts.append((r + r.T) / 2.0)

    best_val, best_u = -np.inf, None
    for u0 in starts[: max(multistarts, 3)]:
        u = _ascend_symmetric(u0.copy(), a, w, beta)
        val = _block_value(u, a, w, beta)
        if val > best_val:
            best_val, best_u = val, u

    upper = 0.0
    for m in range(M):
        row_best = -np.inf
        row_starts = [best_u[m].copy()] + [s[m].copy() for s in starts[: max(multistarts, 3)]]
        for r0 in row_starts:
            r_opt = _ascend_row(r0, a[m], w, beta)
            row_best = max(row_best, _row_functional(r_opt, a[m], w, beta))
        upper += w[m] * row_best

    return BlockBounds(
        lower=best_val,
        upper=float(upper),
        argmax_lower=BlockGraphon(alpha.boundaries, np.clip(best_u, 0.0, 1.0)),
    )


def euler_lagrange_residual(h: BlockGraphon, alpha: BlockAlpha, beta: float) -> float:
    """Sup-norm stationarity residual of a block kernel:
    max_{m,l} |2 alpha_ml + beta (s_m + s_l) - logit(u_ml)| with s_m = sum_k w_k u_mk."""
    if not np.array_equal(h.boundaries, alpha.boundaries):
        raise ValueError("graphon and benefit function must share block boundaries")
    u = h.values
    if (u <= 0).any() or (u >= 1).any():
        raise ValueError("stationarity residual needs values strictly inside (0, 1)")
    w = h.widths
    s = u @ w
    logit = np.log(u / (1.0 - u))
    resid = np.abs(2.0 * alpha.values + beta * (s[:, None] + s[None, :]) - logit)
    return float(resid.max())
