"""One-link-at-a-time chain simulation and its exact small-n oracle.

Each step draws a pair from the meeting kernel and sets the link with
probability sigmoid(dQ), the surplus-maximizing choice under a logistic
shock. The stationary law is proportional to exp(Q) regardless of the
kernel, which the exact transition-matrix oracle verifies at tiny n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import expit

from ._kernels import run_chain
from ._validation import check_adjacency, check_types
from .errors import ResourceLimitError
from .model import ModelParams, enumerate_potentials, potential_difference
from scipy.special import logsumexp

EXACT_CHAIN_MAX_N = 4
_CHUNK = 1 << 20


@dataclass(frozen=True)
class UniformKernel:
    """All pairs meet with equal probability."""

    def pair_probabilities(self, n: int) -> np.ndarray:
        npairs = n * (n - 1) // 2
        return np.full(npairs, 1.0 / npairs)


@dataclass(frozen=True)
class WeightedKernel:
    """Meeting probabilities proportional to a symmetric positive matrix."""

    rho: np.ndarray

    def pair_probabilities(self, n: int) -> np.ndarray:
        r = np.asarray(self.rho, dtype=float)
        if r.shape != (n, n):
            raise ValueError(f"rho must be {n}x{n}, got {r.shape}")
        if not np.array_equal(r, r.T):
            raise ValueError("rho must be symmetric")
        iu = np.triu_indices(n, 1)
        w = r[iu]
        if (w <= 0).any():
            raise ValueError("every pair must have strictly positive meeting probability")
        return w / w.sum()


MeetingKernel = Union[UniformKernel, WeightedKernel]


@dataclass(frozen=True)
class ChainConfig:
    """Chain protocol knobs; defaults for data generation scale as 500n^2 / 100n^2."""

    burn_in: int
    thin: int
    seed: int
    initial: object = "empty"  # "empty" | "full" | ("random", p) | adjacency

    def __post_init__(self):
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")

    @staticmethod
    def for_data_generation(n: int, seed: int) -> "ChainConfig":
        return ChainConfig(burn_in=500 * n * n, thin=100 * n * n, seed=seed)


def _initial_state(initial, n: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(initial, str):
        if initial == "empty":
            return np.zeros((n, n), dtype=bool)
        if initial == "full":
            return ~np.eye(n, dtype=bool)
        raise ValueError(f"unknown initial state {initial!r}")
    if isinstance(initial, tuple) and len(initial) == 2 and initial[0] == "random":
        p = float(initial[1])
        iu = np.triu_indices(n, 1)
        adj = np.zeros((n, n), dtype=bool)
        adj[iu] = rng.random(iu[0].shape[0]) < p
        return adj | adj.T
    return check_adjacency(initial, n)


def glauber_step(adj, kernel: MeetingKernel, types, params: ModelParams, rng) -> np.ndarray:
    """One meeting-and-revision step; returns the new state (input untouched)."""
    a = check_adjacency(adj)
    n = a.shape[0]
    probs = kernel.pair_probabilities(n)
    iu = np.triu_indices(n, 1)
    p = rng.choice(probs.shape[0], p=probs)
    i, j = int(iu[0][p]), int(iu[1][p])
    dq = potential_difference(a, i, j, types, params)
    out = a.copy()
    link = rng.random() < expit(dq)
    out[i, j] = out[j, i] = link
    return out


def _chain_arrays(n: int, types, params: ModelParams, kernel: MeetingKernel):
    alpha2 = 2.0 * params.resolve_alpha(n, types)
    iu = np.triu_indices(n, 1)
    pair_i = iu[0].astype(np.int64)
    pair_j = iu[1].astype(np.int64)
    cumw = np.cumsum(kernel.pair_probabilities(n))
    cumw[-1] = 1.0  # guard against cumulative rounding
    return alpha2, pair_i, pair_j, cumw


def _advance(adj8, deg, steps, alpha2, beta_over_n, pair_i, pair_j, cumw, rng):
    left = steps
    while left > 0:
        m = min(left, _CHUNK)
        run_chain(adj8, deg, alpha2, beta_over_n, pair_i, pair_j, cumw, rng.random(m), rng.random(m))
        left -= m


def sample_chain(
    config: ChainConfig,
    kernel: MeetingKernel,
    types,
    params: ModelParams,
    count: int,
    n: int | None = None,
) -> np.ndarray:
    """Run burn_in steps, then record `count` states, `thin` steps apart.

    States are recorded at steps burn_in + k*thin for k = 0..count-1 (the first
    sample lands right after burn-in). Returns a (count, n, n) boolean array;
    trajectories are bitwise deterministic for a given seed.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if n is None:
        if isinstance(config.initial, (str, tuple)):
            raise ValueError("n is required unless the initial state is an explicit matrix")
        n = np.asarray(config.initial).shape[0]
    t = check_types(types, n)
    rng = np.random.default_rng(config.seed)
    adj = _initial_state(config.initial, n, rng)
    alpha2, pair_i, pair_j, cumw = _chain_arrays(n, t, params, kernel)
    beta_over_n = params.beta / n
    adj8 = adj.astype(np.int8)
    deg = adj8.sum(axis=1).astype(np.int64)

    out = np.empty((count, n, n), dtype=bool)
    _advance(adj8, deg, config.burn_in, alpha2, beta_over_n, pair_i, pair_j, cumw, rng)
    out[0] = adj8.astype(bool)
    for k in range(1, count):
        _advance(adj8, deg, config.thin, alpha2, beta_over_n, pair_i, pair_j, cumw, rng)
        out[k] = adj8.astype(bool)
    return out


@dataclass(frozen=True)
class StationaryOracle:
    """Exact stationary law two ways, plus their maximum absolute discrepancy."""

    pi_chain: np.ndarray
    pi_gibbs: np.ndarray
    discrepancy: float
    transition_matrix: np.ndarray = field(repr=False)


def exact_stationary_distribution(
    n: int, kernel: MeetingKernel, types, params: ModelParams
) -> StationaryOracle:
    """Stationary vector of the one-step transition matrix vs exp(Q)/Z (n <= 4)."""
    if n > EXACT_CHAIN_MAX_N:
        raise ResourceLimitError(
            f"exact chain oracle is capped at n={EXACT_CHAIN_MAX_N} (64 states); got n={n}"
        )
    t = check_types(types, n)
    q = enumerate_potentials(n, t, params)
    nstates = q.shape[0]
    iu = np.triu_indices(n, 1)
    npairs = iu[0].shape[0]
    probs = kernel.pair_probabilities(n)

    alpha = params.resolve_alpha(n, t)
    P = np.zeros((nstates, nstates))
    codes = np.arange(nstates)
    bits = ((codes[:, None] >> np.arange(npairs)) & 1).astype(bool)
    inc = np.zeros((npairs, n), dtype=np.int64)
    inc[np.arange(npairs), iu[0]] = 1
    inc[np.arange(npairs), iu[1]] = 1
    degs = bits.astype(np.int64) @ inc
    for p in range(npairs):
        i, j = int(iu[0][p]), int(iu[1][p])
        g = bits[:, p].astype(np.int64)
        di = degs[:, i] - g
        dj = degs[:, j] - g
        dq = 2.0 * alpha[i, j] + params.beta / n * (di + dj + 1.0)
        p_on = expit(dq)
        to_on = codes | (1 << p)
        to_off = codes & ~(1 << p)
        np.add.at(P, (codes, to_on), probs[p] * p_on)
        np.add.at(P, (codes, to_off), probs[p] * (1.0 - p_on))

    # stationary vector: solve pi (P - I) = 0 with sum(pi) = 1
    A = np.vstack([P.T - np.eye(nstates), np.ones(nstates)])
    b = np.zeros(nstates + 1)
    b[-1] = 1.0
    pi_chain, *_ = np.linalg.lstsq(A, b, rcond=None)

    pi_gibbs = np.exp(q - logsumexp(q))
    disc = float(np.abs(pi_chain - pi_gibbs).max())
    return StationaryOracle(
        pi_chain=pi_chain, pi_gibbs=pi_gibbs, discrepancy=disc, transition_matrix=P
    )
