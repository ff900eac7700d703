"""Shared fixtures and independent brute-force oracles.

The oracles here recompute quantities with plain loops/enumeration, never
through the library code paths they are used to check.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

import ergm_varest as ev


def brute_potential(adj, alpha, beta):
    """Literal ordered-index sums: sum_ij alpha g + (beta/2n) sum_ijk g g."""
    a = np.asarray(adj, dtype=float)
    n = a.shape[0]
    q = 0.0
    for i in range(n):
        for j in range(n):
            q += alpha[i, j] * a[i, j]
    s = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s += a[i, j] * a[j, k]
    return q + beta / (2.0 * n) * s


def brute_utility(adj, i, alpha, beta):
    a = np.asarray(adj, dtype=float)
    n = a.shape[0]
    u = 0.0
    for j in range(n):
        u += alpha[i, j] * a[i, j]
    s = 0.0
    for j in range(n):
        for k in range(n):
            s += a[i, j] * a[j, k]
    return u + beta / n * s


def brute_psi(n, alpha, beta):
    """Enumeration over all graphs with itertools, independent of the library."""
    iu = list(zip(*np.triu_indices(n, 1)))
    vals = []
    for bits in itertools.product((0, 1), repeat=len(iu)):
        adj = np.zeros((n, n))
        for b, (i, j) in zip(bits, iu):
            adj[i, j] = adj[j, i] = b
        vals.append(brute_potential(adj, alpha, beta))
    vals = np.array(vals)
    m = vals.max()
    return (m + np.log(np.exp(vals - m).sum())) / n**2


def random_graph(rng, n, p=0.5):
    adj = np.zeros((n, n), dtype=bool)
    iu = np.triu_indices(n, 1)
    adj[iu] = rng.random(iu[0].shape[0]) < p
    return adj | adj.T


def random_symmetric_alpha(rng, n, scale=2.0):
    a = rng.uniform(-scale, scale, size=(n, n))
    a = (a + a.T) / 2.0
    return a


def params_full(alpha, beta):
    return ev.ModelParams(ev.FullAlpha(alpha), beta)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture(scope="session")
def table1_experiment():
    """n=50 comparison at truth (-2, 1, 2): 100 replications, three methods.

    Shared by the experiment invariants and the acceptance gate (criterion 5
    and the width-ordering property). Returns (table, wall_seconds).
    """
    import time

    config = ev.ExperimentConfig(
        true_theta=(-2.0, 1.0, 2.0),
        n=50,
        replications=100,
        methods=("MPLE", "MFMLE", "MCMLE"),
        seed=20260809,
        mcmle_samples=300,
    )
    t0 = time.perf_counter()
    table = ev.run_experiment(config)
    return table, time.perf_counter() - t0


@pytest.fixture(scope="session")
def n100_experiment():
    """n=100 sanity run at truth (-2, 1, 2): 100 replications, three methods."""
    config = ev.ExperimentConfig(
        true_theta=(-2.0, 1.0, 2.0),
        n=100,
        replications=100,
        methods=("MPLE", "MFMLE", "MCMLE"),
        seed=77,
        mcmle_samples=200,
        mcmle_thin=3 * 100 * 100,
    )
    return ev.run_experiment(config)


@pytest.fixture(scope="session")
def concentration_runs():
    """50 independent chains of the two-group model at n=100, beta <= 2;
    returns (per-chain block densities, limit point, wall_seconds)."""
    import time

    theta = (-1.0, 0.5, 1.0)
    n = 100
    types = ev.balanced_two_types(n)
    params = ev.ModelParams(ev.ParametricAlpha(theta[0], theta[1]), theta[2])
    sol = ev.two_group_solve(theta[0] + theta[1], theta[0], theta[2])
    assert len(sol.global_maximizers) == 1
    m = sol.global_maximizers[0]
    same = types[:, None] == types[None, :]
    off = ~np.eye(n, dtype=bool)
    rows = []
    t0 = time.perf_counter()
    for chain in range(50):
        cfg = ev.ChainConfig(burn_in=500 * n * n, thin=1, seed=9000 + chain)
        adj = ev.sample_chain(cfg, ev.UniformKernel(), types, params, count=1, n=n)[0]
        rows.append((adj[same & off].mean(), adj[~same].mean()))
    return np.array(rows), (m.u, m.v), time.perf_counter() - t0
