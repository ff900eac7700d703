"""Hot loops (single-link chain updates, Gauss-Seidel sweeps), jit-compiled.

The chain kernel consumes pre-drawn uniforms so all randomness stays in the
caller's numpy generator; results are bitwise reproducible for a given seed.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _sigmoid(z):
    if z >= 0.0:
        return 1.0 / (1.0 + np.exp(-z))
    e = np.exp(z)
    return e / (1.0 + e)


@njit(cache=True, nogil=True)
def run_chain(adj, deg, alpha2, beta_over_n, pair_i, pair_j, cum_weights, u_pair, u_link):
    """Advance the one-link-at-a-time chain in place for len(u_pair) steps.

    adj: int8 (n, n) symmetric, zero diagonal; deg: int64 degrees (kept in sync);
    alpha2: 2*alpha matrix; cum_weights: cumulative pair probabilities (len P),
    cum_weights[-1] == 1.
    """
    npairs = pair_i.shape[0]
    for t in range(u_pair.shape[0]):
        # inverse-CDF draw of the meeting pair
        u = u_pair[t]
        lo, hi = 0, npairs - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if cum_weights[mid] > u:
                hi = mid
            else:
                lo = mid + 1
        p = lo
        i = pair_i[p]
        j = pair_j[p]
        g = adj[i, j]
        dq = alpha2[i, j] + beta_over_n * (deg[i] + deg[j] + 1 - 2 * g)
        new = 1 if u_link[t] < _sigmoid(dq) else 0
        if new != g:
            adj[i, j] = new
            adj[j, i] = new
            d = new - g
            deg[i] += d
            deg[j] += d


@njit(cache=True, nogil=True)
def mf_sweep_conditional(mu, rowsum, alpha2, beta_over_n, pair_i, pair_j):
    """One Gauss-Seidel pass of the exact-moment update; returns sup |change|.

    mu_ij <- sigmoid(2 alpha_ij + (beta/n) (r_i + r_j + 1 - 2 mu_ij)): the
    one-link conditional with neighbours at their current means. Exact
    per-coordinate maximizer of the product-family lower bound.
    """
    md = 0.0
    for p in range(pair_i.shape[0]):
        i = pair_i[p]
        j = pair_j[p]
        old = mu[i, j]
        z = alpha2[i, j] + beta_over_n * (rowsum[i] + rowsum[j] + 1.0 - 2.0 * old)
        x = _sigmoid(z)
        d = x - old
        mu[i, j] = x
        mu[j, i] = x
        rowsum[i] += d
        rowsum[j] += d
        if d < 0.0:
            d = -d
        if d > md:
            md = d
    return md


@njit(cache=True, nogil=True)
def mf_sweep_quadratic(mu, rowsum, alpha2, beta_over_n, pair_i, pair_j):
    """One Gauss-Seidel pass of the first-order-condition update; returns sup |change|.

    mu_ij <- sigmoid(2 alpha_ij + (beta/n) (r_i + r_j)), row sums passing
    through the matrix itself (the k-sum keeps the k=i, k=j terms as mu).
    """
    md = 0.0
    for p in range(pair_i.shape[0]):
        i = pair_i[p]
        j = pair_j[p]
        z = alpha2[i, j] + beta_over_n * (rowsum[i] + rowsum[j])
        x = _sigmoid(z)
        d = x - mu[i, j]
        mu[i, j] = x
        mu[j, i] = x
        rowsum[i] += d
        rowsum[j] += d
        if d < 0.0:
            d = -d
        if d > md:
            md = d
    return md


@njit(cache=True, nogil=True)
def mf_solve_conditional(mu, alpha2, beta_over_n, pair_i, pair_j, tol, max_sweeps):
    """Sweep the exact-moment update to tolerance; returns (sweeps, last delta).

    Row sums are refreshed from the matrix at every sweep, so incremental
    float drift cannot accumulate across sweeps.
    """
    n = mu.shape[0]
    rowsum = np.empty(n)
    sweeps = 0
    delta = 0.0
    for sweeps in range(1, max_sweeps + 1):
        for b in range(n):
            s = 0.0
            for k in range(n):
                s += mu[b, k]
            rowsum[b] = s
        delta = mf_sweep_conditional(mu, rowsum, alpha2, beta_over_n, pair_i, pair_j)
        if delta < tol:
            break
    return sweeps, delta


@njit(cache=True, nogil=True)
def mf_solve_quadratic(mu, alpha2, beta_over_n, pair_i, pair_j, tol, max_sweeps):
    """Sweep the first-order-condition update to tolerance; see above."""
    n = mu.shape[0]
    rowsum = np.empty(n)
    sweeps = 0
    delta = 0.0
    for sweeps in range(1, max_sweeps + 1):
        for b in range(n):
            s = 0.0
            for k in range(n):
                s += mu[b, k]
            rowsum[b] = s
        delta = mf_sweep_quadratic(mu, rowsum, alpha2, beta_over_n, pair_i, pair_j)
        if delta < tol:
            break
    return sweeps, delta
