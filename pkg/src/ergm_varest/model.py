"""Edge/two-star network-formation model: parameters, potential, exact oracles.

A state is a symmetric boolean adjacency matrix with zero diagonal. Pairwise
benefits alpha_ij come in three flavours (full matrix, edge/match coefficients
on discrete node types, block function on [0,1]^2), and a scalar beta weights
the two-star term. The potential of a state g is

    Q(g) = sum_{i,j} alpha_ij g_ij + (beta / 2n) * sum_{i,j,k} g_ij g_jk,

with all sums over ordered indices and g_ii = 0, so the triple sum equals the
sum of squared degrees (triples with k = i are included).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from ._validation import (
    check_adjacency,
    check_boundaries,
    check_node,
    check_symmetric_matrix,
    check_types,
)
from .errors import ResourceLimitError

EXACT_PSI_MAX_N = 6


@dataclass(frozen=True)
class FullAlpha:
    """Pairwise benefits given directly as a symmetric n x n matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", check_symmetric_matrix(self.matrix, "alpha matrix"))

    def resolve(self, n: int, types=None) -> np.ndarray:
        if self.matrix.shape[0] != n:
            raise ValueError(
                f"alpha matrix is {self.matrix.shape[0]}x{self.matrix.shape[0]}, expected n={n}"
            )
        return self.matrix

    def sup_norm(self) -> float:
        off = self.matrix[~np.eye(self.matrix.shape[0], dtype=bool)]
        return float(np.abs(off).max()) if off.size else 0.0


@dataclass(frozen=True)
class ParametricAlpha:
    """alpha_ij = theta_edge + theta_match * 1{tau_i == tau_j}."""

    theta_edge: float
    theta_match: float

    def resolve(self, n: int, types=None) -> np.ndarray:
        if types is None:
            raise ValueError("parametric alpha requires node types")
        t = check_types(types, n)
        same = t[:, None] == t[None, :]
        return self.theta_edge + self.theta_match * same.astype(float)

    def sup_norm(self) -> float:
        return max(abs(self.theta_edge), abs(self.theta_edge + self.theta_match))


@dataclass(frozen=True)
class BlockAlpha:
    """alpha as a piecewise-constant symmetric function on [0,1]^2.

    Node i (0-based) sits at position (i+1)/n; block m covers (a_{m-1}, a_m].
    """

    boundaries: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = check_boundaries(self.boundaries)
        v = check_symmetric_matrix(self.values, "block values")
        if v.shape[0] != b.shape[0] - 1:
            raise ValueError("block value matrix must be MxM for M = len(boundaries) - 1")
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "values", v)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.boundaries)

    def block_of(self, n: int) -> np.ndarray:
        """Block index of each node at positions (i+1)/n."""
        pos = (np.arange(n) + 1) / n
        idx = np.searchsorted(self.boundaries, pos, side="left") - 1
        return np.clip(idx, 0, self.values.shape[0] - 1)

    def resolve(self, n: int, types=None) -> np.ndarray:
        blk = self.block_of(n)
        return self.values[np.ix_(blk, blk)]

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())


AlphaSpec = FullAlpha | ParametricAlpha | BlockAlpha


@dataclass(frozen=True)
class ModelParams:
    alpha: AlphaSpec
    beta: float

    def resolve_alpha(self, n: int, types=None) -> np.ndarray:
        a = self.alpha.resolve(n, types)
        if not np.isfinite(a).all():
            raise ValueError("alpha must resolve to finite values for every pair")
        return a

    def alpha_sup_norm(self) -> float:
        return self.alpha.sup_norm()


@dataclass(frozen=True)
class SufficientStats:
    """Integer counts: edges, same-type edges, and sum of squared degrees."""

    edges: int
    match_edges: int
    twostar_sum: int

    def as_vector(self, n: int) -> np.ndarray:
        """Statistics paired with (theta_edge, theta_match, beta) so that
        Q = theta . vector for a parametric alpha."""
        return np.array([2.0 * self.edges, 2.0 * self.match_edges, self.twostar_sum / (2.0 * n)])


def sufficient_stats(adj, types) -> SufficientStats:
    a = check_adjacency(adj)
    n = a.shape[0]
    t = check_types(types, n)
    iu = np.triu_indices(n, 1)
    edges = int(a[iu].sum())
    match = int((a[iu] & (t[iu[0]] == t[iu[1]])).sum())
    deg = a.sum(axis=1).astype(np.int64)
    return SufficientStats(edges=edges, match_edges=match, twostar_sum=int((deg**2).sum()))


def potential(adj, types, params: ModelParams) -> float:
    """Potential Q(g): ordered-pair benefit sum plus (beta/2n) * sum of squared degrees."""
    a = check_adjacency(adj)
    n = a.shape[0]
    alpha = params.resolve_alpha(n, types)
    deg = a.sum(axis=1)
    edge_part = float((alpha * a).sum())  # ordered pairs: each link counted twice
    return edge_part + params.beta / (2.0 * n) * float((deg.astype(float) ** 2).sum())


def potential_difference(adj, i, j, types, params: ModelParams) -> float:
    """Change in Q from setting g_ij = 1 versus g_ij = 0, in closed form.

    Equals 2*alpha_ij + (beta/n) * (deg_i + deg_j + 1) where degrees exclude
    the (i, j) link itself.
    """
    a = check_adjacency(adj)
    n = a.shape[0]
    i = check_node(i, n)
    j = check_node(j, n)
    if i == j:
        raise ValueError("potential_difference requires two distinct nodes")
    alpha = params.resolve_alpha(n, types)
    deg = a.sum(axis=1)
    di = int(deg[i]) - int(a[i, j])
    dj = int(deg[j]) - int(a[i, j])
    return 2.0 * float(alpha[i, j]) + params.beta / n * (di + dj + 1.0)


def utility(adj, i, types, params: ModelParams) -> float:
    """Payoff of node i: direct benefits plus (beta/n) times neighbours' degrees."""
    a = check_adjacency(adj)
    n = a.shape[0]
    i = check_node(i, n)
    alpha = params.resolve_alpha(n, types)
    deg = a.sum(axis=1).astype(float)
    row = a[i].astype(float)
    return float(alpha[i] @ row) + params.beta / n * float(row @ deg)


@lru_cache(maxsize=8)
def _enumeration_tables(n: int):
    """All 2^C(n,2) states as bit rows, plus per-state degree matrix."""
    iu = np.triu_indices(n, 1)
    npairs = iu[0].shape[0]
    codes = np.arange(1 << npairs, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(npairs)) & 1).astype(np.int8)
    inc = np.zeros((npairs, n), dtype=np.int8)
    inc[np.arange(npairs), iu[0]] = 1
    inc[np.arange(npairs), iu[1]] = 1
    deg = bits @ inc  # (states, n)
    return iu, bits, deg


def enumerate_potentials(n: int, types, params: ModelParams) -> np.ndarray:
    """Q over every graph on n nodes, in bitmask order of the upper triangle."""
    if n > EXACT_PSI_MAX_N:
        raise ResourceLimitError(
            f"exact enumeration is capped at n={EXACT_PSI_MAX_N} (2^15 states); got n={n}"
        )
    alpha = params.resolve_alpha(n, types)
    iu, bits, deg = _enumeration_tables(n)
    alpha_pairs = alpha[iu]
    q = 2.0 * (bits @ alpha_pairs)
    q += params.beta / (2.0 * n) * (deg.astype(np.float64) ** 2).sum(axis=1)
    return q


def exact_psi(n: int, types, params: ModelParams) -> float:
    """log-normalizer per n^2 by full enumeration (n <= 6)."""
    q = enumerate_potentials(n, types, params)
    return float(logsumexp(q)) / n**2


def independent_links_psi(n: int, types, params: ModelParams) -> float:
    """Closed form of psi at beta = 0: (1/n^2) * sum_{i<j} log(1 + e^{2 alpha_ij})."""
    alpha = params.resolve_alpha(n, types)
    iu = np.triu_indices(n, 1)
    return float(np.logaddexp(0.0, 2.0 * alpha[iu]).sum()) / n**2
