"""Input validation helpers for adjacency matrices, type vectors and marginals."""

from __future__ import annotations

import numpy as np


def check_adjacency(adj, n: int | None = None) -> np.ndarray:
    """Validate and return an adjacency matrix as a square boolean array.

    Requires a symmetric 0/1 matrix with a zero diagonal.
    """
    a = np.asarray(adj)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise ValueError(f"adjacency has {a.shape[0]} nodes, expected {n}")
    if a.dtype != bool:
        vals = np.unique(a)
        if not np.isin(vals, (0, 1)).all():
            raise ValueError("adjacency entries must be 0/1")
        a = a.astype(bool)
    if not (a == a.T).all():
        raise ValueError("adjacency must be symmetric")
    if a.diagonal().any():
        raise ValueError("adjacency must have a zero diagonal (no self-loops)")
    return a


def check_types(types, n: int) -> np.ndarray:
    """Validate a node-type vector: length n, small non-negative integers."""
    t = np.asarray(types)
    if t.ndim != 1 or t.shape[0] != n:
        raise ValueError(f"types must be a length-{n} vector, got shape {t.shape}")
    if not np.issubdtype(t.dtype, np.integer):
        ti = t.astype(np.int64)
        if not np.array_equal(ti, t):
            raise ValueError("types must be integers")
        t = ti
    if (t < 0).any():
        raise ValueError("types must be non-negative")
    return t.astype(np.int64)


def check_node(i, n: int) -> int:
    i = int(i)
    if not 0 <= i < n:
        raise ValueError(f"node index {i} out of range for n={n}")
    return i


def check_marginals(mu, n: int | None = None) -> np.ndarray:
    """Validate a link-marginal matrix: symmetric, zero diagonal, entries in [0,1]."""
    m = np.asarray(mu, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"marginal matrix must be square, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise ValueError(f"marginal matrix has {m.shape[0]} nodes, expected {n}")
    if not np.allclose(m, m.T, atol=0.0, rtol=0.0, equal_nan=False):
        raise ValueError("marginal matrix must be symmetric")
    if m.diagonal().any():
        raise ValueError("marginal matrix must have a zero diagonal")
    if (m < 0).any() or (m > 1).any():
        raise ValueError("marginal entries must lie in [0, 1]")
    return m


def check_symmetric_matrix(mat, name: str = "matrix") -> np.ndarray:
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    if not np.array_equal(m, m.T):
        raise ValueError(f"{name} must be symmetric")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} must be finite")
    return m


def check_boundaries(boundaries) -> np.ndarray:
    """Validate block boundaries 0 = a_0 < a_1 < ... < a_M = 1."""
    b = np.asarray(boundaries, dtype=float)
    if b.ndim != 1 or b.shape[0] < 2:
        raise ValueError("boundaries must be a 1-d sequence with at least two entries")
    if b[0] != 0.0 or b[-1] != 1.0:
        raise ValueError("boundaries must start at 0 and end at 1")
    if not (np.diff(b) > 0).all():
        raise ValueError("boundaries must be strictly increasing")
    return b


def balanced_two_types(n: int) -> np.ndarray:
    """Two-group assignment: first ceil(n/2) nodes type 0, the rest type 1."""
    t = np.zeros(n, dtype=np.int64)
    t[(n + 1) // 2:] = 1
    return t
