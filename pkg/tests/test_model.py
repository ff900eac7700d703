import numpy as np
import pytest

import ergm_varest as ev
from conftest import (
    brute_potential,
    brute_psi,
    brute_utility,
    params_full,
    random_graph,
    random_symmetric_alpha,
)


def test_potential_empty_graph_is_zero():
    adj = np.zeros((4, 4), dtype=bool)
    p = params_full(np.ones((4, 4)) - np.eye(4), 3.0)
    assert ev.potential(adj, np.zeros(4, int), p) == 0.0


def test_potential_single_link_hand_value():
    adj = np.array([[0, 1], [1, 0]], dtype=bool)
    p = params_full(np.array([[0.0, 0.5], [0.5, 0.0]]), 1.0)
    assert ev.potential(adj, np.zeros(2, int), p) == pytest.approx(1.5, abs=1e-12)


def test_potential_triangle_hand_value():
    adj = ~np.eye(3, dtype=bool)
    p = params_full(np.zeros((3, 3)), 3.0)
    assert ev.potential(adj, np.zeros(3, int), p) == pytest.approx(6.0, abs=1e-12)


def test_potential_matches_brute_oracle(rng):
    for _ in range(50):
        n = int(rng.integers(2, 7))
        alpha = random_symmetric_alpha(rng, n)
        beta = float(rng.uniform(-3, 3))
        adj = random_graph(rng, n)
        got = ev.potential(adj, np.zeros(n, int), params_full(alpha, beta))
        want = brute_potential(adj, alpha, beta)
        assert got == pytest.approx(want, abs=1e-10)


def test_potential_relabeling_invariance(rng):
    for _ in range(50):
        n = int(rng.integers(3, 7))
        alpha = random_symmetric_alpha(rng, n)
        beta = float(rng.uniform(-2, 2))
        types = rng.integers(0, 3, size=n)
        adj = random_graph(rng, n)
        perm = rng.permutation(n)
        q1 = ev.potential(adj, types, params_full(alpha, beta))
        q2 = ev.potential(
            adj[np.ix_(perm, perm)], types[perm],
            params_full(alpha[np.ix_(perm, perm)], beta),
        )
        assert q1 == pytest.approx(q2, abs=1e-10)


def test_potential_difference_examples():
    p3 = params_full(np.zeros((3, 3)), 3.0)
    empty = np.zeros((3, 3), dtype=bool)
    assert ev.potential_difference(empty, 1, 2, np.zeros(3, int), p3) == pytest.approx(1.0)
    # beta = 0 leaves only the pair benefit
    alpha = np.array([[0.0, -0.7], [-0.7, 0.0]])
    adj = np.zeros((2, 2), dtype=bool)
    assert ev.potential_difference(adj, 0, 1, np.zeros(2, int), params_full(alpha, 0.0)) == \
        pytest.approx(-1.4, abs=1e-15)
    p2 = params_full(np.array([[0.0, 0.5], [0.5, 0.0]]), 1.0)
    assert ev.potential_difference(adj, 0, 1, np.zeros(2, int), p2) == pytest.approx(1.5)


def test_potential_difference_closed_form_vs_brute(rng):
    # 1000 random instances: closed form equals difference of two potentials
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        alpha = random_symmetric_alpha(rng, n)
        beta = float(rng.uniform(-3, 3))
        adj = random_graph(rng, n)
        i, j = rng.choice(n, size=2, replace=False)
        p = params_full(alpha, beta)
        on = adj.copy(); on[i, j] = on[j, i] = True
        off = adj.copy(); off[i, j] = off[j, i] = False
        types = np.zeros(n, int)
        want = ev.potential(on, types, p) - ev.potential(off, types, p)
        got = ev.potential_difference(adj, i, j, types, p)
        assert got == pytest.approx(want, abs=1e-12)


def test_potential_difference_rejects_self_pair():
    p = params_full(np.zeros((3, 3)), 1.0)
    with pytest.raises(ValueError):
        ev.potential_difference(np.zeros((3, 3), bool), 1, 1, np.zeros(3, int), p)


def test_utility_examples_and_brute(rng):
    adj = np.array([[0, 1], [1, 0]], dtype=bool)
    p = params_full(np.array([[0.0, 0.5], [0.5, 0.0]]), 1.0)
    assert ev.utility(adj, 0, np.zeros(2, int), p) == pytest.approx(1.0)
    assert ev.utility(np.zeros((3, 3), bool), 0, np.zeros(3, int),
                      params_full(np.ones((3, 3)), 2.0)) == 0.0
    for _ in range(100):
        n = int(rng.integers(2, 7))
        alpha = random_symmetric_alpha(rng, n)
        beta = float(rng.uniform(-3, 3))
        adj = random_graph(rng, n)
        i = int(rng.integers(n))
        got = ev.utility(adj, i, np.zeros(n, int), params_full(alpha, beta))
        assert got == pytest.approx(brute_utility(adj, i, alpha, beta), abs=1e-10)


def test_utility_surplus_tracks_potential_difference(rng):
    # Toggling a pair changes the two players' joint payoff by the potential
    # change plus the constant beta/n (the payoff's k-sum walks back to the
    # toggled link itself once per player, the potential's triple sum once in
    # total). Exact equality holds at beta = 0.
    for _ in range(100):
        n = int(rng.integers(2, 7))
        alpha = random_symmetric_alpha(rng, n)
        beta = float(rng.uniform(-3, 3))
        adj = random_graph(rng, n)
        i, j = rng.choice(n, size=2, replace=False)
        p = params_full(alpha, beta)
        types = np.zeros(n, int)
        on = adj.copy(); on[i, j] = on[j, i] = True
        off = adj.copy(); off[i, j] = off[j, i] = False
        surplus = (ev.utility(on, i, types, p) + ev.utility(on, j, types, p)
                   - ev.utility(off, i, types, p) - ev.utility(off, j, types, p))
        dq = ev.potential_difference(adj, i, j, types, p)
        assert surplus == pytest.approx(dq + beta / n, abs=1e-12)
        p0 = params_full(alpha, 0.0)
        surplus0 = (ev.utility(on, i, types, p0) + ev.utility(on, j, types, p0)
                    - ev.utility(off, i, types, p0) - ev.utility(off, j, types, p0))
        assert surplus0 == pytest.approx(
            ev.potential_difference(adj, i, j, types, p0), abs=1e-12
        )


def test_utility_rejects_bad_index():
    with pytest.raises(ValueError):
        ev.utility(np.zeros((3, 3), bool), 5, np.zeros(3, int), params_full(np.zeros((3, 3)), 0.0))


def test_sufficient_stats_hand_counts():
    t0 = np.zeros(3, int)
    assert ev.sufficient_stats(np.zeros((3, 3), bool), t0) == ev.SufficientStats(0, 0, 0)
    tri = ~np.eye(3, dtype=bool)
    assert ev.sufficient_stats(tri, t0) == ev.SufficientStats(3, 3, 12)
    path = np.zeros((3, 3), dtype=bool)
    path[0, 1] = path[1, 0] = path[1, 2] = path[2, 1] = True
    assert ev.sufficient_stats(path, np.array([0, 0, 1])) == ev.SufficientStats(2, 1, 6)


def test_sufficient_stats_bounds_and_parametric_identity(rng):
    for _ in range(200):
        n = int(rng.integers(2, 8))
        types = rng.integers(0, 2, size=n)
        adj = random_graph(rng, n)
        st = ev.sufficient_stats(adj, types)
        assert 0 <= st.match_edges <= st.edges <= n * (n - 1) // 2
        deg = adj.sum(axis=1)
        assert st.twostar_sum == int((deg.astype(int) ** 2).sum())
        th_e, th_m, beta = rng.uniform(-2, 2, size=3)
        p = ev.ModelParams(ev.ParametricAlpha(th_e, th_m), beta)
        want = ev.potential(adj, types, p)
        got = float(np.array([th_e, th_m, beta]) @ st.as_vector(n))
        assert got == pytest.approx(want, abs=1e-12)


def test_exact_psi_trivial_values():
    z2 = np.zeros(2, int)
    p0 = params_full(np.zeros((2, 2)), 0.0)
    assert ev.exact_psi(2, z2, p0) == pytest.approx(np.log(2) / 4, abs=1e-14)
    p3 = params_full(np.zeros((3, 3)), 0.0)
    assert ev.exact_psi(3, np.zeros(3, int), p3) == pytest.approx(np.log(2) / 3, abs=1e-14)
    p = params_full(np.array([[0.0, 0.5], [0.5, 0.0]]), 1.0)
    assert ev.exact_psi(2, z2, p) == pytest.approx(np.log1p(np.exp(1.5)) / 4, abs=1e-14)


def test_exact_psi_matches_brute_enumeration(rng):
    for _ in range(10):
        n = int(rng.integers(2, 5))
        alpha = random_symmetric_alpha(rng, n)
        beta = float(rng.uniform(-2, 2))
        got = ev.exact_psi(n, np.zeros(n, int), params_full(alpha, beta))
        assert got == pytest.approx(brute_psi(n, alpha, beta), abs=1e-10)


def test_exact_psi_beta_zero_factorizes(rng):
    for _ in range(20):
        n = int(rng.integers(2, 7))
        alpha = random_symmetric_alpha(rng, n)
        p = params_full(alpha, 0.0)
        t = np.zeros(n, int)
        assert ev.exact_psi(n, t, p) == pytest.approx(
            ev.independent_links_psi(n, t, p), abs=1e-12
        )


def test_exact_psi_resource_limit():
    p = params_full(np.zeros((7, 7)), 0.0)
    with pytest.raises(ev.ResourceLimitError):
        ev.exact_psi(7, np.zeros(7, int), p)


def test_alpha_spec_variants(rng):
    n = 6
    types = np.array([0, 0, 1, 1, 2, 2])
    par = ev.ParametricAlpha(-1.0, 0.5)
    a = par.resolve(n, types)
    assert a[0, 1] == pytest.approx(-0.5)
    assert a[0, 2] == pytest.approx(-1.0)
    blk = ev.BlockAlpha(np.array([0.0, 0.5, 1.0]), np.array([[1.0, -1.0], [-1.0, 2.0]]))
    ab = blk.resolve(4)
    # nodes at positions 0.25, 0.5, 0.75, 1.0 -> blocks 0, 0, 1, 1
    assert ab[0, 1] == 1.0 and ab[0, 2] == -1.0 and ab[2, 3] == 2.0
    with pytest.raises(ValueError):
        ev.BlockAlpha(np.array([0.0, 0.6, 0.4, 1.0]), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        ev.FullAlpha(np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_validation_rejects_malformed_graphs():
    with pytest.raises(ValueError):
        ev.check_adjacency(np.array([[0, 1], [0, 0]]))  # asymmetric
    with pytest.raises(ValueError):
        ev.check_adjacency(np.array([[1, 0], [0, 0]]))  # self-loop
    with pytest.raises(ValueError):
        ev.potential(np.zeros((3, 3), bool), np.zeros(4, int),
                     ev.ModelParams(ev.ParametricAlpha(0.0, 0.0), 0.0))
