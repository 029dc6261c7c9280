import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from euler_orient.errors import ConvergenceError  # noqa: F401
from euler_orient.graph import (
    Graph,
    circulant,
    complete,
    complete_bipartite,
    cycle,
    disjoint_union,
    random_even_graph,
)
from euler_orient.spectral import (
    algebraic_connectivity,
    bareiss_det,
    condition_number,
    det_qhat_exact,
    eigenvalues,
    laplacian,
    log_det_qhat,
    matrix_norm,
    qhat,
    spanning_tree_count,
    spectral_norm,
    truncated_logdet,
)
from oracles import deletion_contraction_trees


def test_laplacian_examples():
    assert np.array_equal(laplacian(complete(3)), 3 * np.eye(3, dtype=int) - 1)
    assert np.array_equal(qhat(complete(3)), 3 * np.eye(3, dtype=int))
    assert np.array_equal(qhat(complete(5)), 5 * np.eye(5, dtype=int))
    q = laplacian(cycle(4))
    assert list(np.diag(q)) == [2, 2, 2, 2]
    assert not q.sum(axis=1).any()


@pytest.mark.parametrize("g", [complete(6), cycle(9), random_even_graph(11, 30, 2),
                               disjoint_union(complete(3), cycle(5))])
def test_laplacian_invariants(g):
    q = laplacian(g)
    assert np.array_equal(q, q.T)
    assert not q.sum(axis=1).any()
    assert [q[i, i] for i in range(g.n)] == [g.degree(v) for v in range(g.n)]


def test_eigenvalue_examples():
    assert np.allclose(eigenvalues(laplacian(complete(3))), [0, 3, 3])
    expected = sorted(2 - 2 * math.cos(2 * math.pi * k / 4) for k in range(4))
    assert np.allclose(eigenvalues(laplacian(cycle(4))), expected)
    assert np.allclose(eigenvalues(laplacian(cycle(4))), [0, 2, 2, 4])
    ev = eigenvalues(laplacian(complete_bipartite(3, 3)))
    assert np.allclose(ev, [0, 3, 3, 3, 3, 6])


def test_eigenvalues_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        eigenvalues(np.array([[1, 2], [0, 1]]))
    with pytest.raises(ValueError):
        eigenvalues(np.array([[1.0, 2.0], [2.1, 1.0]]), tol=1e-9)


def test_eigenpair_residuals():
    g = random_even_graph(13, 25, 5)
    q = laplacian(g).astype(float)
    ev = eigenvalues(laplacian(g))
    norm2 = spectral_norm(q)
    assert ev.sum() == pytest.approx(np.trace(q), rel=1e-12)
    assert (ev**2).sum() == pytest.approx((q * q).sum(), rel=1e-12)
    eye = np.eye(g.n)
    for lam in ev:
        # q - lam I must be singular up to rounding
        assert np.linalg.svd(q - lam * eye, compute_uv=False)[-1] <= 1e-9 * norm2


def test_algebraic_connectivity():
    for n in (3, 5, 8):
        assert algebraic_connectivity(complete(n)) == pytest.approx(n)
    assert algebraic_connectivity(disjoint_union(complete(3), complete(3))) == 0
    assert algebraic_connectivity(cycle(4)) == pytest.approx(2)


@pytest.mark.parametrize("g", [complete(4), complete(7), cycle(10), circulant(9, [1, 2]),
                               random_even_graph(12, 40, 3)])
def test_qhat_spectrum_replaces_zero_by_n(g):
    ev_q = eigenvalues(laplacian(g))
    ev_hat = eigenvalues(qhat(g))
    expected = np.sort(np.concatenate([[g.n], ev_q[1:]]))
    assert np.allclose(ev_hat, expected, atol=1e-8 * g.n)
    assert ev_q[-1] <= g.n + 1e-8 * g.n
    assert matrix_norm(qhat(g), 1) == g.n


def test_spanning_tree_examples():
    assert spanning_tree_count(complete(5)) == 125
    assert spanning_tree_count(complete_bipartite(3, 3)) == 81
    assert deletion_contraction_trees(6, complete_bipartite(3, 3).edges) == 81
    for n in range(3, 12):
        assert spanning_tree_count(cycle(n)) == n
    assert spanning_tree_count(disjoint_union(cycle(3), cycle(3))) == 0


def test_det_qhat_examples():
    assert det_qhat_exact(complete(3)) == 27
    assert det_qhat_exact(complete(5)) == 3125 == 125 * 25
    assert det_qhat_exact(cycle(4)) == 64
    assert log_det_qhat(complete(5)) == pytest.approx(5 * math.log(5), rel=1e-12)


def _random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)
                                if rng.random() < p])


@pytest.mark.parametrize("seed", range(40))
def test_spanning_trees_match_deletion_contraction(seed):
    g = _random_graph(3 + seed % 5, 0.6, seed)
    if g.m > 12:
        g = Graph.from_edges(g.n, g.edges[:12])
    assert spanning_tree_count(g) == deletion_contraction_trees(g.n, g.edges)
    assert spanning_tree_count(g) * g.n**2 == det_qhat_exact(g)


@pytest.mark.parametrize("seed", range(10))
def test_log_det_agrees_with_eigenvalues(seed):
    g = random_even_graph(9 + seed % 3 * 2, 20 + seed, seed)
    if algebraic_connectivity(g) == 0:
        pytest.skip("disconnected draw")
    from_eigs = float(np.sum(np.log(eigenvalues(qhat(g)))))
    assert log_det_qhat(g) == pytest.approx(from_eigs, rel=1e-9)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n),
                       min_size=n, max_size=n)))
def test_bareiss_matches_sympy(rows):
    assert bareiss_det(rows) == sympy.Matrix(rows).det()


def test_bareiss_handles_zero_pivots():
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([[0, 0], [0, 1]]) == 0
    assert bareiss_det([]) == 1


def test_norms_and_condition_numbers():
    eye = np.eye(4)
    for p in (1, 2, math.inf):
        assert matrix_norm(eye, p) == pytest.approx(1)
        assert condition_number(eye, p) == pytest.approx(1)
    qh = qhat(complete(6))
    assert condition_number(qh, 2) == pytest.approx(1)
    assert matrix_norm(qh, 1) == 6
    with pytest.raises(ValueError):
        condition_number(np.zeros((2, 2)), 2)
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert matrix_norm(a, 1) == 6 and matrix_norm(a, math.inf) == 7
    assert matrix_norm(a, 2) == pytest.approx(np.linalg.norm(a, 2))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 7).flatmap(
    lambda n: st.lists(st.floats(-5, 5), min_size=n * n, max_size=n * n).map(
        lambda xs: np.array(xs).reshape(n, n))))
def test_symmetric_two_norm_below_one_norm(x):
    s = x + x.T
    assert matrix_norm(s, 2) <= matrix_norm(s, 1) * (1 + 1e-12) + 1e-12
    if abs(np.linalg.det(s)) > 1e-6:
        assert condition_number(s, 2) >= 1 - 1e-12
        assert condition_number(s, 1) >= 1 - 1e-12


def test_truncated_logdet_examples():
    approx, bound = truncated_logdet(np.zeros((3, 3)), 4)
    assert approx == 0 and bound == 0
    x = np.diag([0.1, -0.2])
    approx, bound = truncated_logdet(x, 2)
    assert approx == pytest.approx(-0.1)
    assert bound == pytest.approx(0.05)
    assert abs(math.log(1.1 * 0.8) - approx) <= bound
    with pytest.raises(ValueError):
        truncated_logdet(np.eye(2), 3)


def test_truncated_logdet_bound_holds_on_random_symmetric():
    rng = np.random.default_rng(2024)
    for trial in range(1000):
        n = int(rng.integers(1, 8))
        a = rng.standard_normal((n, n))
        s = (a + a.T) / 2
        target = rng.uniform(0.0, 0.9)
        norm = np.abs(np.linalg.eigvalsh(s)).max()
        x = s * (target / norm) if norm > 0 else s
        m = int(rng.integers(2, 9))
        approx, bound = truncated_logdet(x, m)
        exact = float(np.sum(np.log1p(np.linalg.eigvalsh(x))))
        assert abs(exact - approx) <= bound + 1e-12, (trial, n, m)


def test_truncated_logdet_norm_half_order_six():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((5, 5))
    s = a + a.T
    x = 0.5 * s / np.abs(np.linalg.eigvalsh(s)).max()
    approx, bound = truncated_logdet(x, 6)
    exact = float(np.sum(np.log1p(np.linalg.eigvalsh(x))))
    assert abs(exact - approx) <= bound


def test_truncated_logdet_nonsymmetric_norm():
    x = np.array([[0.0, 0.6], [0.0, 0.0]])
    assert spectral_norm(x) == pytest.approx(0.6)
    approx, bound = truncated_logdet(x, 3)
    assert abs(0.0 - approx) <= bound
