import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tpgmatch.affinity import AffinityConfig
from tpgmatch.errors import SizeCapError, TPGMatchError
from tpgmatch.graph import AttributedGraph
from tpgmatch.product_graph import (ProductGraph, build_product_graph, compute_qx,
                                    discount_factor, normalize_p, normalize_w)
from tpgmatch.sparse import SparseMatrix

from conftest import random_graph


def test_single_node_product():
    g = AttributedGraph(np.array([[0.5]]))
    pg = build_product_graph(g, g)
    assert np.array_equal(pg.p, [1.0])
    assert pg.W.nnz == 0 and pg.lam == 1.0


def test_two_cycle_product_pattern():
    g = AttributedGraph(np.array([[0.5], [0.5]]), [(0, 1), (1, 0)], [[1.0], [1.0]])
    pg = build_product_graph(g, g)
    # arcs (source, target) over k = i1 * 2 + i2
    arcs = set(zip(pg.edge_src.tolist(), pg.edge_dst.tolist()))
    assert arcs == {(0, 3), (1, 2), (2, 1), (3, 0)}
    A = g.adjacency()
    assert np.array_equal(pg.W.toarray() != 0, np.kron(A, A).T != 0)


def test_path_product_has_one_arc():
    g = AttributedGraph(np.array([[0.5], [0.5]]), [(0, 1)], [[1.0]])
    pg = build_product_graph(g, g)
    W = pg.W.toarray()
    assert np.count_nonzero(W) == 1 and W[3, 0] == 1.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n1=st.integers(1, 5), n2=st.integers(1, 5))
def test_pattern_is_kronecker_and_stochastic(seed, n1, n2):
    rng = np.random.default_rng(seed)
    g1, g2 = random_graph(rng, n1, 0.5), random_graph(rng, n2, 0.5)
    pg = build_product_graph(g1, g2)
    W = pg.W.toarray()
    # W is stored target-major, so its pattern is the transposed Kronecker product
    assert np.array_equal(W != 0, np.kron(g1.adjacency(), g2.adjacency()).T != 0)
    colsum = W.sum(axis=0)
    nonzero = (W != 0).any(axis=0)
    assert np.all(np.abs(colsum - nonzero) < 1e-12)
    assert abs(pg.p.sum() - 1) < 1e-12 and np.all(pg.p >= 0)
    assert pg.lam * min(pg.out_degree.max(initial=0), pg.in_degree.max(initial=0)) <= 1 + 1e-12
    assert np.allclose(pg.q, np.diag(W @ W) - 1, atol=1e-12)


def test_operand_arc_ids_match_arcs(rng):
    g1, g2 = random_graph(rng, 4, 0.6), random_graph(rng, 5, 0.5)
    pg = build_product_graph(g1, g2)
    for s, t, a, b in zip(pg.edge_src, pg.edge_dst, pg.edge_e1, pg.edge_e2):
        (i1, i2), (j1, j2) = divmod(int(s), 5), divmod(int(t), 5)
        assert tuple(g1.edges[a]) == (i1, j1) and tuple(g2.edges[b]) == (i2, j2)


def test_normalize_p_examples():
    assert np.allclose(normalize_p([2, 2]), [0.5, 0.5])
    assert np.allclose(normalize_p([0, 0, 0]), [1 / 3] * 3)
    assert np.allclose(normalize_p([1, 3]), [0.25, 0.75])
    with pytest.raises(TPGMatchError):
        normalize_p([1, -1])


def test_normalize_w_examples():
    W = normalize_w(SparseMatrix.from_dense([[0.2, 0, 1], [0.2, 0, 3]]))
    assert np.allclose(W.toarray(), [[0.5, 0, 0.25], [0.5, 0, 0.75]])
    with pytest.raises(TPGMatchError):
        normalize_w(SparseMatrix.from_dense([[-1.0]]))


def test_compute_qx_examples(rng):
    assert np.array_equal(compute_qx(SparseMatrix.zeros((3, 3))), [-1, -1, -1])
    U = SparseMatrix.from_dense([[0, .5, .5], [.5, 0, .5], [.5, .5, 0]])
    assert np.allclose(compute_qx(U), -0.5, atol=1e-15)
    a = rng.random((5, 5)) * (rng.random((5, 5)) < 0.5)
    assert np.allclose(compute_qx(SparseMatrix.from_dense(a)), np.diag(a @ a) - 1, atol=1e-12)


def test_discount_factor_rule():
    assert discount_factor(np.array([4, 2]), np.array([3, 1])) == 1 / 3
    assert discount_factor(np.array([0, 0]), np.array([0, 0])) == 1.0
    assert discount_factor(np.array([], int), np.array([], int)) == 1.0


def test_lambda_uses_structural_degrees(triangle):
    assert build_product_graph(triangle, triangle).lam == 0.25


def test_size_cap_checked_before_work():
    big = AttributedGraph(np.zeros((2000, 1)))
    with pytest.raises(SizeCapError):
        build_product_graph(big, big)
    small = AttributedGraph(np.zeros((3, 1)))
    with pytest.raises(SizeCapError):
        build_product_graph(small, small, max_tpg_nodes=8)


def test_dot_product_weights_rescaled():
    g = AttributedGraph(np.array([[2.0], [3.0]]), [(0, 1)], [[4.0]])
    cfg = AffinityConfig(node_kernel="dot_product", edge_kernel="dot_product")
    pg = build_product_graph(g, g, cfg)
    assert abs(pg.p.sum() - 1) < 1e-12
    assert np.allclose(pg.W.toarray().sum(axis=0)[0], 1.0)


def test_from_transition_defaults():
    pg = ProductGraph.from_transition(np.array([[0, .5], [1, .5]]))
    assert pg.dim == 2 and np.allclose(pg.p, 0.5)
    with pytest.raises(TPGMatchError):
        ProductGraph.from_transition(np.zeros((2, 3)))
