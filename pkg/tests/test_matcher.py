import itertools

import numpy as np
import pytest

from tpgmatch.affinity import AffinityConfig, assignment_matrix, build_affinity_matrix, qap_objective
from tpgmatch.context import ContextualSimilarity, cs_pairwise
from tpgmatch.errors import SizeCapError, SolverError
from tpgmatch.graph import AttributedGraph
from tpgmatch.matcher import (FAMILIES, MatchConfig, build_matching_lp, build_se, build_sv,
                              canonical_model, match)
from tpgmatch.optim import hungarian_max, lp_solve
from tpgmatch.oracles import lp_by_vertices
from tpgmatch.product_graph import build_product_graph

from checks import constraint_violation
from conftest import random_graph

PATH = AttributedGraph(np.array([[0.5], [0.5]]), [(0, 1)], [[1.0]])


def test_model_aliases():
    assert canonical_model("PG-B") == "backtrackless"
    assert canonical_model("random_walk") == "random_walk"
    with pytest.raises(ValueError):
        canonical_model("PG-X")


def test_build_sv_is_copy():
    cs = ContextualSimilarity(np.array([0.2, 0.8]), "pairwise")
    sv = build_sv(cs)
    assert np.array_equal(sv, [0.2, 0.8]) and sv is not cs.values


def test_build_se_examples():
    pg = build_product_graph(PATH, PATH)
    cs = ContextualSimilarity(np.array([0.4, 0.0, 0.0, 0.6]), "pairwise")
    assert build_se(cs, pg) == pytest.approx([1.0])
    zero = ContextualSimilarity(np.zeros(4), "pairwise")
    assert np.array_equal(build_se(zero, pg), [0.0])


def test_build_se_uniform(triangle):
    pg = build_product_graph(triangle, triangle)
    se = build_se(ContextualSimilarity(np.full(pg.dim, 0.3), "pairwise"), pg)
    assert np.allclose(se, 2 * 0.3 / 4)


def test_single_node_lp():
    g = AttributedGraph(np.array([[0.5]]))
    pg = build_product_graph(g, g)
    mlp = build_matching_lp(pg, [1.0], [])
    assert mlp.lp.nvars == 1 and mlp.lp.nrows == 2
    assert [FAMILIES[f] for f in mlp.row_family] == ["pattern_node", "target_node"]
    assert lp_solve(mlp.lp).z == pytest.approx([1.0])


def test_path_vs_path_lp_against_vertices():
    pg = build_product_graph(PATH, PATH)
    cs = cs_pairwise(pg)
    mlp = build_matching_lp(pg, build_sv(cs), build_se(cs, pg))
    sol = lp_solve(mlp.lp)
    assert sol.z[[0, 3]] == pytest.approx([1, 1]) and sol.z[4] == pytest.approx(1)
    ref, _ = lp_by_vertices(mlp.lp.c, mlp.lp.A.toarray(), mlp.lp.b)
    assert sol.objective == pytest.approx(ref, abs=1e-9)


def test_coupling_rows_by_hand():
    pg = build_product_graph(PATH, PATH)
    mlp = build_matching_lp(pg, np.zeros(4), np.ones(1))
    A = mlp.lp.A.toarray()
    fam = [FAMILIES[f] for f in mlp.row_family]
    rows = {(f, int(k)): A[r] for r, (f, k) in enumerate(zip(fam, mlp.row_key))}
    # variables: x(0,0) x(0,1) x(1,0) x(1,1) y(arc 0 -> 3)
    assert np.array_equal(rows[("out_degree", 0)], [-1, 0, 0, 0, 1])
    assert np.array_equal(rows[("in_degree", 3)], [0, 0, 0, -1, 1])
    assert np.array_equal(rows[("pattern_edge", 0)], [0, 0, 0, 0, 1])
    assert np.array_equal(rows[("target_edge", 0)], [0, 0, 0, 0, 1])
    assert np.array_equal(rows[("pattern_node", 1)], [0, 0, 1, 1, 0])
    assert np.array_equal(rows[("target_node", 0)], [1, 0, 1, 0, 0])
    # rows whose TPG node has no arcs and no degree coefficient are dropped
    assert ("out_degree", 3) not in rows and ("in_degree", 0) not in rows
    sol = lp_solve(mlp.lp)
    assert sol.objective == pytest.approx(1.0)
    assert sol.z[4] <= sol.z[0] + 1e-9 and sol.z[4] <= sol.z[3] + 1e-9


def test_degree_coefficient_is_min_of_operand_degrees(rng):
    g1, g2 = random_graph(rng, 4, 0.7), random_graph(rng, 3, 0.7)
    pg = build_product_graph(g1, g2)
    mlp = build_matching_lp(pg, np.ones(pg.dim), np.ones(pg.edge_count))
    A = mlp.lp.A.toarray()
    for r, (f, k) in enumerate(zip(mlp.row_family, mlp.row_key)):
        if FAMILIES[f] == "out_degree":
            i1, i2 = divmod(int(k), 3)
            expect = -min(g1.out_degrees()[i1], g2.out_degrees()[i2])
            assert A[r, k] == expect


@pytest.mark.parametrize("model", ["pairwise", "random_walk", "backtrackless"])
def test_self_match_is_identity(model, triangle):
    res = match(triangle, triangle, MatchConfig(model=model))
    assert res.assignment == [(0, 0), (1, 1), (2, 2)]
    assert set(res.timings) == {"product_graph", "context", "lp_build", "lp_solve",
                                "discretize", "objective"}


def test_self_match_random_undirected(rng):
    for _ in range(5):
        g = random_graph(rng, 6, 0.7, directed=False)
        res = match(g, g, MatchConfig(model="random_walk"))
        assert res.assignment == [(i, i) for i in range(6)]


def test_pattern_embedded_with_outliers():
    g1 = AttributedGraph(np.array([[0.2], [0.6]]), [(0, 1)], [[0.5]])
    # true images are target nodes 2 and 0; nodes 1 and 3 sit far away
    g2 = AttributedGraph(np.array([[0.6], [5.0], [0.2], [-4.0]]),
                         [(2, 0), (1, 3), (3, 0)], [[0.5], [0.1], [0.9]])
    K = build_affinity_matrix(g1, g2, AffinityConfig())
    best = max(itertools.permutations(range(4), 2),
               key=lambda p: qap_objective(K, assignment_matrix(list(enumerate(p)), 2, 4)))
    assert best == (2, 0)
    for model in ("pairwise", "random_walk"):
        assert match(g1, g2, MatchConfig(model=model)).assignment == [(0, 2), (1, 0)]


def test_backtrackless_singular_at_unit_discount():
    with pytest.raises(SolverError) as err:
        match(PATH, PATH, MatchConfig(model="backtrackless"))
    assert err.value.stage == "context"


def test_edgeless_pattern_reduces_to_node_assignment(rng):
    g1 = AttributedGraph(rng.uniform(size=(3, 1)))
    g2 = random_graph(rng, 5, 0.5)
    res = match(g1, g2, MatchConfig(model="backtrackless"))
    pg = build_product_graph(g1, g2)
    assert res.assignment == hungarian_max(pg.p.reshape(3, 5))


def test_size_cap_error_is_tagged():
    big = AttributedGraph(np.zeros((50, 1)))
    with pytest.raises(SizeCapError) as err:
        match(big, big, MatchConfig(max_tpg_nodes=100))
    assert err.value.stage == "product_graph"
    assert str(err.value).startswith("[product_graph]")


def test_iteration_limit_is_a_solver_error(triangle):
    with pytest.raises(SolverError) as err:
        match(triangle, triangle, MatchConfig(lp_max_pivots=1, lp_method="simplex"))
    assert err.value.stage == "lp_solve"


def test_no_discretize(triangle):
    res = match(triangle, triangle, MatchConfig(discretize=False))
    assert res.assignment is None and res.objective_qap is None
    assert res.to_dict()["assignment"] is None


def test_results_feasible_and_partial_permutation(rng):
    for _ in range(15):
        g1 = random_graph(rng, int(rng.integers(1, 5)), 0.6, directed=bool(rng.integers(2)))
        g2 = random_graph(rng, int(rng.integers(1, 6)), 0.6, directed=bool(rng.integers(2)))
        res = match(g1, g2, MatchConfig(model="pairwise"))
        assert constraint_violation(g1, g2, res.x, res.y) <= 1e-7
        X = assignment_matrix(res.assignment, g1.node_count, g2.node_count)
        assert X.sum() == min(g1.node_count, g2.node_count)
        assert X.sum(axis=0).max() <= 1 and X.sum(axis=1).max() <= 1


def test_integral_lp_support_equals_hungarian(rng):
    for _ in range(10):
        g1, g2 = random_graph(rng, 3, 0.7, directed=False), random_graph(rng, 4, 0.7, directed=False)
        res = match(g1, g2, MatchConfig(model="random_walk"))
        X = res.x_matrix()
        if np.max(np.minimum(X, 1 - X)) < 1e-6 and X.sum() > min(3, 4) - 0.5:
            support = sorted(map(tuple, np.argwhere(X > 0.5).tolist()))
            assert res.assignment == support


def test_target_relabeling_moves_solution(rng):
    integral = 0
    for _ in range(12):
        g1, g2 = random_graph(rng, 3, 0.7, directed=False), random_graph(rng, 5, 0.7, directed=False)
        perm = rng.permutation(5)
        a = match(g1, g2, MatchConfig(model="random_walk"))
        b = match(g1, g2.permuted(perm), MatchConfig(model="random_walk"))
        assert b.objective_lp == pytest.approx(a.objective_lp, rel=1e-12)
        assert np.allclose(b.x_matrix()[:, perm], a.x_matrix(), atol=1e-9)
        X = a.x_matrix()
        if np.max(np.minimum(X, 1 - X)) < 1e-9:
            # Hungarian ties on fractional x may break differently
            assert b.assignment == sorted((i, int(perm[j])) for i, j in a.assignment)
            integral += 1
    assert integral > 0


def test_far_outlier_does_not_change_matching(rng):
    checked = 0
    for _ in range(20):
        g1 = random_graph(rng, 3, 0.8, directed=False)
        g2 = random_graph(rng, 4, 0.8, directed=False)
        K = build_affinity_matrix(g1, g2, AffinityConfig())
        scores = sorted(qap_objective(K, assignment_matrix(list(enumerate(p)), 3, 4))
                        for p in itertools.permutations(range(4), 3))
        if scores[-1] - scores[-2] < 1e-6:
            continue
        g3 = AttributedGraph(np.vstack([g2.node_attrs, [[40.0]]]), g2.undirected_edges()[0],
                             g2.undirected_edges()[1], directed=False)
        cfg = MatchConfig(model="random_walk")
        assert match(g1, g3, cfg).assignment == match(g1, g2, cfg).assignment
        checked += 1
    assert checked > 5


def test_prune_eps_drops_variables(rng):
    g1, g2 = random_graph(rng, 4, 0.6), random_graph(rng, 4, 0.6)
    pg = build_product_graph(g1, g2)
    cs = cs_pairwise(pg)
    full = build_matching_lp(pg, build_sv(cs), build_se(cs, pg))
    cut = np.median(cs.values)
    pruned = build_matching_lp(pg, build_sv(cs), build_se(cs, pg), prune_eps=cut)
    assert pruned.nx == np.count_nonzero(cs.values >= cut) < full.nx
    res = match(g1, g2, MatchConfig(model="pairwise", prune_eps=cut))
    assert np.all(res.x[cs.values < cut] == 0)


def test_match_config_validation():
    from tpgmatch.errors import ConfigError
    for bad in (dict(solver_rtol=0), dict(max_tpg_nodes=0), dict(prune_eps=-1),
                dict(lp_method="ipm")):
        with pytest.raises(ConfigError):
            MatchConfig(**bad)
