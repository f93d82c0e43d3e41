"""Embedded oracle checks run by ``tpgmatch selftest``."""
import itertools

import numpy as np

from . import oracles
from .context import (backtrackless_walk_matrices, cs_backtrackless, cs_random_walk,
                      cs_truncated)
from .graph import AttributedGraph
from .optim import LinearProgram, hungarian_max, lp_solve
from .product_graph import ProductGraph, build_product_graph

UNIFORM = np.array([[0, .5, .5], [.5, 0, .5], [.5, .5, 0]])


def _weights(rng):
    return {(i, j): float(rng.uniform(0.1, 1.0)) for i in (1, 2, 3) for j in (1, 2, 3) if i != j}


def check_two_step_random_walk():
    pg = ProductGraph.from_transition(UNIFORM, np.full(3, 1 / 3), lam=1.0)
    ok = np.max(np.abs(cs_truncated(pg, "random_walk", 2).values - 1.0)) <= 1e-12
    rng = np.random.default_rng(11)
    for _ in range(5):
        w, p = _weights(rng), rng.uniform(0.1, 1, 3)
        pg = ProductGraph.from_transition(oracles.example_matrix_3node(w), p, lam=1.0)
        got = cs_truncated(pg, "random_walk", 2).values
        ok &= np.allclose(got, oracles.random_walk_series_3node(w, p), rtol=0, atol=1e-12)
    return bool(ok)


def check_two_step_backtrackless():
    rng = np.random.default_rng(12)
    ok = True
    for _ in range(5):
        w, p = _weights(rng), rng.uniform(0.1, 1, 3)
        pg = ProductGraph.from_transition(oracles.example_matrix_3node(w), p, lam=1.0)
        got = cs_truncated(pg, "backtrackless", 2).values
        ok &= np.allclose(got, oracles.backtrackless_series_3node(w, p), rtol=0, atol=1e-12)
    return bool(ok)


def check_qx_example():
    pg = ProductGraph.from_transition(UNIFORM)
    return bool(np.allclose(pg.q, -0.5, atol=1e-15))


def check_closed_forms_3node():
    pg = ProductGraph.from_transition(UNIFORM, np.full(3, 1 / 3), lam=0.5)
    rw = cs_random_walk(pg).values
    bl = cs_backtrackless(pg).values
    return bool(np.allclose(rw, 2 / 3, atol=1e-12) and np.allclose(bl, 2 / 3, atol=1e-12))


def check_lambda_rule():
    # both-way triangles: every product node has 2 * 2 = 4 arcs in and out
    tri = AttributedGraph(np.array([[0.1], [0.5], [0.9]]), [(0, 1), (1, 2), (0, 2)],
                          np.ones((3, 1)), directed=False)
    path = AttributedGraph(np.array([[0.1], [0.9]]), [(0, 1)], np.ones((1, 1)))
    lonely = AttributedGraph(np.array([[0.3]]))
    return (build_product_graph(tri, tri).lam == 0.25
            and build_product_graph(path, path).lam == 1.0
            and build_product_graph(lonely, lonely).lam == 1.0)


def check_series_vs_closed_form():
    rng = np.random.default_rng(13)
    for _ in range(10):
        n = int(rng.integers(4, 25))
        A = (rng.random((n, n)) < 0.4) * rng.uniform(0.1, 1, (n, n))
        np.fill_diagonal(A, 0)
        pg = ProductGraph.from_transition(A, rng.uniform(0, 1, n), normalize=True)
        if pg.lam >= 1:
            continue
        for model, closed in (("random_walk", cs_random_walk), ("backtrackless", cs_backtrackless)):
            err = np.max(np.abs(closed(pg).values - cs_truncated(pg, model, 200).values))
            if err > 1e-6:
                return False
    return True


def check_backtrackless_counts():
    rng = np.random.default_rng(14)
    for _ in range(10):
        n = int(rng.integers(2, 6))
        A = np.triu(rng.random((n, n)) < 0.6, 1)
        A = (A | A.T).astype(float)
        mats = backtrackless_walk_matrices(A, 5)
        for k in range(1, 6):
            if not np.array_equal(np.rint(mats[k]).astype(np.int64),
                                  oracles.count_backtrackless_walks(A, k)):
                return False
    return True


def check_hungarian():
    rng = np.random.default_rng(15)
    for _ in range(30):
        S = rng.random((int(rng.integers(1, 6)), int(rng.integers(1, 6))))
        got = sum(S[i, j] for i, j in hungarian_max(S))
        if abs(got - oracles.best_assignment_bruteforce(S)) > 1e-12:
            return False
    return True


def check_lp_vertices():
    rng = np.random.default_rng(16)
    for _ in range(30):
        n, m = int(rng.integers(1, 5)), int(rng.integers(0, 5))
        A = rng.normal(size=(m, n))
        b = rng.uniform(0, 2, m)
        c = rng.normal(size=n)
        ref, _ = oracles.lp_by_vertices(c, A, b)
        for method in ("simplex", "highs"):
            if abs(lp_solve(LinearProgram(c, A, b), method=method).objective - ref) > 1e-7:
                return False
    return True


CHECKS = {
    "two_step_random_walk_expansion": check_two_step_random_walk,
    "two_step_backtrackless_expansion": check_two_step_backtrackless,
    "qx_worked_example": check_qx_example,
    "closed_forms_3node": check_closed_forms_3node,
    "lambda_rule": check_lambda_rule,
    "series_vs_closed_form": check_series_vs_closed_form,
    "backtrackless_walk_counts": check_backtrackless_counts,
    "hungarian_vs_permutations": check_hungarian,
    "lp_vs_vertex_enumeration": check_lp_vertices,
}


def run_selftest(out=print):
    """Run every check, report one line each, return the names that failed."""
    failed = []
    for name, fn in CHECKS.items():
        try:
            ok = fn()
        except Exception as exc:  # a crash is a failure, reported by name
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        out(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failed.append(name)
    return failed
