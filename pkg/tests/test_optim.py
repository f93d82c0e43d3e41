import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tpgmatch.errors import SolverError
from tpgmatch.optim import LinearProgram, hungarian_max, lp_solve
from tpgmatch.optim.hungarian import assignment_score
from tpgmatch.optim.lp import default_pivot_budget
from tpgmatch.oracles import best_assignment_bruteforce, lp_by_vertices

METHODS = ("simplex", "highs")


@pytest.mark.parametrize("method", METHODS)
def test_box_only(method):
    sol = lp_solve(LinearProgram([1.0, 1.0], np.zeros((0, 2)), []), method=method)
    assert sol.status == "optimal"
    assert np.allclose(sol.z, [1, 1]) and sol.objective == pytest.approx(2.0)


@pytest.mark.parametrize("method", METHODS)
def test_single_binding_row(method):
    sol = lp_solve(LinearProgram([1.0], [[1.0]], [0.5]), method=method)
    assert sol.z == pytest.approx([0.5]) and sol.objective == pytest.approx(0.5)


def test_empty_program():
    sol = lp_solve(LinearProgram(np.zeros(0), np.zeros((0, 0)), []))
    assert sol.objective == 0.0 and sol.z.shape == (0,)


def test_negative_costs_stay_at_zero():
    sol = lp_solve(LinearProgram([-1.0, -2.0], [[1.0, 1.0]], [1.0]), method="simplex")
    assert np.array_equal(sol.z, [0, 0])


@pytest.mark.parametrize("bad", [
    dict(c=[1.0], A=[[1.0]], b=[-1.0]),
    dict(c=[np.inf], A=[[1.0]], b=[1.0]),
    dict(c=[1.0, 2.0], A=[[1.0]], b=[1.0]),
])
def test_program_validation(bad):
    with pytest.raises(ValueError):
        LinearProgram(**bad)


def test_unknown_method():
    with pytest.raises(ValueError):
        lp_solve(LinearProgram([1.0], [[1.0]], [1.0]), method="interior")


def test_pivot_budget_reports_iteration_limit():
    rng = np.random.default_rng(3)
    A = rng.uniform(0, 1, (10, 30))
    lp = LinearProgram(rng.uniform(0, 1, 30), A, np.ones(10))
    sol = lp_solve(lp, method="simplex", max_pivots=2)
    assert sol.status == "iteration_limit"
    assert lp.is_feasible(sol.z)
    assert default_pivot_budget(lp) == 50 * 40


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4), m=st.integers(0, 4))
def test_simplex_matches_vertex_enumeration(seed, n, m):
    rng = np.random.default_rng(seed)
    A, b, c = rng.normal(size=(m, n)), rng.uniform(0, 2, m), rng.normal(size=n)
    ref, _ = lp_by_vertices(c, A, b)
    for method in METHODS:
        sol = lp_solve(LinearProgram(c, A, b), method=method)
        assert sol.status == "optimal"
        assert abs(sol.objective - ref) <= 1e-7
        assert LinearProgram(c, A, b).is_feasible(sol.z)


def test_simplex_is_deterministic():
    rng = np.random.default_rng(8)
    lp = LinearProgram(rng.normal(size=20), rng.integers(-2, 3, (12, 20)).astype(float),
                       rng.integers(0, 3, 12).astype(float))
    a, b = lp_solve(lp, method="simplex"), lp_solve(lp, method="simplex")
    assert np.array_equal(a.z, b.z) and a.iterations == b.iterations


def test_simplex_agrees_with_highs_on_degenerate_programs():
    # integer data with many zero right-hand sides, like the matching LPs
    rng = np.random.default_rng(9)
    for _ in range(60):
        n, m = int(rng.integers(5, 40)), int(rng.integers(1, 25))
        A = rng.integers(-3, 4, (m, n)).astype(float) * (rng.random((m, n)) < 0.4)
        b = rng.integers(0, 2, m).astype(float)
        c = rng.normal(size=n)
        lp = LinearProgram(c, A, b)
        s, h = lp_solve(lp, method="simplex"), lp_solve(lp, method="highs")
        assert abs(s.objective - h.objective) <= 1e-7


def test_no_coordinate_improvement_at_optimum():
    rng = np.random.default_rng(10)
    for _ in range(20):
        n, m = int(rng.integers(2, 6)), int(rng.integers(1, 5))
        A, b, c = rng.normal(size=(m, n)), rng.uniform(0, 2, m), rng.normal(size=n)
        lp = LinearProgram(c, A, b)
        sol = lp_solve(lp, method="simplex")
        for j in range(n):
            for step in (-1e-4, 1e-4):
                z = sol.z.copy()
                z[j] += step
                if lp.is_feasible(z, tol=1e-9):
                    assert c @ z <= sol.objective + 1e-9


def test_hungarian_examples():
    assert hungarian_max(np.eye(3)) == [(0, 0), (1, 1), (2, 2)]
    S = np.array([[0.1, 0.9], [0.8, 0.2]])
    pairs = hungarian_max(S)
    assert pairs == [(0, 1), (1, 0)]
    assert assignment_score(S, pairs) == pytest.approx(1.7)


def test_hungarian_matches_all_permutations_6x6():
    S = np.random.default_rng(6).random((6, 6))
    best = max(sum(S[i, p[i]] for i in range(6)) for p in itertools.permutations(range(6)))
    assert assignment_score(S, hungarian_max(S)) == pytest.approx(best, abs=1e-12)


def test_hungarian_rejects_bad_input():
    with pytest.raises(ValueError):
        hungarian_max(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        hungarian_max(np.array([[np.nan]]))
    assert hungarian_max(np.zeros((0, 3))) == []


def test_hungarian_ties_follow_scan_order():
    assert hungarian_max(np.ones((3, 3))) == [(0, 0), (1, 1), (2, 2)]


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n1=st.integers(1, 6), n2=st.integers(1, 6))
def test_hungarian_rectangular_optimal_partial_permutation(seed, n1, n2):
    S = np.random.default_rng(seed).normal(size=(n1, n2))
    pairs = hungarian_max(S)
    assert len(pairs) == min(n1, n2)
    assert len({i for i, _ in pairs}) == len({j for _, j in pairs}) == len(pairs)
    assert assignment_score(S, pairs) == pytest.approx(best_assignment_bruteforce(S), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6), scale=st.floats(0.01, 100))
def test_hungarian_scale_and_permutation_invariance(seed, n, scale):
    rng = np.random.default_rng(seed)
    S = rng.random((n, n))
    base = hungarian_max(S)
    assert hungarian_max(scale * S) == base
    pr, pc = rng.permutation(n), rng.permutation(n)
    moved = hungarian_max(S[np.ix_(pr, pc)])
    assert assignment_score(S[np.ix_(pr, pc)], moved) == pytest.approx(assignment_score(S, base))
