"""Brute-force references: exhaustive and slow on purpose.

They share no code with the solvers they check and back both the test-suite
and ``tpgmatch selftest``.
"""
import itertools

import numpy as np


def count_backtrackless_walks(adj, k):
    """Walk counts ``C[a, b]`` of length ``k`` that never reverse the previous arc.

    A walk ``v0 v1 ... vk`` follows arcs ``adj[v_t, v_{t+1}] != 0`` and must
    satisfy ``v_{t+2} != v_t``. Enumerated by depth-first search.
    """
    adj = np.asarray(adj)
    n = len(adj)
    nbrs = [np.flatnonzero(adj[v]).tolist() for v in range(n)]
    C = np.zeros((n, n), dtype=np.int64)

    def walk(start, prev, cur, depth):
        if depth == k:
            C[start, cur] += 1
            return
        for nxt in nbrs[cur]:
            if nxt != prev:
                walk(start, cur, nxt, depth + 1)

    for s in range(n):
        walk(s, -1, s, 0)
    return C


def random_walk_series_3node(w, p):
    """Two-step random-walk similarities for the 3-node example, term by term.

    ``w[(i, j)]`` is the weight of arc ``i -> j`` (1-based labels).
    """
    W = lambda i, j: w[(i, j)]
    return np.array([
        p[0] * (1 + W(1, 2) * W(2, 1) + W(1, 3) * W(3, 1)) + p[0] * (W(2, 1) + W(2, 3) * W(3, 1))
        + p[0] * (W(3, 1) + W(3, 2) * W(2, 1)),
        p[1] * (W(1, 2) + W(1, 3) * W(3, 2)) + p[1] * (1 + W(2, 1) * W(1, 2) + W(2, 3) * W(3, 2))
        + p[1] * (W(3, 2) + W(3, 1) * W(1, 2)),
        p[2] * (W(1, 3) + W(1, 2) * W(2, 3)) + p[2] * (W(2, 3) + W(2, 1) * W(1, 3))
        + p[2] * (1 + W(3, 1) * W(1, 3) + W(3, 2) * W(2, 3)),
    ])


def backtrackless_series_3node(w, p):
    """Same example with the tottering products removed from the diagonal terms."""
    W = lambda i, j: w[(i, j)]
    return np.array([
        p[0] + p[0] * (W(2, 1) + W(2, 3) * W(3, 1)) + p[0] * (W(3, 1) + W(3, 2) * W(2, 1)),
        p[1] * (W(1, 2) + W(1, 3) * W(3, 2)) + p[1] + p[1] * (W(3, 2) + W(3, 1) * W(1, 2)),
        p[2] * (W(1, 3) + W(1, 2) * W(2, 3)) + p[2] * (W(2, 3) + W(2, 1) * W(1, 3)) + p[2],
    ])


def example_matrix_3node(w):
    """``W[target, source]`` for the 3-node example."""
    M = np.zeros((3, 3))
    for (i, j), v in w.items():
        M[j - 1, i - 1] = v
    return M


def lp_by_vertices(c, A, b, tol=1e-9):
    """Maximise ``c'z`` over ``{A z <= b, 0 <= z <= 1}`` by visiting every vertex."""
    c = np.asarray(c, float)
    A = np.asarray(A, float).reshape(-1, len(c))
    b = np.asarray(b, float)
    n = len(c)
    G = np.vstack([A, -np.eye(n), np.eye(n)])
    h = np.concatenate([b, np.zeros(n), np.ones(n)])
    best, best_z = -np.inf, None
    for rows in itertools.combinations(range(len(G)), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        z = np.linalg.solve(M, h[list(rows)])
        if np.all(G @ z <= h + tol):
            val = float(c @ z)
            if val > best:
                best, best_z = val, z
    return best, best_z


def best_assignment_bruteforce(S):
    """Maximum score over all one-to-one assignments of the smaller side."""
    S = np.asarray(S, float)
    n1, n2 = S.shape
    if n1 <= n2:
        return max(sum(S[i, p[i]] for i in range(n1))
                   for p in itertools.permutations(range(n2), n1))
    return best_assignment_bruteforce(S.T)


def qap_bruteforce(g1, g2, node_aff, edge_aff, X):
    """``vec(X)' K vec(X)`` by looping over every pair of node pairs."""
    n1, n2 = g1.node_count, g2.node_count
    arcs1 = {(int(s), int(t)): k for k, (s, t) in enumerate(g1.edges)}
    arcs2 = {(int(s), int(t)): k for k, (s, t) in enumerate(g2.edges)}
    total = 0.0
    for i1, i2, j1, j2 in itertools.product(range(n1), range(n2), range(n1), range(n2)):
        xa, xb = X[i1, i2], X[j1, j2]
        if xa == 0 or xb == 0:
            continue
        if i1 == j1 and i2 == j2:
            total += xa * xb * node_aff(g1.node_attrs[i1], g2.node_attrs[i2])
        elif (i1, j1) in arcs1 and (i2, j2) in arcs2:
            total += xa * xb * edge_aff(g1.edge_attrs[arcs1[(i1, j1)]],
                                        g2.edge_attrs[arcs2[(i2, j2)]])
    return total
