"""Constraint audit for match results, rebuilt from the operand graphs alone."""
import numpy as np

# PASS/FAIL lines from the acceptance tests, echoed again in the terminal summary
ACCEPTANCE_LINES = []


def tpg_arcs(g1, g2):
    """TPG arcs ``(src, dst, pattern arc, target arc)`` in (src, dst) order."""
    n2 = g2.node_count
    arcs = []
    for a, (i1, j1) in enumerate(g1.edges.tolist()):
        for b, (i2, j2) in enumerate(g2.edges.tolist()):
            arcs.append((i1 * n2 + i2, j1 * n2 + j2, a, b))
    arcs.sort()
    return arcs


def constraint_violation(g1, g2, x, y):
    """Largest violation over the box and all six constraint families."""
    n1, n2 = g1.node_count, g2.node_count
    X = np.asarray(x).reshape(n1, n2)
    y = np.asarray(y)
    arcs = tpg_arcs(g1, g2)
    assert len(arcs) == len(y)
    out1, in1 = g1.out_degrees(), g1.in_degrees()
    out2, in2 = g2.out_degrees(), g2.in_degrees()
    worst = [0.0,
             -X.min(initial=0), X.max(initial=0) - 1,
             -y.min(initial=0), y.max(initial=0) - 1]
    worst.extend(X.sum(axis=1) - 1)
    worst.extend(X.sum(axis=0) - 1)
    per_e1 = np.zeros(g1.edge_count)
    per_e2 = np.zeros(g2.edge_count)
    out_sum = np.zeros(n1 * n2)
    in_sum = np.zeros(n1 * n2)
    for t, (s, d, a, b) in enumerate(arcs):
        per_e1[a] += y[t]
        per_e2[b] += y[t]
        out_sum[s] += y[t]
        in_sum[d] += y[t]
    worst.extend(per_e1 - 1)
    worst.extend(per_e2 - 1)
    for k in range(n1 * n2):
        i1, i2 = divmod(k, n2)
        worst.append(out_sum[k] - min(out1[i1], out2[i2]) * X[i1, i2])
        worst.append(in_sum[k] - min(in1[i1], in2[i2]) * X[i1, i2])
    return float(max(worst))
