"""Hot inner loops.

Every kernel exists twice: ``<name>_numba`` (scalar loops under ``@njit``)
and ``<name>_numpy`` (vectorised numpy). The bare ``<name>`` is bound to one
of them at import time according to :data:`tpgmatch._accel.USE_NUMBA`.
Both variants must return identical results, ties included; the test-suite
checks this and ``benchmarks/bench_kernels.py`` times them against each other.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

# ---------------------------------------------------------------- CSR matvec


@njit
def csr_matvec_numba(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    y = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        y[i] = acc
    return y


def csr_matvec_numpy(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    return np.bincount(rows, weights=data * x[indices], minlength=n).astype(float)


# ------------------------------------------------------- diag(W @ W), square W


@njit
def csr_square_diag_numba(indptr, indices, data):
    n = indptr.shape[0] - 1
    out = np.zeros(n)
    for k in range(n):
        acc = 0.0
        for p in range(indptr[k], indptr[k + 1]):
            l = indices[p]
            # binary search for column k in row l (columns are sorted)
            lo = indptr[l]
            hi = indptr[l + 1]
            while lo < hi:
                mid = (lo + hi) // 2
                if indices[mid] < k:
                    lo = mid + 1
                else:
                    hi = mid
            if lo < indptr[l + 1] and indices[lo] == k:
                acc += data[p] * data[lo]
        out[k] = acc
    return out


def csr_square_diag_numpy(indptr, indices, data):
    n = indptr.shape[0] - 1
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    cols = indices.astype(np.int64)
    keys = rows * n + cols  # sorted because CSR is canonical
    mirror = cols * n + rows
    pos = np.searchsorted(keys, mirror)
    pos_c = np.minimum(pos, max(len(keys) - 1, 0))
    hit = (pos < len(keys)) & (keys[pos_c] == mirror) if len(keys) else np.zeros(0, bool)
    prod = np.where(hit, data * data[pos_c], 0.0) if len(keys) else np.zeros(0)
    return np.bincount(rows, weights=prod, minlength=n).astype(float)


# --------------------------------------------------------- product-graph arcs


@njit
def product_arcs_numba(n1, n2, ptr1, dst1, ptr2, dst2):
    """Arcs of the tensor product graph in (source, target) order.

    ``ptr*``/``dst*`` are out-adjacency CSR arrays of the operands with
    targets sorted inside each row; the arc id of an operand arc is its
    position in ``dst*``.
    """
    total = 0
    for a1 in range(n1):
        d1 = ptr1[a1 + 1] - ptr1[a1]
        for a2 in range(n2):
            total += d1 * (ptr2[a2 + 1] - ptr2[a2])
    src = np.empty(total, np.int64)
    tgt = np.empty(total, np.int64)
    e1 = np.empty(total, np.int64)
    e2 = np.empty(total, np.int64)
    t = 0
    for a1 in range(n1):
        for a2 in range(n2):
            s = a1 * n2 + a2
            for p in range(ptr1[a1], ptr1[a1 + 1]):
                b1 = dst1[p]
                for q in range(ptr2[a2], ptr2[a2 + 1]):
                    src[t] = s
                    tgt[t] = b1 * n2 + dst2[q]
                    e1[t] = p
                    e2[t] = q
                    t += 1
    return src, tgt, e1, e2


def product_arcs_numpy(n1, n2, ptr1, dst1, ptr2, dst2):
    m1, m2 = len(dst1), len(dst2)
    src1 = np.repeat(np.arange(n1, dtype=np.int64), np.diff(ptr1))
    src2 = np.repeat(np.arange(n2, dtype=np.int64), np.diff(ptr2))
    e1 = np.repeat(np.arange(m1, dtype=np.int64), m2)
    e2 = np.tile(np.arange(m2, dtype=np.int64), m1)
    src = src1[e1] * n2 + src2[e2]
    tgt = dst1[e1].astype(np.int64) * n2 + dst2[e2]
    order = np.lexsort((tgt, src))
    return src[order], tgt[order], e1[order], e2[order]


# ------------------------------------------------- attribute distances by pair


@njit
def paired_sqdist_numba(a, b, ia, ib):
    out = np.empty(ia.shape[0])
    d = a.shape[1]
    for t in range(ia.shape[0]):
        acc = 0.0
        for c in range(d):
            diff = a[ia[t], c] - b[ib[t], c]
            acc += diff * diff
        out[t] = acc
    return out


def paired_sqdist_numpy(a, b, ia, ib):
    diff = a[ia] - b[ib]
    return np.einsum("ij,ij->i", diff, diff)


# -------------------------------------------------------------- assignment


@njit
def lsap_min_numba(cost):
    """Shortest augmenting path assignment; ``cost`` is (nr, nc), nr <= nc."""
    nr, nc = cost.shape
    u = np.zeros(nr)
    v = np.zeros(nc)
    shortest = np.empty(nc)
    path = np.full(nc, -1, np.int64)
    col4row = np.full(nr, -1, np.int64)
    row4col = np.full(nc, -1, np.int64)
    sr = np.zeros(nr, np.bool_)
    sc = np.zeros(nc, np.bool_)
    for cur in range(nr):
        shortest[:] = np.inf
        sr[:] = False
        sc[:] = False
        min_val = 0.0
        i = cur
        sink = -1
        while sink == -1:
            sr[i] = True
            lowest = np.inf
            best = -1
            for j in range(nc):
                if sc[j]:
                    continue
                r = min_val + cost[i, j] - u[i] - v[j]
                if r < shortest[j]:
                    path[j] = i
                    shortest[j] = r
                s = shortest[j]
                if best == -1 or s < lowest or (
                    s == lowest and row4col[j] == -1 and row4col[best] != -1
                ):
                    lowest = s
                    best = j
            min_val = lowest
            if not np.isfinite(min_val):
                return np.full(nr, -1, np.int64)
            sc[best] = True
            if row4col[best] == -1:
                sink = best
            else:
                i = row4col[best]
        u[cur] += min_val
        for i2 in range(nr):
            if sr[i2] and i2 != cur:
                u[i2] += min_val - shortest[col4row[i2]]
        for j in range(nc):
            if sc[j]:
                v[j] -= min_val - shortest[j]
        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            nxt = col4row[i]
            col4row[i] = j
            j = nxt
            if i == cur:
                break
    return col4row


def lsap_min_numpy(cost):
    nr, nc = cost.shape
    u = np.zeros(nr)
    v = np.zeros(nc)
    path = np.full(nc, -1, np.int64)
    col4row = np.full(nr, -1, np.int64)
    row4col = np.full(nc, -1, np.int64)
    for cur in range(nr):
        shortest = np.full(nc, np.inf)
        sr = np.zeros(nr, bool)
        sc = np.zeros(nc, bool)
        min_val = 0.0
        i = cur
        sink = -1
        while sink == -1:
            sr[i] = True
            rem = ~sc
            r = min_val + cost[i] - u[i] - v
            better = rem & (r < shortest)
            path[better] = i
            shortest[better] = r[better]
            masked = np.where(rem, shortest, np.inf)
            lowest = masked.min()
            if not np.isfinite(lowest):
                return np.full(nr, -1, np.int64)
            ties = np.flatnonzero(rem & (shortest == lowest))
            free = ties[row4col[ties] == -1]
            best = free[0] if len(free) else ties[0]
            min_val = lowest
            sc[best] = True
            if row4col[best] == -1:
                sink = best
            else:
                i = row4col[best]
        u[cur] += min_val
        others = np.flatnonzero(sr)
        others = others[others != cur]
        u[others] += min_val - shortest[col4row[others]]
        v[sc] -= min_val - shortest[sc]
        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            col4row[i], j = j, col4row[i]
            if i == cur:
                break
    return col4row


if USE_NUMBA:
    csr_matvec = csr_matvec_numba
    csr_square_diag = csr_square_diag_numba
    product_arcs = product_arcs_numba
    paired_sqdist = paired_sqdist_numba
    lsap_min = lsap_min_numba
else:
    csr_matvec = csr_matvec_numpy
    csr_square_diag = csr_square_diag_numpy
    product_arcs = product_arcs_numpy
    paired_sqdist = paired_sqdist_numpy
    lsap_min = lsap_min_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
