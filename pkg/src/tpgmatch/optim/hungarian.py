"""Rectangular maximum-weight assignment."""
import numpy as np

from .. import kernels


def hungarian_max(S):
    """Best one-to-one assignment of rows to columns of ``S``.

    Returns a list of ``(row, col)`` pairs sorted by row, of length
    ``min(n1, n2)``. Ties are resolved deterministically by column scan order.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2:
        raise ValueError("hungarian_max expects a matrix")
    if not np.all(np.isfinite(S)):
        raise ValueError("hungarian_max expects finite entries")
    n1, n2 = S.shape
    if n1 == 0 or n2 == 0:
        return []
    transposed = n1 > n2
    cost = -(S.T if transposed else S)
    col4row = kernels.lsap_min(np.ascontiguousarray(cost))
    pairs = [(int(r), int(c)) for r, c in enumerate(col4row)]
    if transposed:
        pairs = sorted((c, r) for r, c in pairs)
    return pairs


def assignment_score(S, pairs):
    S = np.asarray(S, dtype=float)
    return float(sum(S[i, j] for i, j in pairs))
