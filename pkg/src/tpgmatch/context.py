"""Contextual similarities: walk-accumulated affinities on the product graph.

Closed forms solve one linear system each:

* random walks:        ``p * (I - lam W)^-1 1``
* backtrackless walks: ``p * (1 - lam^2) (I - lam W + lam^2 Q)^-1 1``

:func:`cs_truncated` sums the defining series term by term and exists as a
reference for the closed forms.
"""
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SolverError

MODELS = ("pairwise", "random_walk", "backtrackless")
DENSE_BELOW = 500


@dataclass(frozen=True)
class ContextualSimilarity:
    values: np.ndarray
    model: str
    iterations: int = 0
    residual: float = 0.0


def _solve(M, rhs, rtol, max_iter_factor, dense_below):
    """Solve the nonsymmetric system ``M x = rhs``; returns (x, iterations, residual)."""
    n = M.shape[0]
    if n < dense_below:
        A = M.toarray()
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            try:
                x = scipy.linalg.solve(A, rhs)
            except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as exc:
                raise SolverError(f"walk system is singular or ill-conditioned: {exc}") from exc
        iterations = 1
    else:
        count = [0]

        def cb(_):
            count[0] += 1

        x, info = spla.gmres(M, rhs, rtol=rtol, atol=0.0, restart=min(n, 60),
                             maxiter=max_iter_factor * n, callback=cb,
                             callback_type="pr_norm")
        iterations = count[0]
        if info < 0:
            raise SolverError("GMRES breakdown on walk system")
    res = float(np.linalg.norm(M @ x - rhs))
    tol = rtol * np.linalg.norm(rhs)
    if not np.all(np.isfinite(x)) or res > max(tol, 1e-13 * np.sqrt(n)):
        raise SolverError(f"walk system did not converge (residual {res:.3e})", residual=res)
    return x, iterations, res


def _system(pg, model):
    n = pg.dim
    W = pg.W.to_scipy()
    lam = pg.lam
    M = sp.identity(n, format="csr") - lam * W
    if model == "backtrackless":
        M = M + sp.diags(lam * lam * pg.q)
    return M.tocsr()


def _finish(pg, x, model, it, res):
    vals = pg.p * x
    vals = np.where(vals < 0, 0.0, vals)
    return ContextualSimilarity(vals, model, it, res)


def cs_pairwise(pg):
    return ContextualSimilarity(pg.p.copy(), "pairwise")


def cs_random_walk(pg, rtol=1e-9, max_iter_factor=10, dense_below=DENSE_BELOW):
    x, it, res = _solve(_system(pg, "random_walk"), np.ones(pg.dim), rtol, max_iter_factor,
                        dense_below)
    return _finish(pg, x, "random_walk", it, res)


def cs_backtrackless(pg, rtol=1e-9, max_iter_factor=10, dense_below=DENSE_BELOW):
    lam = pg.lam
    scale = 1.0 - lam * lam
    if scale > 0:
        x, it, res = _solve(_system(pg, "backtrackless"), np.ones(pg.dim), rtol, max_iter_factor,
                            dense_below)
        return _finish(pg, scale * x, "backtrackless", it, res)
    # lam = 1 (degree floor). A product node with no arcs has the row
    # (1 - lam^2) e_k, so its value is exactly p_k; anything coupled is singular.
    isolated = (pg.out_degree == 0) & (pg.in_degree == 0)
    if not np.all(isolated):
        raise SolverError("backtrackless system is singular at lambda = 1 "
                          f"({int(np.count_nonzero(~isolated))} product nodes carry arcs)")
    return _finish(pg, np.ones(pg.dim), "backtrackless", 0, 0.0)


def contextual_similarity(pg, model, **solver):
    if model == "pairwise":
        return cs_pairwise(pg)
    if model == "random_walk":
        return cs_random_walk(pg, **solver)
    if model == "backtrackless":
        return cs_backtrackless(pg, **solver)
    raise ValueError(f"unknown walk model {model!r}; expected one of {MODELS}")


def backtrackless_walk_matrices(W, k_max, q=None):
    """``[W_0, ..., W_kmax]`` from the backtrackless recurrence.

    ``W_0 = I``, ``W_1 = W``, ``W_2 = W^2 - (Q + I)`` and
    ``W_k = W_{k-1} W - W_{k-2} Q``, with ``Q = diag(W^2) - I`` unless given.
    For a symmetric 0/1 adjacency matrix entry ``(a, b)`` of ``W_k`` counts
    the length-``k`` walks between ``a`` and ``b`` that never step straight
    back along the arc just used. Returns dense arrays when ``W`` is dense,
    scipy CSR matrices otherwise.
    """
    dense = isinstance(W, np.ndarray)
    Wm = W if dense else sp.csr_matrix(W)
    n = Wm.shape[0]
    eye = np.eye(n) if dense else sp.identity(n, format="csr")
    W2 = Wm @ Wm
    if q is None:
        q = (np.diag(W2) if dense else W2.diagonal()) - 1.0
    Q = np.diag(q) if dense else sp.diags(q, format="csr")
    mats = [eye]
    if k_max >= 1:
        mats.append(Wm)
    if k_max >= 2:
        mats.append(W2 - (Q + eye))
    for _ in range(3, k_max + 1):
        mats.append(mats[-1] @ Wm - mats[-2] @ Q)
    return mats


def cs_truncated(pg, model, n_terms, lam=None):
    """``p * (sum_{k<=n_terms} lam^k W_k) 1`` summed term by term.

    ``lam`` overrides the product graph's discount. No ``(1 - lam^2)``
    factor is applied: for backtrackless walks the full series already
    equals the closed form including that factor.
    """
    if n_terms < 0:
        raise ValueError("n_terms must be non-negative")
    lam = pg.lam if lam is None else float(lam)
    n = pg.dim
    if model == "pairwise":
        return cs_pairwise(pg)
    if model == "random_walk":
        W = pg.W.to_scipy()
        term = np.ones(n)
        acc = term.copy()
        for k in range(1, n_terms + 1):
            term = lam * (W @ term)
            acc += term
        return ContextualSimilarity(pg.p * acc, model, n_terms)
    if model == "backtrackless":
        W = pg.W.toarray() if n <= 400 else pg.W.to_scipy()
        ones = np.ones(n)
        acc = ones.copy()
        if n_terms >= 1:
            mats = backtrackless_walk_matrices(W, min(n_terms, 2), q=pg.q)
            prev2, prev1 = mats[0], mats[1]
            acc += lam * (prev1 @ ones)
            Q = np.diag(pg.q) if isinstance(W, np.ndarray) else sp.diags(pg.q, format="csr")
            scale = lam
            for k in range(2, n_terms + 1):
                cur = mats[2] if k == 2 else prev1 @ W - prev2 @ Q
                scale *= lam
                acc += scale * (cur @ ones)
                prev2, prev1 = prev1, cur
        return ContextualSimilarity(pg.p * np.asarray(acc).ravel(), model, n_terms)
    raise ValueError(f"unknown walk model {model!r}")
