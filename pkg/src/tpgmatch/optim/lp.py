"""Box-constrained linear programs ``max c'z  s.t.  A z <= b, 0 <= z <= 1``.

Two solvers are available behind :func:`lp_solve`:

``"simplex"``
    A bounded-variable revised simplex written here. Slack basis start
    (``b >= 0`` makes ``z = 0`` feasible), devex pricing, explicit basis
    inverse with rank-one updates and periodic refactorisation. Matching
    LPs are massively degenerate (most right-hand sides are zero), so the
    main pass runs on a slightly raised ``b``; the perturbation is then
    removed and the few resulting infeasibilities are repaired by dual
    simplex pivots before a final primal pass on the true data. Ties in the
    ratio test use the lexicographic rule, and Bland's rule takes over if a
    run of degenerate pivots still grows too long.
``"highs"``
    HiGHS dual simplex through :func:`scipy.optimize.linprog`, for LPs with
    tens of thousands of columns.

``"auto"`` uses the former for small problems and the latter otherwise.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from ..errors import SolverError
from ..sparse import SparseMatrix

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
PIVOT_TOL = 1e-7
AUTO_SIMPLEX_LIMIT = 4000        # nvars + nrows
REFACTOR_EVERY = 100
DEGENERATE_RUN = 5000          # consecutive degenerate pivots before Bland
TIE_TOL = 1e-12
STABLE_FRACTION = 1e-2       # tied pivots smaller than this share of the largest are skipped
PERTURB = 1e-6               # scale of the right-hand-side shift used against degeneracy
PERTURB_SEED = 20240601


@dataclass(frozen=True, eq=False)
class LinearProgram:
    c: np.ndarray
    A: SparseMatrix
    b: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        b = np.asarray(self.b, dtype=float)
        A = self.A if isinstance(self.A, SparseMatrix) else SparseMatrix.from_dense(self.A)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "A", A)
        if A.shape != (len(b), len(c)):
            raise ValueError(f"A has shape {A.shape}, expected {(len(b), len(c))}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(b)) and np.all(np.isfinite(A.data))):
            raise ValueError("LP data must be finite")
        if np.any(b < 0):
            raise ValueError("right-hand sides must be non-negative")

    @property
    def nvars(self):
        return len(self.c)

    @property
    def nrows(self):
        return len(self.b)

    def is_feasible(self, z, tol=FEAS_TOL):
        z = np.asarray(z, dtype=float)
        return bool(np.all(self.A.matvec(z) <= self.b + tol)
                    and np.all(z >= -1e-9) and np.all(z <= 1 + 1e-9))


@dataclass(frozen=True, eq=False)
class LpSolution:
    z: np.ndarray
    objective: float
    status: str                  # "optimal" | "iteration_limit"
    iterations: int = 0
    method: str = "simplex"


def default_pivot_budget(lp):
    return 50 * (lp.nvars + lp.nrows)


def lp_solve(lp, method="auto", max_pivots=None):
    if max_pivots is None:
        max_pivots = default_pivot_budget(lp)
    if method == "auto":
        method = "simplex" if lp.nvars + lp.nrows <= AUTO_SIMPLEX_LIMIT else "highs"
    if method not in ("simplex", "highs"):
        raise ValueError(f"unknown LP method {method!r}")
    # reduced-cost tolerances are absolute; solve with max |c| = 1
    scale = float(np.abs(lp.c).max()) if lp.nvars else 0.0
    work = lp if scale in (0.0, 1.0) else LinearProgram(lp.c / scale, lp.A, lp.b)
    sol = (_revised_simplex if method == "simplex" else _highs)(work, max_pivots)
    if work is not lp:
        sol = LpSolution(sol.z, float(lp.c @ sol.z), sol.status, sol.iterations, sol.method)
    if not lp.is_feasible(sol.z):
        raise SolverError(f"internal error: {sol.method} returned an infeasible point")
    return sol


def _highs(lp, max_pivots):
    if lp.nvars == 0:
        return LpSolution(np.zeros(0), 0.0, "optimal", 0, "highs")
    res = linprog(-lp.c, A_ub=lp.A.to_scipy() if lp.nrows else None,
                  b_ub=lp.b if lp.nrows else None, bounds=(0.0, 1.0), method="highs-ds",
                  options={"maxiter": int(max_pivots), "primal_feasibility_tolerance": 1e-9,
                           "dual_feasibility_tolerance": 1e-9})
    if res.status == 0:
        status = "optimal"
    elif res.status == 1:
        status = "iteration_limit"
    else:
        raise SolverError(f"HiGHS failed: {res.message}")
    z = np.clip(res.x, 0.0, 1.0)
    return LpSolution(z, float(lp.c @ z), status, int(getattr(res, "nit", 0)), "highs")


def _revised_simplex(lp, max_pivots):
    s = _Simplex(lp)
    if s.m == 0:
        s.primal(max_pivots)
        return s.solution("optimal")
    rng = np.random.default_rng(PERTURB_SEED)
    s.set_rhs(lp.b + PERTURB * (1.0 + rng.random(s.m)))
    status = s.primal(max_pivots)
    s.set_rhs(lp.b)
    if status != "optimal":
        if s.primal_infeasibility() > FEAS_TOL:
            # no feasible incumbent for the unperturbed program
            return LpSolution(np.zeros(s.n), 0.0, status, s.pivots, "simplex")
        return s.solution(status)
    if not s.dual_cleanup(max_pivots):
        s = _Simplex(lp)            # repair failed: start over without perturbation
    return s.solution(s.primal(max_pivots))


class _Simplex:
    """Working state of the bounded-variable revised simplex.

    Columns ``0..n-1`` are the structural variables with box ``[0, 1]``,
    columns ``n..n+m-1`` the row slacks with bounds ``[0, inf)``.
    """

    def __init__(self, lp):
        self.n, self.m = n, m = lp.nvars, lp.nrows
        self.c = lp.c
        self.A = lp.A.to_scipy().tocsc()
        self.AT = self.A.T.tocsr()
        self.cost = np.concatenate([lp.c, np.zeros(m)])
        self.ub = np.concatenate([np.ones(n), np.full(m, np.inf)])
        self.basis = np.arange(n, n + m)
        self.in_basis = np.zeros(n + m, bool)
        self.in_basis[self.basis] = True
        self.at_upper = np.zeros(n + m, bool)
        self.weights = np.ones(n + m)
        self.b = lp.b.copy()
        self.Binv = np.eye(m)
        self.xB = self.b.copy()
        self.pivots = 0
        self.since_refactor = 0

    def column(self, j):
        col = np.zeros(self.m)
        if j < self.n:
            lo, hi = self.A.indptr[j], self.A.indptr[j + 1]
            col[self.A.indices[lo:hi]] = self.A.data[lo:hi]
        else:
            col[j - self.n] = 1.0
        return col

    def refactor(self):
        if self.m:
            B = np.column_stack([self.column(j) for j in self.basis])
            self.Binv = np.linalg.inv(B)
        upper = np.flatnonzero(self.at_upper[:self.n] & ~self.in_basis[:self.n])
        rhs = self.b - (np.asarray(self.A[:, upper].sum(axis=1)).ravel() if len(upper) else 0.0)
        self.xB = self.Binv @ rhs
        self.since_refactor = 0

    def set_rhs(self, b):
        self.b = np.asarray(b, dtype=float).copy()
        self.refactor()

    def reduced_costs(self):
        y = self.Binv.T @ self.cost[self.basis]
        return np.concatenate([self.c - self.AT @ y, -y])

    def primal_infeasibility(self):
        if not self.m:
            return 0.0
        return float(max(np.max(-self.xB), np.max(self.xB - self.ub[self.basis]), 0.0))

    def pivot(self, q, r, alpha, entering_value, leaving_to_upper):
        """Swap column ``q`` into basis row ``r``; ``xB`` must already be stepped."""
        leaving = self.basis[r]
        piv = alpha[r]
        prow = self.Binv[r]
        alpha_row = np.concatenate([self.AT @ prow, prow]) / piv
        wq = self.weights[q]
        np.maximum(self.weights, alpha_row ** 2 * wq, out=self.weights)
        self.weights[leaving] = max(wq / piv ** 2, 1.0)
        self.weights[q] = 1.0
        if self.weights.max() > 1e6:
            self.weights[:] = 1.0
        self.basis[r] = q
        self.in_basis[q] = True
        self.in_basis[leaving] = False
        self.at_upper[q] = False
        self.at_upper[leaving] = leaving_to_upper
        self.xB[r] = entering_value
        row = prow / piv
        self.Binv -= np.outer(alpha, row)
        self.Binv[r] = row
        self.pivots += 1
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            self.refactor()

    def primal(self, max_pivots):
        m = self.m
        degenerate = 0
        while True:
            d = self.reduced_costs()
            improving = ~self.in_basis & (((~self.at_upper) & (d > OPT_TOL))
                                          | (self.at_upper & (d < -OPT_TOL)))
            cand = np.flatnonzero(improving)
            if len(cand) == 0:
                return "optimal"
            if self.pivots >= max_pivots:
                return "iteration_limit"
            bland = degenerate > DEGENERATE_RUN
            q = cand[0] if bland else cand[np.argmax(d[cand] ** 2 / self.weights[cand])]
            direction = -1.0 if self.at_upper[q] else 1.0
            alpha = self.Binv @ self.column(q)
            delta = direction * alpha

            t_best = self.ub[q]          # bound flip of the entering variable
            r = -1
            dec = delta > PIVOT_TOL
            inc = delta < -PIVOT_TOL
            ratios = np.full(m, np.inf)
            ratios[dec] = np.maximum(self.xB[dec], 0.0) / delta[dec]
            ub_b = self.ub[self.basis]
            finite_inc = inc & np.isfinite(ub_b)
            ratios[finite_inc] = (np.maximum(ub_b[finite_inc] - self.xB[finite_inc], 0.0)
                                  / -delta[finite_inc])
            if m:
                t_row = ratios.min()
                if t_row <= t_best + TIE_TOL:
                    ties = np.flatnonzero(ratios <= t_row + TIE_TOL)
                    mag = np.abs(delta[ties])
                    ties = ties[mag >= STABLE_FRACTION * mag.max()]
                    if bland:
                        r = ties[np.argmin(self.basis[ties])]
                    else:
                        flip = t_best if t_best <= t_row + TIE_TOL else None
                        r = _lex_leaving(ties, self.Binv, delta, flip)
                    if r >= 0:
                        t_best = ratios[r]
            if not np.isfinite(t_best):
                raise SolverError("internal error: LP unbounded despite box constraints")

            degenerate = degenerate + 1 if t_best <= 1e-12 else 0
            self.xB = self.xB - delta * t_best
            if r == -1:
                self.at_upper[q] = not self.at_upper[q]
                self.pivots += 1
                continue
            entering_value = (1.0 - t_best) if self.at_upper[q] else t_best
            self.pivot(q, r, alpha, entering_value, bool(inc[r]))

    def dual_cleanup(self, max_pivots):
        """Restore primal feasibility from a dual-feasible basis.

        Returns False if it cannot, in which case the caller falls back to a
        plain primal run.
        """
        while True:
            ub_b = self.ub[self.basis]
            infeas = np.maximum(-self.xB, self.xB - ub_b)
            r = int(np.argmax(infeas))
            if infeas[r] <= FEAS_TOL:
                return True
            if self.pivots >= max_pivots:
                return False
            below = self.xB[r] < 0
            prow = self.Binv[r]
            alpha_row = np.concatenate([self.AT @ prow, prow])
            d = self.reduced_costs()
            lower = ~self.in_basis & ~self.at_upper
            upper = ~self.in_basis & self.at_upper
            if below:
                ok = (lower & (alpha_row < -PIVOT_TOL)) | (upper & (alpha_row > PIVOT_TOL))
            else:
                ok = (lower & (alpha_row > PIVOT_TOL)) | (upper & (alpha_row < -PIVOT_TOL))
            cand = np.flatnonzero(ok)
            if len(cand) == 0:
                return False
            ratio = np.abs(d[cand]) / np.abs(alpha_row[cand])
            best = ratio <= ratio.min() + TIE_TOL
            q = cand[best][np.argmax(np.abs(alpha_row[cand[best]]))]
            alpha = self.Binv @ self.column(q)
            bound = 0.0 if below else ub_b[r]
            theta = (self.xB[r] - bound) / alpha[r]
            start = 1.0 if self.at_upper[q] else 0.0
            self.xB = self.xB - alpha * theta
            self.pivot(q, r, alpha, start + theta, not below)

    def solution(self, status):
        n = self.n
        z = np.zeros(n)
        z[self.at_upper[:n] & ~self.in_basis[:n]] = 1.0
        struct = self.basis < n
        z[self.basis[struct]] = self.xB[struct]
        z = np.clip(z, 0.0, 1.0)
        return LpSolution(z, float(self.c @ z), status, self.pivots, "simplex")


def _lex_leaving(ties, Binv, delta, flip_ratio):
    """Lexicographic ratio test among tied rows.

    Equivalent to perturbing ``b`` by ``(eps, eps^2, ...)``: the row whose
    ``B^-1`` row, scaled by the step direction, is lexicographically smallest
    leaves. Returns -1 when the entering variable's own bound flip wins.
    """
    M = Binv[ties] / delta[ties][:, None]
    if flip_ratio is not None:
        M = np.vstack([M, np.zeros(Binv.shape[1])])
    alive = np.arange(len(M))
    for j in range(M.shape[1]):
        if len(alive) == 1:
            break
        col = M[alive, j]
        lo = col.min()
        alive = alive[col <= lo + 1e-12 * max(1.0, abs(lo))]
    k = alive[0]
    return -1 if k == len(ties) else ties[k]
