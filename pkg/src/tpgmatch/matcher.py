"""Subgraph matching as node/edge selection on the product graph.

Pipeline: product graph -> contextual similarities -> node/edge scores ->
LP relaxation -> Hungarian rounding of the node variables.
"""
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .affinity import AffinityConfig, assignment_matrix, build_affinity_matrix, qap_objective
from .context import MODELS, contextual_similarity
from .errors import ConfigError, SolverError, TPGMatchError
from .optim import LinearProgram, hungarian_max, lp_solve
from .product_graph import DEFAULT_MAX_TPG_NODES, build_product_graph
from .sparse import SparseMatrix

MODEL_ALIASES = {"PG-N": "pairwise", "PG-R": "random_walk", "PG-B": "backtrackless"}
METHOD_LABELS = {v: k for k, v in MODEL_ALIASES.items()}

# row families of the matching LP, in emission order
FAMILIES = ("pattern_node", "pattern_edge", "target_node", "target_edge", "out_degree", "in_degree")


def canonical_model(name):
    name = MODEL_ALIASES.get(name, name)
    if name not in MODELS:
        raise ConfigError(f"unknown model {name!r}; expected one of {MODELS} or {tuple(MODEL_ALIASES)}")
    return name


@dataclass(frozen=True)
class MatchConfig:
    model: str = "backtrackless"
    discretize: bool = True
    affinity: AffinityConfig = field(default_factory=AffinityConfig)
    solver_rtol: float = 1e-9
    solver_max_iter_factor: int = 10
    lp_max_pivots: int = None          # None: 50 * (nvars + nrows)
    max_tpg_nodes: int = DEFAULT_MAX_TPG_NODES
    prune_eps: float = 0.0
    lp_method: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "model", canonical_model(self.model))
        if self.solver_rtol <= 0 or self.solver_max_iter_factor < 1:
            raise ConfigError("solver_rtol must be > 0 and solver_max_iter_factor >= 1")
        if self.max_tpg_nodes < 1 or self.prune_eps < 0:
            raise ConfigError("max_tpg_nodes must be >= 1 and prune_eps >= 0")
        if self.lp_method not in ("auto", "simplex", "highs"):
            raise ConfigError(f"unknown lp_method {self.lp_method!r}")


@dataclass
class MatchResult:
    x: np.ndarray                 # node-pair selection, indexed i1 * n2 + i2
    y: np.ndarray                 # TPG arc selection, canonical arc order
    assignment: list              # [(i1, i2), ...] or None
    objective_lp: float
    objective_qap: float
    timings: dict
    n1: int = 0
    n2: int = 0
    lp_status: str = "optimal"

    def x_matrix(self):
        return self.x.reshape(self.n1, self.n2)

    def to_dict(self, timings=True):
        return {
            "assignment": None if self.assignment is None else [list(p) for p in self.assignment],
            "x": self.x.tolist(),
            "y": self.y.tolist(),
            "objective_lp": self.objective_lp,
            "objective_qap": self.objective_qap,
            "timings": dict(self.timings) if timings else {},
        }


def build_sv(cs):
    return np.array(cs.values, dtype=float)


def build_se(cs, pg):
    """Arc scores: endpoint similarities shared out over TPG out-degrees."""
    v = np.asarray(cs.values, dtype=float)
    share = v / np.maximum(pg.out_degree, 1)
    return share[pg.edge_src] + share[pg.edge_dst]


@dataclass(frozen=True, eq=False)
class MatchingLP:
    """LP plus the bookkeeping needed to map its variables back."""

    lp: LinearProgram
    x_nodes: np.ndarray        # TPG node of each x variable
    y_arcs: np.ndarray         # TPG arc of each y variable
    row_family: np.ndarray     # index into FAMILIES for every emitted row
    row_key: np.ndarray        # node/arc id the row constrains

    @property
    def nx(self):
        return len(self.x_nodes)


def build_matching_lp(pg, S_V, S_E, prune_eps=0.0):
    if pg.operand_degrees is None:
        raise TPGMatchError("product graph has no operand graphs attached")
    S_V = np.asarray(S_V, dtype=float)
    S_E = np.asarray(S_E, dtype=float)
    if S_V.shape != (pg.dim,) or S_E.shape != (pg.edge_count,):
        raise TPGMatchError("score vectors do not match the product graph")
    n1, n2 = pg.n1, pg.n2
    deg = pg.operand_degrees
    m1, m2 = deg["m1"], deg["m2"]

    keep_x = S_V >= prune_eps if prune_eps > 0 else np.ones(pg.dim, bool)
    keep_y = keep_x[pg.edge_src] & keep_x[pg.edge_dst]
    x_nodes = np.flatnonzero(keep_x)
    y_arcs = np.flatnonzero(keep_y)
    nx, ny = len(x_nodes), len(y_arcs)
    xi = np.arange(nx)
    yi = nx + np.arange(ny)
    i1, i2 = np.divmod(x_nodes, n2)
    src, dst = pg.edge_src[y_arcs], pg.edge_dst[y_arcs]

    base = np.cumsum([0, n1, m1, n2, m2, pg.dim, pg.dim])
    min_out = np.minimum(deg["out1"][i1], deg["out2"][i2]).astype(float)
    min_in = np.minimum(deg["in1"][i1], deg["in2"][i2]).astype(float)
    rows = np.concatenate([
        base[0] + i1,
        base[1] + pg.edge_e1[y_arcs],
        base[2] + i2,
        base[3] + pg.edge_e2[y_arcs],
        base[4] + src, base[4] + x_nodes,
        base[5] + dst, base[5] + x_nodes,
    ])
    cols = np.concatenate([xi, yi, xi, yi, yi, xi, yi, xi])
    vals = np.concatenate([np.ones(nx), np.ones(ny), np.ones(nx), np.ones(ny),
                           np.ones(ny), -min_out, np.ones(ny), -min_in])
    nrows_full = int(base[-1])
    full = SparseMatrix.from_coo(rows, cols, vals, (nrows_full, nx + ny))
    used = np.flatnonzero(full.row_nnz() > 0)
    remap = np.full(nrows_full, -1, np.int64)
    remap[used] = np.arange(len(used))
    r = full.row_ids()
    A = SparseMatrix((len(used), nx + ny), *_compress(remap[r], full.indices, full.data, len(used)))
    family = np.searchsorted(base, used, side="right") - 1
    key = used - base[family]
    b = np.where(family < 4, 1.0, 0.0)
    c = np.concatenate([S_V[x_nodes], S_E[y_arcs]])
    return MatchingLP(LinearProgram(c, A, b), x_nodes, y_arcs, family, key)


def _compress(rows, cols, vals, nrows):
    indptr = np.zeros(nrows + 1, np.int64)
    np.cumsum(np.bincount(rows, minlength=nrows), out=indptr[1:])
    return indptr, cols, vals


@contextmanager
def _stage(name, timings):
    t0 = time.perf_counter()
    try:
        yield
    except TPGMatchError as exc:
        if exc.stage is None:
            exc.stage = name
        raise
    finally:
        timings[name] = (time.perf_counter() - t0) * 1e3


def match(g1, g2, cfg=None):
    """Match pattern ``g1`` into target ``g2``."""
    cfg = cfg or MatchConfig()
    timings = {}
    with _stage("product_graph", timings):
        pg = build_product_graph(g1, g2, cfg.affinity, max_tpg_nodes=cfg.max_tpg_nodes)
    with _stage("context", timings):
        cs = contextual_similarity(pg, cfg.model, **({} if cfg.model == "pairwise" else {
            "rtol": cfg.solver_rtol, "max_iter_factor": cfg.solver_max_iter_factor}))
    with _stage("lp_build", timings):
        mlp = build_matching_lp(pg, build_sv(cs), build_se(cs, pg), prune_eps=cfg.prune_eps)
    with _stage("lp_solve", timings):
        sol = lp_solve(mlp.lp, method=cfg.lp_method, max_pivots=cfg.lp_max_pivots)
        if sol.status != "optimal":
            raise SolverError(f"LP stopped with status {sol.status} after {sol.iterations} pivots")
    x = np.zeros(pg.dim)
    x[mlp.x_nodes] = sol.z[:mlp.nx]
    y = np.zeros(pg.edge_count)
    y[mlp.y_arcs] = sol.z[mlp.nx:]

    assignment = None
    objective_qap = None
    if cfg.discretize:
        with _stage("discretize", timings):
            assignment = hungarian_max(x.reshape(pg.n1, pg.n2))
        with _stage("objective", timings):
            K = build_affinity_matrix(g1, g2, cfg.affinity)
            objective_qap = qap_objective(K, assignment_matrix(assignment, pg.n1, pg.n2))
    return MatchResult(x, y, assignment, sol.objective, objective_qap, timings,
                       pg.n1, pg.n2, sol.status)
