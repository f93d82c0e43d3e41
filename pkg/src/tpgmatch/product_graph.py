"""Tensor product graph of two attributed graphs.

TPG node ``k = i1 * n2 + i2`` pairs node ``i1`` of the pattern with node
``i2`` of the target. An arc ``k -> l`` exists iff both projected arcs exist.
The transition matrix is stored as ``W[target, source]`` so that walks
compose as ``W @ W`` and every column holds the outgoing probabilities of
one TPG node.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .affinity import AffinityConfig, edge_affinity_pairs, node_affinity_matrix
from .errors import SizeCapError, TPGMatchError
from .sparse import SparseMatrix

DEFAULT_MAX_TPG_NODES = 2_000_000


def normalize_p(raw):
    """Scale to a probability vector; all-zero input becomes uniform."""
    raw = np.asarray(raw, dtype=float)
    if np.any(raw < 0):
        raise TPGMatchError("stopping weights must be non-negative")
    s = raw.sum()
    if s <= 0:
        return np.full(raw.shape, 1.0 / raw.size) if raw.size else raw.copy()
    return raw / s


def normalize_w(raw):
    """Divide each column of a non-negative matrix by its sum; zero columns stay zero."""
    if np.any(raw.data < 0):
        raise TPGMatchError("transition weights must be non-negative")
    sums = raw.col_sums()
    scale = np.divide(1.0, sums, out=np.zeros_like(sums), where=sums > 0)
    return SparseMatrix(raw.shape, raw.indptr.copy(), raw.indices.copy(),
                        raw.data * scale[raw.indices])


def compute_qx(W):
    """Diagonal of ``W @ W`` minus one, without forming the product."""
    if W.shape[0] != W.shape[1]:
        raise TPGMatchError("compute_qx needs a square matrix")
    return kernels.csr_square_diag(W.indptr, W.indices, W.data) - 1.0


def discount_factor(out_degree, in_degree):
    """Walk discount from the largest structural out/in degree of the TPG."""
    dmax_out = int(np.max(out_degree)) if len(out_degree) else 0
    dmax_in = int(np.max(in_degree)) if len(in_degree) else 0
    return 1.0 / max(1, min(dmax_out, dmax_in))


@dataclass(frozen=True, eq=False)
class ProductGraph:
    n1: int
    n2: int
    p: np.ndarray                 # stopping distribution over TPG nodes
    W: SparseMatrix               # W[target, source], column-stochastic
    lam: float
    q: np.ndarray                 # diag(W @ W) - 1
    out_degree: np.ndarray        # structural TPG degrees
    in_degree: np.ndarray
    edge_src: np.ndarray          # TPG arcs, sorted by (source, target)
    edge_dst: np.ndarray
    edge_weight: np.ndarray       # normalized weight of each arc
    edge_e1: np.ndarray = None    # pattern arc id of each TPG arc
    edge_e2: np.ndarray = None    # target arc id of each TPG arc
    operand_degrees: dict = field(default=None)

    @property
    def dim(self):
        return self.n1 * self.n2

    @property
    def edge_count(self):
        return len(self.edge_src)

    def pair_index(self, i1, i2):
        return i1 * self.n2 + i2

    def pair_of(self, k):
        return divmod(int(k), self.n2)

    @classmethod
    def from_transition(cls, W, p=None, lam=None, normalize=False):
        """Wrap a bare square transition matrix (``W[target, source]``).

        Used for worked examples and random-matrix tests. No operand graphs
        are attached, so the result cannot feed the LP builder.
        """
        if not isinstance(W, SparseMatrix):
            W = SparseMatrix.from_dense(W)
        n = W.shape[0]
        if W.shape != (n, n):
            raise TPGMatchError("transition matrix must be square")
        if normalize:
            W = normalize_w(W)
        p = normalize_p(np.ones(n) if p is None else p) if normalize else (
            np.full(n, 1.0 / n) if p is None else np.asarray(p, dtype=float))
        tgt = W.row_ids()
        src = W.indices.astype(np.int64)
        order = np.lexsort((tgt, src))
        outd = W.col_nnz()
        ind = W.row_nnz()
        if lam is None:
            lam = discount_factor(outd, ind)
        return cls(n, 1, p, W, float(lam), compute_qx(W), outd, ind,
                   src[order], tgt[order], W.data[order])


def build_product_graph(g1, g2, cfg=None, max_tpg_nodes=DEFAULT_MAX_TPG_NODES):
    cfg = cfg or AffinityConfig()
    n1, n2 = g1.node_count, g2.node_count
    dim = n1 * n2
    if dim < 1:
        raise TPGMatchError("both graphs need at least one node")
    if dim > max_tpg_nodes:
        raise SizeCapError(f"product graph would have {dim} nodes, cap is {max_tpg_nodes}")

    raw_p = node_affinity_matrix(cfg, g1, g2).ravel()
    if cfg.node_kernel == "dot_product" and raw_p.max() > 0:
        raw_p = raw_p / raw_p.max()
    p = normalize_p(raw_p)

    ptr1, dst1 = g1.out_csr()
    ptr2, dst2 = g2.out_csr()
    src, tgt, e1, e2 = kernels.product_arcs(n1, n2, ptr1, dst1, ptr2, dst2)
    raw_w = edge_affinity_pairs(cfg, g1, g2, e1, e2)
    if cfg.edge_kernel == "dot_product" and len(raw_w) and raw_w.max() > 0:
        raw_w = raw_w / raw_w.max()
    # arcs are distinct, so no duplicate (tgt, src) coordinates
    W = normalize_w(SparseMatrix.from_coo(tgt, src, raw_w, (dim, dim), drop_zeros=False))

    outd = np.bincount(src, minlength=dim)
    ind = np.bincount(tgt, minlength=dim)
    order = np.lexsort((W.row_ids(), W.indices))  # CSR entry -> canonical arc order
    weight = W.data[order]
    degrees = {"out1": g1.out_degrees(), "in1": g1.in_degrees(),
               "out2": g2.out_degrees(), "in2": g2.in_degrees(),
               "m1": g1.edge_count, "m2": g2.edge_count}
    return ProductGraph(n1, n2, p, W, discount_factor(outd, ind), compute_qx(W), outd, ind,
                        src, tgt, weight, e1, e2, degrees)
