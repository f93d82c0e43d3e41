"""Node/edge affinity kernels, the QAP affinity matrix K and its objective."""
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from . import kernels
from .errors import AffinityError
from .sparse import SparseMatrix

KERNELS = ("gaussian", "dot_product", "exp_neg_distance", "exp_neg_hausdorff")


@dataclass(frozen=True)
class AffinityConfig:
    node_kernel: str = "gaussian"
    edge_kernel: str = "gaussian"
    bandwidth: float = 0.15

    def __post_init__(self):
        for k in (self.node_kernel, self.edge_kernel):
            if k not in KERNELS:
                raise AffinityError(f"unknown kernel {k!r}; expected one of {KERNELS}")
        if self.edge_kernel == "exp_neg_hausdorff":
            raise AffinityError("exp_neg_hausdorff needs set-valued attributes; edges carry vectors")
        if not (self.bandwidth > 0 and np.isfinite(self.bandwidth)):
            raise AffinityError("bandwidth must be a positive finite number")

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - {"node_kernel", "edge_kernel", "bandwidth"}
        if unknown:
            raise AffinityError(f"unknown affinity keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self):
        return {"node_kernel": self.node_kernel, "edge_kernel": self.edge_kernel,
                "bandwidth": self.bandwidth}


def modified_hausdorff(A, B):
    """Sum of nearest-neighbour Euclidean distances taken in both directions."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.size == 0 or B.size == 0 or len(A) == 0 or len(B) == 0:
        raise AffinityError("modified_hausdorff needs non-empty sets")
    if A.shape[1] != B.shape[1]:
        raise AffinityError(f"set dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    d = cdist(A, B)
    return float(d.min(axis=1).sum() + d.min(axis=0).sum())


def _vector_kernel(kernel, bandwidth, a1, a2):
    a1 = np.atleast_1d(np.asarray(a1, dtype=float))
    a2 = np.atleast_1d(np.asarray(a2, dtype=float))
    if a1.ndim != 1 or a2.ndim != 1:
        raise AffinityError(f"{kernel} kernel expects vector attributes")
    if a1.shape != a2.shape:
        raise AffinityError(f"attribute dimension mismatch: {a1.shape[0]} vs {a2.shape[0]}")
    if kernel == "gaussian":
        diff = a1 - a2
        return float(np.exp(-np.dot(diff, diff) / bandwidth))
    if kernel == "exp_neg_distance":
        return float(np.exp(-np.linalg.norm(a1 - a2)))
    if kernel == "dot_product":
        return max(0.0, float(np.dot(a1, a2)))
    raise AffinityError(f"{kernel} kernel expects set-valued attributes")


def node_affinity(cfg, a1, a2):
    if cfg.node_kernel == "exp_neg_hausdorff":
        return float(np.exp(-modified_hausdorff(a1, a2)))
    return _vector_kernel(cfg.node_kernel, cfg.bandwidth, a1, a2)


def edge_affinity(cfg, b1, b2):
    return _vector_kernel(cfg.edge_kernel, cfg.bandwidth, b1, b2)


def _check_kinds(cfg, g1, g2):
    want = "set" if cfg.node_kernel == "exp_neg_hausdorff" else "vector"
    for g in (g1, g2):
        if g.node_count and g.node_kind != want:
            raise AffinityError(f"{cfg.node_kernel} kernel needs {want}-valued node attributes")
    if g1.node_count and g2.node_count and g1.node_dim != g2.node_dim:
        raise AffinityError(f"node attribute dimension mismatch: {g1.node_dim} vs {g2.node_dim}")
    if g1.edge_count and g2.edge_count and g1.edge_dim != g2.edge_dim:
        raise AffinityError(f"edge attribute dimension mismatch: {g1.edge_dim} vs {g2.edge_dim}")


def node_affinity_matrix(cfg, g1, g2):
    """Raw ``(n1, n2)`` node affinities."""
    _check_kinds(cfg, g1, g2)
    k = cfg.node_kernel
    if k == "exp_neg_hausdorff":
        out = np.empty((g1.node_count, g2.node_count))
        for i, A in enumerate(g1.node_attrs):
            for j, B in enumerate(g2.node_attrs):
                out[i, j] = np.exp(-modified_hausdorff(A, B))
        return out
    a, b = g1.node_attrs, g2.node_attrs
    if k == "dot_product":
        return np.maximum(a @ b.T, 0.0)
    sq = cdist(a, b, "sqeuclidean") if a.shape[1] else np.zeros((len(a), len(b)))
    if k == "gaussian":
        return np.exp(-sq / cfg.bandwidth)
    return np.exp(-np.sqrt(sq))


def edge_affinity_pairs(cfg, g1, g2, e1, e2):
    """Raw affinities between arcs ``g1.edges[e1[t]]`` and ``g2.edges[e2[t]]``."""
    _check_kinds(cfg, g1, g2)
    a, b = g1.edge_attrs, g2.edge_attrs
    e1 = np.asarray(e1, dtype=np.int64)
    e2 = np.asarray(e2, dtype=np.int64)
    k = cfg.edge_kernel
    if k == "dot_product":
        return np.maximum(np.einsum("ij,ij->i", a[e1], b[e2]), 0.0)
    if a.shape[1] == 0:
        sq = np.zeros(len(e1))
    else:
        sq = kernels.paired_sqdist(np.ascontiguousarray(a), np.ascontiguousarray(b), e1, e2)
    if k == "gaussian":
        return np.exp(-sq / cfg.bandwidth)
    return np.exp(-np.sqrt(sq))


def build_affinity_matrix(g1, g2, cfg):
    """QAP affinity matrix ``K`` over pair indices ``i1 * n2 + i2``.

    Diagonal entries hold node affinities; entry ``(i1i2, j1j2)`` holds the
    edge affinity of arcs ``i1 -> j1`` and ``i2 -> j2`` when both exist.
    """
    n1, n2 = g1.node_count, g2.node_count
    nv = node_affinity_matrix(cfg, g1, g2).ravel()
    m1, m2 = g1.edge_count, g2.edge_count
    e1 = np.repeat(np.arange(m1), m2)
    e2 = np.tile(np.arange(m2), m1)
    ev = edge_affinity_pairs(cfg, g1, g2, e1, e2)
    rows = g1.edges[e1, 0] * n2 + g2.edges[e2, 0]
    cols = g1.edges[e1, 1] * n2 + g2.edges[e2, 1]
    diag = np.arange(n1 * n2)
    return SparseMatrix.from_coo(np.concatenate([diag, rows]), np.concatenate([diag, cols]),
                                 np.concatenate([nv, ev]), (n1 * n2, n1 * n2), drop_zeros=False)


def assignment_matrix(pairs, n1, n2):
    """0/1 matrix from ``[(i, j), ...]`` pairs."""
    X = np.zeros((n1, n2))
    for i, j in pairs:
        X[i, j] = 1.0
    return X


def qap_objective(K, X):
    """``vec(X)' K vec(X)`` with row-major ``vec``."""
    X = np.asarray(X, dtype=float)
    x = X.ravel()
    if x.shape[0] != K.shape[0] or K.shape[0] != K.shape[1]:
        raise AffinityError(f"assignment of size {X.shape} does not fit K of shape {K.shape}")
    return float(x @ K.matvec(x))
