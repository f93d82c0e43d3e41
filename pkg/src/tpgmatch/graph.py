"""Attributed directed graphs and degree queries."""
import numpy as np

from .errors import GraphError


class AttributedGraph:
    """Directed graph with vector- or set-valued node attributes.

    Parameters
    ----------
    node_attrs : array_like or sequence of array_like
        Either an ``(n, d)`` array (one vector per node) or a sequence of
        ``(m_i, d)`` arrays when every node carries a *set* of vectors.
    edges : array_like of shape (m, 2)
        Arcs ``(source, target)``. With ``directed=False`` each pair is an
        undirected edge and is stored as two arcs sharing one attribute.
    edge_attrs : array_like of shape (m, e), optional
        Defaults to zero-length attributes.
    directed : bool

    Arcs are stored sorted by ``(source, target)``; ``edges[k]`` and
    ``edge_attrs[k]`` always refer to the same arc.
    """

    def __init__(self, node_attrs, edges=(), edge_attrs=None, directed=True):
        self.directed = bool(directed)
        self.node_kind, self.node_attrs = _check_nodes(node_attrs)
        n = self.node_count

        e = np.asarray(edges, dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise GraphError("edges must be an (m, 2) array of node indices")
        m = len(e)
        if edge_attrs is None:
            ea = np.zeros((m, 0))
        else:
            ea = np.asarray(edge_attrs, dtype=float)
            if ea.ndim == 1:
                ea = ea.reshape(m, -1) if m else ea.reshape(0, 0)
        if ea.ndim != 2 or len(ea) != m:
            raise GraphError("edge_attrs must have one row per edge")
        if not np.all(np.isfinite(ea)):
            raise GraphError("edge attributes must be finite")
        if m and (e.min() < 0 or e.max() >= n):
            raise GraphError("edge endpoint is not a valid node index")
        if np.any(e[:, 0] == e[:, 1]):
            raise GraphError("self-loops are not supported")

        if not self.directed:
            e, ea = _symmetrise(e, ea)
        order = np.lexsort((e[:, 1], e[:, 0]))
        e, ea = e[order], ea[order]
        if len(e) > 1 and np.any(np.all(e[1:] == e[:-1], axis=1)):
            raise GraphError("duplicate arcs (multigraphs are not supported)")
        self.edges = e
        self.edge_attrs = ea
        self.edges.setflags(write=False)
        self.edge_attrs.setflags(write=False)

    @property
    def node_count(self):
        return len(self.node_attrs)

    @property
    def edge_count(self):
        return len(self.edges)

    @property
    def node_dim(self):
        if self.node_kind == "vector":
            return self.node_attrs.shape[1]
        return self.node_attrs[0].shape[1] if self.node_attrs else 0

    @property
    def edge_dim(self):
        return self.edge_attrs.shape[1]

    def out_degrees(self):
        return np.bincount(self.edges[:, 0], minlength=self.node_count)

    def in_degrees(self):
        return np.bincount(self.edges[:, 1], minlength=self.node_count)

    def out_csr(self):
        """``(indptr, targets)`` of the out-adjacency; arc ids are positions."""
        ptr = np.zeros(self.node_count + 1, np.int64)
        np.cumsum(self.out_degrees(), out=ptr[1:])
        return ptr, np.ascontiguousarray(self.edges[:, 1])

    def adjacency(self):
        a = np.zeros((self.node_count, self.node_count))
        a[self.edges[:, 0], self.edges[:, 1]] = 1.0
        return a

    def undirected_edges(self):
        """Each undirected edge once as ``(i, j)`` with ``i < j`` plus attrs."""
        keep = self.edges[:, 0] < self.edges[:, 1]
        return self.edges[keep], self.edge_attrs[keep]

    def permuted(self, perm):
        """Relabel node ``i`` as ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.node_count)):
            raise GraphError("perm must be a permutation of the node indices")
        inv = np.argsort(perm)
        if self.node_kind == "vector":
            nodes = self.node_attrs[inv]
        else:
            nodes = [self.node_attrs[k] for k in inv]
        # undirected import collapses the stored arc pairs back into edges
        return AttributedGraph(nodes, perm[self.edges], self.edge_attrs, directed=self.directed)

    def same_structure(self, other):
        if (self.directed != other.directed or self.node_kind != other.node_kind
                or self.node_count != other.node_count):
            return False
        if not (np.array_equal(self.edges, other.edges)
                and np.array_equal(self.edge_attrs, other.edge_attrs)):
            return False
        if self.node_kind == "vector":
            return np.array_equal(self.node_attrs, other.node_attrs)
        return all(np.array_equal(a, b) for a, b in zip(self.node_attrs, other.node_attrs))

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return (f"AttributedGraph({self.node_count} nodes, {self.edge_count} arcs, {kind}, "
                f"{self.node_kind} node attrs)")


def _check_nodes(node_attrs):
    if isinstance(node_attrs, np.ndarray) and node_attrs.dtype != object:
        arr = node_attrs.astype(float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise GraphError("vector node attributes must form an (n, d) array")
        if not np.all(np.isfinite(arr)):
            raise GraphError("node attributes must be finite")
        arr.setflags(write=False)
        return "vector", arr
    items = list(node_attrs)
    if not items:
        return "vector", np.zeros((0, 0))
    arrs = [np.asarray(a, dtype=float) for a in items]
    ndims = {a.ndim for a in arrs}
    if ndims == {0} or ndims == {1}:
        return _check_nodes(np.array([np.atleast_1d(a) for a in arrs]) if ndims == {1}
                            else np.array(arrs).reshape(-1, 1))
    if ndims != {2}:
        raise GraphError("cannot mix vector and set-valued node attributes")
    dims = {a.shape[1] for a in arrs}
    if len(dims) != 1:
        raise GraphError("set-valued node attributes must share one vector dimension")
    for a in arrs:
        if len(a) == 0:
            raise GraphError("set-valued node attribute must be non-empty")
        if not np.all(np.isfinite(a)):
            raise GraphError("node attributes must be finite")
        a.setflags(write=False)
    return "set", tuple(arrs)


def _symmetrise(e, ea):
    pairs = {}
    for k, (i, j) in enumerate(e.tolist()):
        key = (min(i, j), max(i, j))
        if key in pairs:
            if not np.array_equal(ea[pairs[key]], ea[k]):
                raise GraphError(f"undirected edge {key} listed twice with different attributes")
            continue
        pairs[key] = k
    keys = list(pairs)
    idx = [pairs[k] for k in keys]
    fwd = np.array(keys, dtype=np.int64).reshape(-1, 2)
    both = np.concatenate([fwd, fwd[:, ::-1]])
    return both, np.concatenate([ea[idx], ea[idx]])


def _check_node(g, v):
    if not 0 <= v < g.node_count:
        raise GraphError(f"node index {v} out of range for {g.node_count} nodes")


def out_degree(g, v):
    """Number of arcs leaving ``v``."""
    _check_node(g, v)
    return int(np.count_nonzero(g.edges[:, 0] == v))


def in_degree(g, v):
    """Number of arcs entering ``v``."""
    _check_node(g, v)
    return int(np.count_nonzero(g.edges[:, 1] == v))
