"""Minimal immutable CSR matrix.

Only what the matcher needs: canonical construction from triplets, matvec,
transpose, column sums and a conversion to :mod:`scipy.sparse` for the
iterative solvers.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import TPGMatchError


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Compressed-row matrix with sorted, duplicate-free column indices."""

    shape: tuple
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        for a in (self.indptr, self.indices, self.data):
            a.setflags(write=False)

    @classmethod
    def from_coo(cls, rows, cols, vals, shape, drop_zeros=True):
        """Build from triplets. Duplicates are summed."""
        nr, nc = int(shape[0]), int(shape[1])
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.asarray(vals, dtype=float).ravel()
        if not (len(rows) == len(cols) == len(vals)):
            raise TPGMatchError("rows, cols and vals must have equal length")
        if len(rows) and (rows.min() < 0 or rows.max() >= nr or cols.min() < 0 or cols.max() >= nc):
            raise TPGMatchError("triplet index out of range")
        if not np.all(np.isfinite(vals)):
            raise TPGMatchError("sparse values must be finite")
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if len(rows):
            first = np.ones(len(rows), bool)
            first[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
            starts = np.flatnonzero(first)
            vals = np.add.reduceat(vals, starts)
            rows, cols = rows[starts], cols[starts]
        if drop_zeros:
            keep = vals != 0.0
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
        indptr = np.zeros(nr + 1, np.int64)
        np.cumsum(np.bincount(rows, minlength=nr), out=indptr[1:])
        return cls((nr, nc), indptr, cols, vals)

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=float)
        r, c = np.nonzero(a)
        return cls.from_coo(r, c, a[r, c], a.shape)

    @classmethod
    def zeros(cls, shape):
        return cls.from_coo([], [], [], shape)

    @classmethod
    def identity(cls, n):
        idx = np.arange(n)
        return cls.from_coo(idx, idx, np.ones(n), (n, n))

    @property
    def nnz(self):
        return len(self.data)

    def row_ids(self):
        return np.repeat(np.arange(self.shape[0], dtype=np.int64), np.diff(self.indptr))

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.shape[1],):
            raise TPGMatchError(f"matvec: vector of length {x.shape} vs {self.shape[1]} columns")
        return kernels.csr_matvec(self.indptr, self.indices, self.data, x)

    __matmul__ = matvec

    def col_sums(self):
        return np.bincount(self.indices, weights=self.data, minlength=self.shape[1]).astype(float)

    def row_nnz(self):
        return np.diff(self.indptr)

    def col_nnz(self):
        return np.bincount(self.indices, minlength=self.shape[1])

    def transpose(self):
        return SparseMatrix.from_coo(self.indices, self.row_ids(), self.data,
                                     (self.shape[1], self.shape[0]), drop_zeros=False)

    @property
    def T(self):
        return self.transpose()

    def canonical(self):
        """Copy without explicit zeros."""
        return SparseMatrix.from_coo(self.row_ids(), self.indices, self.data, self.shape)

    def toarray(self):
        out = np.zeros(self.shape)
        out[self.row_ids(), self.indices] = self.data
        return out

    def to_scipy(self):
        return sp.csr_matrix((self.data, self.indices, self.indptr), shape=self.shape)

    def __repr__(self):
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz})"


def spmv(m, x):
    """``y = m @ x`` for a :class:`SparseMatrix`."""
    return m.matvec(x)
