"""Laplacian graphs, LDL^T factors and elimination orderings."""

import hashlib

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import (
    AsymmetricInput,
    NotAPermutation,
    PositiveOffDiagonal,
    RowSumViolation,
    TooLargeForDense,
    ValidationError,
)

DENSE_CAP = 2048
ROWSUM_RTOL = 1e-10
SYMMETRY_RTOL = 1e-12


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


class LaplacianGraph:
    """Weighted undirected multigraph view of a graph Laplacian.

    Adjacency is stored symmetrically in CSR form: for every vertex ``v`` the
    slice ``indptr[v]:indptr[v+1]`` of ``indices``/``weights``/``multiplicity``
    lists its neighbors in ascending order. The diagonal of the Laplacian is
    never stored; it is the row sum of ``weights``.
    """

    def __init__(self, n, indptr, indices, weights, multiplicity=None):
        self.n = int(n)
        self.indptr = _frozen(indptr, np.int64)
        self.indices = _frozen(indices, np.int64)
        self.weights = _frozen(weights, np.float64)
        if multiplicity is None:
            multiplicity = np.ones(len(self.indices), dtype=np.int64)
        self.multiplicity = _frozen(multiplicity, np.int64)
        if len(self.indptr) != self.n + 1:
            raise ValidationError("indptr must have length n + 1")
        if np.any(self.weights <= 0):
            raise ValidationError("edge weights must be strictly positive")

    @classmethod
    def from_edges(cls, n, rows, cols, weights):
        """Build a graph from an undirected edge list.

        Each edge may be given once in either orientation; repeated pairs are
        merged by summing their weights. Zero weights are dropped.
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        weights = np.asarray(weights, dtype=np.float64)
        if not (len(rows) == len(cols) == len(weights)):
            raise ValidationError("rows, cols and weights differ in length")
        if len(rows) and (rows.min() < 0 or cols.min() < 0
                          or max(rows.max(), cols.max()) >= n):
            raise ValidationError("vertex index out of range")
        if np.any(rows == cols):
            raise ValidationError("self-loops are not allowed",
                                  row=int(rows[rows == cols][0]))
        if np.any(weights < 0):
            bad = int(rows[weights < 0][0])
            raise ValidationError("edge weights must be nonnegative", row=bad)
        keep = weights > 0
        rows, cols, weights = rows[keep], cols[keep], weights[keep]
        lo = np.minimum(rows, cols)
        hi = np.maximum(rows, cols)
        upper = sp.coo_matrix((weights, (lo, hi)), shape=(n, n)).tocsr()
        upper.sum_duplicates()
        return cls._from_upper(n, upper)

    @classmethod
    def _from_upper(cls, n, upper):
        upper = upper.tocoo()
        r = np.concatenate([upper.row, upper.col])
        c = np.concatenate([upper.col, upper.row])
        w = np.concatenate([upper.data, upper.data])
        full = sp.csr_matrix((w, (r, c)), shape=(n, n))
        full.sort_indices()
        return cls(n, full.indptr, full.indices, full.data)

    # -- views ---------------------------------------------------------------
    @property
    def n_edges(self):
        return len(self.indices) // 2

    @property
    def degree(self):
        """Number of distinct neighbors per vertex."""
        return np.diff(self.indptr)

    @property
    def diagonal(self):
        out = np.zeros(self.n)
        rows = np.repeat(np.arange(self.n), self.degree)
        np.add.at(out, rows, self.weights)
        return out

    def neighbors(self, v):
        s = slice(self.indptr[v], self.indptr[v + 1])
        return self.indices[s], self.weights[s]

    def edges(self):
        """Return ``(i, j, w)`` arrays with ``i < j``, one entry per edge."""
        rows = np.repeat(np.arange(self.n), self.degree)
        mask = rows < self.indices
        return rows[mask], self.indices[mask], self.weights[mask]

    def to_scipy(self):
        """The Laplacian as a CSR matrix (diagonal included)."""
        adj = sp.csr_matrix((self.weights, self.indices, self.indptr),
                            shape=(self.n, self.n))
        return (sp.diags(self.diagonal) - adj).tocsr()

    def to_dense(self, cap=DENSE_CAP):
        if self.n > cap:
            raise TooLargeForDense(f"n={self.n} exceeds dense cap {cap}")
        return self.to_scipy().toarray()

    def permute(self, ordering):
        """Relabel vertices by elimination position."""
        perm = ordering.perm
        i, j, w = self.edges()
        return LaplacianGraph.from_edges(self.n, perm[i], perm[j], w)

    def __repr__(self):
        return f"LaplacianGraph(n={self.n}, edges={self.n_edges})"


def _as_triplets(triplets):
    if sp.issparse(triplets):
        coo = triplets.tocoo()
        return coo.row, coo.col, coo.data, coo.shape[0]
    if isinstance(triplets, tuple) and len(triplets) == 3:
        rows, cols, vals = (np.asarray(a) for a in triplets)
    else:
        arr = list(triplets)
        if not arr:
            return (np.zeros(0, np.int64), np.zeros(0, np.int64),
                    np.zeros(0), 0)
        rows, cols, vals = (np.asarray(a) for a in zip(*arr))
    n = int(max(rows.max(), cols.max())) + 1 if len(rows) else 0
    return rows, cols, vals, n


def validate_laplacian(triplets, n=None):
    """Check that a matrix given as triplets is a graph Laplacian.

    ``triplets`` may be an iterable of ``(i, j, value)``, a tuple of three
    arrays, or a scipy sparse matrix. Duplicate entries are summed and
    explicit zeros dropped. Diagonal entries are used only for the row-sum
    check; the returned graph recomputes them from the off-diagonals.
    """
    rows, cols, vals, n_found = _as_triplets(triplets)
    n = n_found if n is None else int(n)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    if len(rows) and (min(rows.min(), cols.min()) < 0
                      or max(rows.max(), cols.max()) >= n):
        raise ValidationError("index out of range")

    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    mat.sum_duplicates()
    mat.eliminate_zeros()

    off = mat - sp.diags(mat.diagonal())
    off.eliminate_zeros()
    offc = off.tocoo()
    pos = offc.data > 0
    if np.any(pos):
        row = int(offc.row[pos][0])
        raise PositiveOffDiagonal(
            f"positive off-diagonal entry in row {row}", row=row)

    offt = off.T.tocsr()
    excess = (abs(off - offt) - SYMMETRY_RTOL * (abs(off) + abs(offt))).tocoo()
    bad = excess.data > 0
    if np.any(bad):
        row = int(excess.row[bad].min())
        raise AsymmetricInput(f"matrix is not symmetric in row {row}", row=row)

    absrow = np.asarray(abs(mat).sum(axis=1)).ravel()
    rowsum = np.asarray(mat.sum(axis=1)).ravel()
    bad = np.flatnonzero(np.abs(rowsum) > ROWSUM_RTOL * absrow)
    if len(bad):
        row = int(bad[0])
        raise RowSumViolation(
            f"row {row} sums to {rowsum[row]:.3e}, not 0", row=row)

    upper = sp.triu(off, k=1).tocsr()
    lower_t = sp.tril(off, k=-1).T.tocsr()
    # (a_ij + a_ji)/2 is exact when the two agree bitwise
    avg = (-(upper + lower_t) * 0.5).tocsr()
    avg.eliminate_zeros()
    return LaplacianGraph._from_upper(n, avg)


def connected_components(graph):
    """Return ``(count, labels)`` for the connected components."""
    adj = sp.csr_matrix((graph.weights, graph.indices, graph.indptr),
                        shape=(graph.n, graph.n))
    count, labels = csgraph.connected_components(adj, directed=False)
    return int(count), labels


class Ordering:
    """Elimination order.

    ``order[k]`` is the vertex eliminated at position ``k``; ``perm`` is the
    inverse map from vertex label to elimination position.
    """

    def __init__(self, order):
        order = np.asarray(order, dtype=np.int64)
        n = len(order)
        if order.ndim != 1 or (n and (order.min() < 0 or order.max() >= n)):
            raise NotAPermutation("entries must lie in 0..n-1")
        perm = np.full(n, -1, dtype=np.int64)
        perm[order] = np.arange(n)
        if np.any(perm < 0):
            raise NotAPermutation("ordering repeats a vertex")
        self.order = _frozen(order, np.int64)
        self.perm = _frozen(perm, np.int64)

    @classmethod
    def natural(cls, n):
        return cls(np.arange(n))

    def __len__(self):
        return len(self.order)

    def __eq__(self, other):
        return isinstance(other, Ordering) and np.array_equal(
            self.order, other.order)

    def __repr__(self):
        head = ", ".join(map(str, self.order[:8]))
        return f"Ordering([{head}{', ...' if len(self) > 8 else ''}])"


class LdlFactor:
    """Randomized ``G D G^T`` factor in elimination-position space.

    ``G`` is unit lower triangular and stored column-compressed without its
    diagonal: column ``k`` holds rows ``indices[indptr[k]:indptr[k+1]]``
    (ascending, all ``> k``) with values ``data[...]``, all ``<= 0``.
    ``order`` records the ordering the factor was built under, so that
    callers can map between vertex labels and positions.
    """

    def __init__(self, n, indptr, indices, data, D, order=None):
        self.n = int(n)
        self.indptr = _frozen(indptr, np.int64)
        self.indices = _frozen(indices, np.int64)
        self.data = _frozen(data, np.float64)
        self.D = _frozen(D, np.float64)
        self.ordering = (Ordering.natural(self.n) if order is None
                         else order if isinstance(order, Ordering)
                         else Ordering(order))

    @property
    def nnz(self):
        """Stored off-diagonals plus the ``n`` implicit unit diagonals."""
        return len(self.indices) + self.n

    @property
    def column_counts(self):
        return np.diff(self.indptr)

    def column(self, k):
        s = slice(self.indptr[k], self.indptr[k + 1])
        return self.indices[s], self.data[s]

    def to_scipy(self, unit_diagonal=True):
        """``G`` as a CSC matrix, optionally with explicit unit diagonal."""
        g = sp.csc_matrix((self.data, self.indices, self.indptr),
                          shape=(self.n, self.n))
        if unit_diagonal:
            g = (g + sp.identity(self.n, format="csc")).tocsc()
            g.sort_indices()
        return g

    def checksum(self):
        h = hashlib.sha256()
        for a in (self.indptr, self.indices, self.data, self.D,
                  self.ordering.order):
            h.update(a.tobytes())
        return h.hexdigest()

    def identical(self, other):
        """Bitwise equality of structure, values and diagonal."""
        return (self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and self.data.tobytes() == other.data.tobytes()
                and self.D.tobytes() == other.D.tobytes())

    def __repr__(self):
        return f"LdlFactor(n={self.n}, nnz={self.nnz})"


def dense_reconstruct(factor, cap=DENSE_CAP, permuted=False):
    """Form ``G diag(D) G^T`` densely.

    By default the result is mapped back to the original vertex labels so it
    can be compared with the input Laplacian directly; ``permuted=True``
    returns it in elimination-position space.
    """
    if factor.n > cap:
        raise TooLargeForDense(f"n={factor.n} exceeds dense cap {cap}")
    g = factor.to_scipy().toarray()
    m = (g * factor.D) @ g.T
    if permuted:
        return m
    p = factor.ordering.perm
    return m[np.ix_(p, p)]
