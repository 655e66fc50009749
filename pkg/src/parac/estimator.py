"""scikit-learn style facade over factorization and PCG."""

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .api import BACKENDS, factorize
from .errors import DimensionMismatch
from .graph import LaplacianGraph, validate_laplacian
from .solver import Preconditioner, SolveConfig, pcg_solve


def check_laplacian(L):
    """Coerce ``L`` to a validated :class:`LaplacianGraph`.

    Accepts a graph (returned unchanged), a scipy sparse matrix, a dense
    array, or a ``(rows, cols, vals)`` triplet tuple.
    """
    if isinstance(L, LaplacianGraph):
        return L
    if not sp.issparse(L) and not isinstance(L, tuple):
        arr = np.asarray(L, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got {arr.shape}")
        L = sp.coo_matrix(arr)
    if sp.issparse(L) and L.shape[0] != L.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {L.shape}")
    n = L.shape[0] if sp.issparse(L) else None
    return validate_laplacian(L, n=n)


def check_block(R, n):
    """Return ``R`` as a float ``(n, k)`` array and whether it was 1-D."""
    R = np.asarray(R, dtype=np.float64)
    vector = R.ndim == 1
    if vector:
        R = R[:, None]
    if R.ndim != 2 or R.shape[0] != n:
        raise DimensionMismatch(f"expected {n} rows, got shape {R.shape}")
    return R, vector


class ApproximateCholesky(BaseEstimator, TransformerMixin):
    """Randomized ``G D G^T`` preconditioner as a transformer.

    ``fit`` factors a Laplacian; ``transform`` applies the pseudo-inverse of
    the factorization to each column of its input.

    Parameters
    ----------
    ordering : str
        Elimination ordering name (``nnz-sort``, ``random``, ``natural`` or
        ``file:<path>``).
    backend : str
        ``seq``, ``par-left``, ``par-right`` or ``exact``.
    workers : int
        Threads for the parallel backends.
    seed : int
        Seed for the ordering and the sampler.
    """

    def __init__(self, ordering="nnz-sort", backend="seq", workers=1, seed=0):
        self.ordering = ordering
        self.backend = backend
        self.workers = workers
        self.seed = seed

    def fit(self, X, y=None):
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")
        self.graph_ = check_laplacian(X)
        self.factor_ = factorize(self.graph_, self.ordering, self.backend,
                                 self.seed, self.workers)
        self.n_features_in_ = self.graph_.n
        self._apply = Preconditioner(self.factor_)
        return self

    def transform(self, X):
        check_is_fitted(self, "factor_")
        R, vector = check_block(X, self.n_features_in_)
        Z = np.column_stack([self._apply(R[:, j]) for j in range(R.shape[1])])
        return Z[:, 0] if vector else Z


class LaplacianPCG(BaseEstimator):
    """Solve ``L x = b`` by PCG, preconditioned with a randomized factor.

    ``fit`` takes the Laplacian; ``predict`` takes one right-hand side or a
    column block of them and returns mean-zero solutions. The report of the
    last solve is kept in ``report_`` (and all of them in ``reports_``).
    """

    def __init__(self, tol=1e-6, max_iters=1000, ordering="nnz-sort",
                 backend="seq", workers=1, seed=0):
        self.tol = tol
        self.max_iters = max_iters
        self.ordering = ordering
        self.backend = backend
        self.workers = workers
        self.seed = seed

    def fit(self, X, y=None):
        self.preconditioner_ = ApproximateCholesky(
            self.ordering, self.backend, self.workers, self.seed).fit(X)
        self.graph_ = self.preconditioner_.graph_
        self.factor_ = self.preconditioner_.factor_
        self.n_features_in_ = self.graph_.n
        return self

    def predict(self, B):
        check_is_fitted(self, "factor_")
        B, vector = check_block(B, self.n_features_in_)
        config = SolveConfig(tol=self.tol, max_iters=self.max_iters)
        cols, self.reports_ = [], []
        for j in range(B.shape[1]):
            x, rep = pcg_solve(self.graph_, self.factor_, B[:, j], config)
            cols.append(x)
            self.reports_.append(rep)
        self.report_ = self.reports_[-1]
        X = np.column_stack(cols)
        return X[:, 0] if vector else X

    solve = predict

    def score(self, B, y=None):
        """Negative mean relative residual over the columns of ``B``."""
        self.predict(B)
        return -float(np.mean([r.relative_residual for r in self.reports_]))
