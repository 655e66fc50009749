"""Preconditioned conjugate gradient for connected graph Laplacians."""

import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.sparse.linalg import spsolve_triangular

from .errors import DimensionMismatch, MaxItersExceeded, NotConnected
from .graph import connected_components

RHS_MODES = ("given", "random-projected", "from-random-x")


@dataclass
class SolveConfig:
    """PCG settings.

    Parameters
    ----------
    tol : float
        Target for ``||b - L x|| / ||b||``, checked on the recomputed
        residual.
    max_iters : int
        Iteration cap.
    rhs_mode : str
        How the CLI builds ``b``; one of ``given``, ``random-projected``,
        ``from-random-x``.
    strict : bool
        Raise :class:`MaxItersExceeded` instead of returning an unconverged
        report.
    """

    tol: float = 1e-6
    max_iters: int = 1000
    rhs_mode: str = "random-projected"
    strict: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rhs_mode not in RHS_MODES:
            raise ValueError(f"rhs_mode must be one of {RHS_MODES}")
        self.max_iters = int(self.max_iters)


@dataclass
class SolveReport:
    iterations: int
    relative_residual: float
    converged: bool
    recurred_residual: float = float("nan")
    factor_time: float = 0.0
    solve_time: float = 0.0
    history: list = field(default_factory=list, repr=False)

    def to_dict(self, history=False):
        d = asdict(self)
        if not history:
            d.pop("history")
        return d


class Preconditioner:
    """Callable ``r -> (G D G^T)^+ r`` with the triangular factors cached."""

    def __init__(self, factor):
        self.factor = factor
        self.n = factor.n
        g = factor.to_scipy(unit_diagonal=True)
        self._lower = g.tocsr()
        self._upper = g.T.tocsr()
        d = factor.D
        self._dinv = np.zeros(self.n)
        nz = d != 0
        self._dinv[nz] = 1.0 / d[nz]
        self._order = factor.ordering.order

    def __call__(self, r):
        r = np.asarray(r, dtype=np.float64)
        if r.shape != (self.n,):
            raise DimensionMismatch(
                f"vector has shape {r.shape}, factor is {self.n}x{self.n}")
        if self.n == 0:
            return r.copy()
        rp = r[self._order]
        y = spsolve_triangular(self._lower, rp, lower=True,
                               unit_diagonal=True)
        y *= self._dinv
        zp = spsolve_triangular(self._upper, y, lower=False,
                                unit_diagonal=True)
        z = np.empty(self.n)
        z[self._order] = zp
        return z


def apply_preconditioner(factor, r):
    """``z = G^{-T} D^+ G^{-1} r`` in vertex labels.

    Zero diagonal entries of ``D`` map to zero, so the result is a
    pseudo-inverse application for singular factors.
    """
    return Preconditioner(factor)(r)


def _project(v):
    return v - v.mean()


def make_rhs(graph, mode="random-projected", seed=0):
    """Random right-hand side in the range of ``L``.

    ``random-projected`` draws a standard normal vector and removes its mean;
    ``from-random-x`` returns ``L x`` for a standard normal ``x``.
    """
    rng = np.random.default_rng(seed)
    if mode == "random-projected":
        return _project(rng.standard_normal(graph.n))
    if mode == "from-random-x":
        return graph.to_scipy() @ rng.standard_normal(graph.n)
    raise ValueError(f"unknown rhs mode {mode!r}")


def pcg_solve(graph, factor, b, config=None, factor_time=0.0):
    """Solve ``L x = b`` by PCG with the factor as preconditioner.

    ``b`` is projected onto the mean-zero subspace, the start is ``x = 0``
    and the returned ``x`` is mean-zero. Convergence is declared only when
    the recomputed residual meets ``config.tol``.

    Returns
    -------
    x : ndarray
    report : SolveReport
    """
    config = config or SolveConfig()
    if factor.n != graph.n:
        raise DimensionMismatch(
            f"factor has n={factor.n}, graph has n={graph.n}")
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (graph.n,):
        raise DimensionMismatch(f"b has shape {b.shape}, n={graph.n}")
    ncomp, _ = connected_components(graph)
    if ncomp > 1:
        raise NotConnected(f"graph has {ncomp} connected components")

    t0 = time.perf_counter()
    A = graph.to_scipy().tocsr()
    M = Preconditioner(factor)
    b = _project(b)
    bnorm = np.linalg.norm(b)
    x = np.zeros(graph.n)
    if bnorm == 0:
        rep = SolveReport(0, 0.0, True, 0.0, factor_time,
                          time.perf_counter() - t0)
        return x, rep

    tol = config.tol
    r = b.copy()
    z = _project(M(r))
    p = z.copy()
    rz = r @ z
    history = [1.0]
    best_x, best_res = x.copy(), 1.0
    true_res = 1.0
    converged = False
    it = 0
    while it < config.max_iters:
        it += 1
        Ap = A @ p
        pAp = p @ Ap
        if pAp <= 0:
            break
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        rel = np.linalg.norm(r) / bnorm
        history.append(rel)
        if rel <= tol:
            true_r = b - A @ x
            true_res = np.linalg.norm(true_r) / bnorm
            if true_res <= tol:
                converged = True
                best_x, best_res = x.copy(), true_res
                break
            # the recurrence drifted; restart it from the true residual
            r = true_r
            rel = true_res
        if rel < best_res:
            best_x, best_res = x.copy(), rel
        z = _project(M(r))
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new

    recurred = history[-1]
    x = _project(best_x)
    true_res = np.linalg.norm(b - A @ x) / bnorm
    converged = converged or true_res <= tol
    rep = SolveReport(it, float(true_res), bool(converged), float(recurred),
                      factor_time, time.perf_counter() - t0, history)
    if not converged and config.strict:
        raise MaxItersExceeded(rep)
    return x, rep


__all__ = ["SolveConfig", "SolveReport", "Preconditioner",
           "apply_preconditioner", "make_rhs", "pcg_solve", "RHS_MODES"]
