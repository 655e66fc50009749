"""Structural analysis of orderings and factors.

Heights and path lengths count vertices, so a single vertex has height 1.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .factor import EliminationProblem, FactorTrace, schedule_depth


@dataclass
class EtreeReport:
    classical_height: int
    sampled_height: int
    critical_path: int
    fill_ratio: float
    schedule_depth: int

    def as_row(self):
        return asdict(self)


def _height(parent):
    n = len(parent)
    depth = np.ones(n, dtype=np.int64)
    # parents always sit at larger positions
    for v in range(n - 1, -1, -1):
        p = parent[v]
        if p >= 0:
            depth[v] = depth[p] + 1
    return int(depth.max()) if n else 0


def classical_etree(graph, ordering=None):
    """Elimination tree of the full (unsampled) Cholesky pattern.

    Uses Liu's ancestor path-compression algorithm on the lower pattern of
    the permuted Laplacian. Returns ``(parent, height)`` indexed by position,
    with ``-1`` marking roots.
    """
    problem = EliminationProblem(graph, ordering)
    n = problem.n
    lower = [[] for _ in range(n)]
    for a in range(n):
        for b, *_ in problem.upper[a]:
            lower[b].append(a)
    parent = _liu(n, lower)
    return parent, _height(parent)


def _liu(n, lower):
    """Liu's e-tree from ``lower[k]`` = columns ``i < k`` with a nonzero in
    row ``k``."""
    parent = np.full(n, -1, dtype=np.int64)
    ancestor = np.full(n, -1, dtype=np.int64)
    for k in range(n):
        for i in lower[k]:
            while i != -1 and i < k:
                nxt = ancestor[i]
                ancestor[i] = k
                if nxt == -1:
                    parent[i] = k
                i = nxt
    return parent


def symbolic_etree(graph, ordering=None):
    """Brute-force classical e-tree by explicit clique fill simulation."""
    problem = EliminationProblem(graph, ordering)
    n = problem.n
    adj = [set() for _ in range(n)]
    for a in range(n):
        for b, *_ in problem.upper[a]:
            adj[a].add(b)
            adj[b].add(a)
    parent = np.full(n, -1, dtype=np.int64)
    for k in range(n):
        nbrs = [v for v in adj[k] if v > k]
        if nbrs:
            parent[k] = min(nbrs)
        for v in nbrs:
            adj[v].discard(k)
            adj[v].update(u for u in nbrs if u != v)
    return parent, _height(parent)


def sampled_etree(factor):
    """E-tree of an actual factor: parent is the first subdiagonal row."""
    n = factor.n
    parent = np.full(n, -1, dtype=np.int64)
    counts = factor.column_counts
    nonempty = counts > 0
    parent[nonempty] = factor.indices[factor.indptr[:-1][nonempty]]
    return parent, _height(parent)


def closed_etree(factor):
    """E-tree of the symbolic closure of the factor's own pattern.

    Unlike :func:`sampled_etree`, every stored ``G(i, k)`` makes ``i`` an
    ancestor of ``k`` here, so its height bounds :func:`critical_path` from
    above; it never exceeds the classical height because the factor's
    pattern lies inside the classical filled pattern.
    """
    n = factor.n
    lower = [[] for _ in range(n)]
    for k in range(n):
        for i in factor.column(k)[0].tolist():
            lower[i].append(k)
    parent = _liu(n, lower)
    return parent, _height(parent)


def critical_path(factor):
    """Longest path, in vertices, of the DAG ``k -> i`` for stored G(i, k)."""
    n = factor.n
    if n == 0:
        return 0
    level = np.ones(n, dtype=np.int64)
    indptr, indices = factor.indptr, factor.indices
    for k in range(n):
        s, e = indptr[k], indptr[k + 1]
        if s < e:
            rows = indices[s:e]
            np.maximum.at(level, rows, level[k] + 1)
    return int(level.max())


def solve_levels(factor):
    """Level index (0-based) of each position in the triangular-solve DAG."""
    n = factor.n
    level = np.zeros(n, dtype=np.int64)
    indptr, indices = factor.indptr, factor.indices
    for k in range(n):
        s, e = indptr[k], indptr[k + 1]
        if s < e:
            np.maximum.at(level, indices[s:e], level[k] + 1)
    return level


def nnz_laplacian(graph):
    """All off-diagonal entries plus the diagonal."""
    return 2 * graph.n_edges + graph.n


def fill_ratio(graph, factor):
    """``2 nnz(G) / nnz(L)``, counting unit and true diagonals."""
    return 2.0 * factor.nnz / nnz_laplacian(graph)


def fill_ratio_bound(graph, merged_degree):
    """Upper bound on :func:`fill_ratio` from per-step neighbor counts.

    Each elimination adds at most ``max(|N_k| - 1, 0)`` edges to the
    working graph, so ``nnz(G)`` cannot exceed the input's strictly lower
    entries plus every sample plus the unit diagonal.
    """
    samples = int(np.maximum(np.asarray(merged_degree) - 1, 0).sum())
    return 2.0 * (graph.n_edges + samples + graph.n) / nnz_laplacian(graph)


def etree_report(graph, ordering, factor, trace=None):
    """Collect all structural metrics for one factorization."""
    _, classical = classical_etree(graph, ordering)
    _, sampled = sampled_etree(factor)
    cp = critical_path(factor)
    if trace is None:
        trace = trace_from_factor(factor)
    return EtreeReport(classical, sampled, cp, fill_ratio(graph, factor),
                       schedule_depth(trace))


def trace_from_factor(factor):
    """Dependency-only trace reconstructed from a factor's pattern."""
    tr = FactorTrace(factor.n)
    for k in range(factor.n):
        rows, _ = factor.column(k)
        tr.deps[k] = tuple(rows.tolist())
        tr.merged_degree[k] = len(rows)
    return tr
