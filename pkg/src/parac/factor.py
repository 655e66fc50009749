"""Sequential randomized and exact LDL^T elimination.

All backends, including the parallel ones, funnel every vertex through
:func:`eliminate`. The working graph keeps each edge at its endpoint with the
smaller elimination position, so a vertex's neighbor set at elimination time
is its initial upper adjacency plus the fill entries parked on it.

Entries are tuples ``(row, source, seq, weight, multiplicity)``. ``source``
is ``-1`` for input edges and otherwise the position of the vertex whose
elimination produced the entry, ``seq`` its sample index there. Sorting on
``(row, source, seq)`` gives a canonical merge order that does not depend on
the order in which entries arrived.
"""

import json
import time

import numpy as np

from .errors import DenseBlowup
from .graph import LdlFactor, Ordering
from .sampling import clique_edges, sample_tree, suffix_sums

INITIAL = -1
DROP_BELOW = 1e-300
EXACT_EDGE_CAP = 10**7


class EliminationProblem:
    """A graph relabelled into elimination positions.

    ``upper[k]`` lists the entry tuples of input edges ``(k, j)`` with
    ``j > k``; ``dp[k]`` counts input edges to earlier positions.
    """

    def __init__(self, graph, ordering=None):
        n = graph.n
        ordering = Ordering.natural(n) if ordering is None else ordering
        if len(ordering) != n:
            from .errors import DimensionMismatch
            raise DimensionMismatch(
                f"ordering has {len(ordering)} entries, graph has {n}")
        self.n = n
        self.ordering = ordering
        i, j, w = graph.edges()
        perm = ordering.perm
        pi, pj = perm[i], perm[j]
        lo = np.minimum(pi, pj)
        hi = np.maximum(pi, pj)
        key = np.lexsort((hi, lo))
        lo, hi, w = lo[key], hi[key], w[key]
        self.n_edges = len(lo)

        upper = [[] for _ in range(n)]
        for a, b, wt in zip(lo.tolist(), hi.tolist(), w.tolist()):
            upper[a].append((b, INITIAL, 0, wt, 1))
        self.upper = upper
        self.dp = np.bincount(hi, minlength=n).astype(np.int64)

    def initial_entries(self, k):
        return list(self.upper[k])


def eliminate(k, entries, seed, exact=False):
    """Eliminate position ``k`` given all entries parked on it.

    Returns ``(rows, values, d, samples, decrements)``: the factor column
    (rows ascending, values ``-w/l_kk``), the diagonal ``d = l_kk``, the new
    edges as ``(a, b, weight, seq)`` with ``a < b``, and the
    ``(row, multiplicity)`` pairs whose dependency counters drop.
    """
    entries.sort(key=_entry_key)
    rows, ws, ms = [], [], []
    last = -1
    for row, _, _, w, m in entries:
        if row == last:
            ws[-1] += w
            ms[-1] += m
        else:
            rows.append(row)
            ws.append(w)
            ms.append(m)
            last = row
    decrements = list(zip(rows, ms))

    live = [p for p in range(len(rows)) if ws[p] >= DROP_BELOW]
    if not live:
        return [], [], 0.0, [], decrements

    srt = sorted(live, key=lambda p: (ws[p], rows[p]))
    sv = [rows[p] for p in srt]
    sw = [ws[p] for p in srt]
    suf = suffix_sums(sw)
    total = suf[0]

    col_rows = [rows[p] for p in live]
    col_vals = [-ws[p] / total for p in live]
    if exact:
        gen = clique_edges(sv, sw, total)
    else:
        gen = sample_tree(sv, sw, suf, seed, k)
    samples = [(a, b, w, i) if a < b else (b, a, w, i) for i, a, b, w in gen]
    return col_rows, col_vals, total, samples, decrements


def _entry_key(e):
    return e[0], e[1], e[2]


class FactorTrace:
    """Per-vertex record of one factorization run, indexed by position."""

    def __init__(self, n):
        self.n = n
        self.worker = np.zeros(n, dtype=np.int64)
        self.t_start = np.zeros(n)
        self.t_end = np.zeros(n)
        self.claim_stamp = np.zeros(n, dtype=np.int64)
        self.done_stamp = np.zeros(n, dtype=np.int64)
        self.merged_degree = np.zeros(n, dtype=np.int64)
        self.samples_emitted = np.zeros(n, dtype=np.int64)
        self.fills_received = np.zeros(n, dtype=np.int64)
        self.fills_drained = np.zeros(n, dtype=np.int64)
        self.deps = [()] * n
        self.extra = {}

    def record(self, k, worker, t0, t1, merged, emitted, received, drained,
               deps, claim=0, done=0):
        self.worker[k] = worker
        self.t_start[k] = t0
        self.t_end[k] = t1
        self.merged_degree[k] = merged
        self.samples_emitted[k] = emitted
        self.fills_received[k] = received
        self.fills_drained[k] = drained
        self.deps[k] = tuple(deps)
        self.claim_stamp[k] = claim
        self.done_stamp[k] = done

    def rounds(self):
        """ASAP round index of every position (1-based)."""
        level = np.ones(self.n, dtype=np.int64)
        for k in range(self.n):
            nxt = level[k] + 1
            for t in self.deps[k]:
                if level[t] < nxt:
                    level[t] = nxt
        return level

    def dependency_violations(self):
        """Edges ``(k, t)`` where ``t`` was claimed before ``k`` finished."""
        bad = []
        for k in range(self.n):
            for t in self.deps[k]:
                if self.done_stamp[k] >= self.claim_stamp[t]:
                    bad.append((k, t))
        return bad

    def to_dict(self):
        t0 = float(self.t_start.min()) if self.n else 0.0
        rounds = self.rounds()
        return {
            "n": self.n,
            **self.extra,
            "vertices": [
                {"position": k,
                 "worker": int(self.worker[k]),
                 "start": float(self.t_start[k] - t0),
                 "end": float(self.t_end[k] - t0),
                 "round": int(rounds[k]),
                 "fills_received": int(self.fills_received[k]),
                 "merged_degree": int(self.merged_degree[k]),
                 "samples_emitted": int(self.samples_emitted[k])}
                for k in range(self.n)],
        }

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)


def schedule_depth(trace):
    """Rounds needed when every ready vertex is eliminated each round."""
    if trace.n == 0:
        return 0
    return int(trace.rounds().max())


def assemble(n, columns, D, ordering):
    """Build an :class:`LdlFactor` from per-position ``(rows, vals)``."""
    counts = np.fromiter((len(c[0]) for c in columns), dtype=np.int64,
                         count=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.fromiter((r for c in columns for r in c[0]), dtype=np.int64,
                          count=int(indptr[-1]))
    data = np.fromiter((v for c in columns for v in c[1]), dtype=np.float64,
                       count=int(indptr[-1]))
    return LdlFactor(n, indptr, indices, data, np.asarray(D, dtype=float),
                     ordering)


def _run(problem, seed, exact, trace, edge_cap, debug):
    n = problem.n
    fills = [[] for _ in range(n)]
    columns = [None] * n
    D = [0.0] * n
    live_edges = problem.n_edges
    for k in range(n):
        t0 = time.perf_counter()
        parked = fills[k]
        fills[k] = None
        entries = problem.initial_entries(k) + parked
        rows, vals, d, samples, decs = eliminate(k, entries, seed, exact)
        columns[k] = (rows, vals)
        D[k] = d
        for a, b, w, seq in samples:
            if debug and not (k < a < b):
                raise AssertionError(f"fill ({a}, {b}) from {k} is not ahead")
            fills[a].append((b, k, seq, w, 1))
        live_edges += len(samples) - len(entries)
        if live_edges > edge_cap:
            raise DenseBlowup(
                f"working graph reached {live_edges} edges at position {k} "
                f"(cap {edge_cap})")
        if debug:
            _check_entries(k, entries)
        if trace is not None:
            trace.record(k, 0, t0, time.perf_counter(), len(rows),
                         len(samples), len(parked), len(parked),
                         [r for r, _ in decs], claim=2 * k, done=2 * k + 1)
    return assemble(n, columns, D, problem.ordering)


def _check_entries(k, entries):
    for row, src, _, w, m in entries:
        if row <= k or w <= 0 or m < 1 or src >= k:
            raise AssertionError(
                f"working graph not a valid Laplacian at position {k}: "
                f"entry {(row, src, w, m)}")


def factor_randomized(graph, ordering=None, seed=0, trace=None, debug=False):
    """Randomized Cholesky with spanning-tree clique sampling.

    Parameters
    ----------
    graph : LaplacianGraph
    ordering : Ordering, optional
        Elimination order; natural order when omitted.
    seed : int
        Seed of the counter-based sample stream.
    trace : FactorTrace, optional
        Filled with per-vertex instrumentation when given.
    debug : bool
        Check working-graph invariants after every elimination.

    Returns
    -------
    LdlFactor
    """
    problem = EliminationProblem(graph, ordering)
    return _run(problem, int(seed), False, trace, float("inf"), debug)


def factor_exact(graph, ordering=None, edge_cap=EXACT_EDGE_CAP, trace=None,
                 debug=False):
    """Classical elimination inserting the full clique at every step."""
    problem = EliminationProblem(graph, ordering)
    return _run(problem, 0, True, trace, edge_cap, debug)


def dependency_counts(graph, ordering=None):
    """Initial dependency count of every vertex, indexed by vertex label."""
    problem = EliminationProblem(graph, ordering)
    return problem.dp[problem.ordering.perm]
