"""Thread-parallel randomized factorization with dynamic dependency tracking.

Both backends share the same driver. Worker ``w`` of ``T`` claims job-queue
slots ``w, w + T, w + 2T, ...`` and eliminates whatever vertex lands there.
A vertex is published once its dependency counter (live edges to earlier
positions, counted with multiplicity) reaches zero. An eliminator performs
every increment caused by its samples before any of its decrements, so a
counter can never touch zero while an update to that vertex is in flight.

The two backends differ only in where pending fill-ins wait:

* left-looking: a per-vertex linked list whose nodes live in the emitter's
  arena chunk, pushed with an atomic exchange on the list head;
* right-looking: a linear-probing :class:`HashWorkspace`.
"""

import threading
import time

import numpy as np

from ..errors import ParacError
from ..factor import EliminationProblem, eliminate
from ..graph import LdlFactor
from .atomics import EMPTY, Arena, AtomicInt, AtomicIntArray, JobQueue
from .workspace import HashWorkspace


class LostFillIn(ParacError):
    exit_code = 13


ARENA_MULTIPLE = 12


def default_arena_budget(problem, multiple=ARENA_MULTIPLE):
    """``multiple * nnz_lower(L) + 2n`` entries (lower triangle incl. diagonal).

    The left-looking backend keeps each column next to the fill nodes it
    emits, about ``2 nnz(G)`` entries in total; sampled factors measure
    3 to 6 times ``nnz_lower(L)`` depending on the ordering.
    """
    return multiple * (problem.n_edges + problem.n) + 2 * problem.n


def default_workspace_capacity(problem, multiple=4):
    # live multi-edges never exceed the input edge count
    return max(16, multiple * max(problem.n_edges, 1))


class _Driver:

    def __init__(self, problem, seed, workers, watchdog, delay, trace,
                 arena_budget, with_links):
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self.problem = problem
        self.seed = int(seed)
        self.workers = int(workers)
        self.delay = delay
        self.trace = trace
        n = problem.n
        self.n = n
        self.dp = AtomicIntArray(problem.dp.tolist())
        self.fill_count = AtomicIntArray.filled(n, 0)
        self.queue = JobQueue(n, watchdog)
        if arena_budget is None:
            arena_budget = default_arena_budget(problem)
        self.arena = Arena(arena_budget, with_links=with_links)
        self.col_start = np.zeros(n, dtype=np.int64)
        self.col_len = np.zeros(n, dtype=np.int64)
        self.D = np.zeros(n)
        self.clock = AtomicInt(0)
        self.abort = threading.Event()
        self.errors = []
        self.drained = np.zeros(n, dtype=np.int64)
        for v in np.flatnonzero(problem.dp == 0).tolist():
            self.queue.publish(v)

    # backend hooks -----------------------------------------------------------
    def gather(self, k):
        raise NotImplementedError

    def place(self, k, rows, vals, samples):
        raise NotImplementedError

    def push(self, k, start, idx, a, b, w, seq):
        raise NotImplementedError

    # driver ------------------------------------------------------------------
    def run(self):
        threads = [threading.Thread(target=self._worker, args=(w,),
                                    name=f"parac-worker-{w}", daemon=True)
                   for w in range(self.workers)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        if self.errors:
            raise self.errors[0]
        lost = np.flatnonzero(self.drained != self.fill_count.snapshot())
        if len(lost):
            raise LostFillIn(f"fill-in count mismatch at positions "
                             f"{lost[:10].tolist()}")
        return self._assemble()

    def _describe(self):
        return (f"{self.queue.tail.load()} of {self.n} vertices published, "
                f"{self.clock.load() // 2} eliminated")

    def _worker(self, w):
        try:
            for qid in range(w, self.n, self.workers):
                k = self.queue.wait(qid, self.abort, self._describe)
                if k is None:
                    return
                self._eliminate(k, w)
                if self.abort.is_set():
                    return
        except BaseException as exc:  # noqa: BLE001 - re-raised by run()
            self.errors.append(exc)
            self.abort.set()

    def _pause(self, where, k):
        if self.delay is not None:
            self.delay(where, k)

    def _eliminate(self, k, w):
        claim = self.clock.fetch_add(1)
        t0 = time.perf_counter()
        self._pause("claim", k)
        parked = self.gather(k)
        self.drained[k] = len(parked)
        entries = self.problem.initial_entries(k) + parked
        rows, vals, d, samples, decs = eliminate(k, entries, self.seed)
        start = self.place(k, rows, vals, samples)
        self.D[k] = d
        for idx, (a, b, wt, seq) in enumerate(samples):
            self._pause("sample", k)
            self.dp.fetch_add(b, 1)
            self.push(k, start, idx, a, b, wt, seq)
        done = self.clock.fetch_add(1)
        self._pause("decrement", k)
        for t, m in decs:
            if self.dp.add_fetch(t, -m) == 0:
                self.queue.publish(t)
        if self.trace is not None:
            self.trace.record(k, w, t0, time.perf_counter(), len(rows),
                              len(samples), self.fill_count.load(k),
                              len(parked), [t for t, _ in decs],
                              claim=claim, done=done)

    def _assemble(self):
        n = self.n
        counts = self.col_len
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        offsets = np.repeat(self.col_start - indptr[:-1], counts)
        take = np.arange(indptr[-1]) + offsets
        return LdlFactor(n, indptr, self.arena.rows[take].copy(),
                         self.arena.vals[take].copy(), self.D.copy(),
                         self.problem.ordering)


class LeftLookingFactorizer(_Driver):

    def __init__(self, problem, seed, workers, watchdog, delay, trace,
                 arena_budget):
        super().__init__(problem, seed, workers, watchdog, delay, trace,
                         arena_budget, with_links=True)
        self.head = AtomicIntArray.filled(self.n, EMPTY)

    def gather(self, k):
        arena = self.arena
        out = []
        node = self.head.load(k)
        while node != EMPTY:
            out.append((int(arena.rows[node]), int(arena.src[node]),
                        int(arena.seq[node]), float(arena.vals[node]), 1))
            node = int(arena.nxt[node])
        return out

    def place(self, k, rows, vals, samples):
        ncol = len(rows)
        start = self.arena.reserve(ncol + len(samples), k)
        self.arena.rows[start:start + ncol] = rows
        self.arena.vals[start:start + ncol] = vals
        self.col_start[k] = start
        self.col_len[k] = ncol
        return start + ncol

    def push(self, k, start, idx, a, b, w, seq):
        arena = self.arena
        node = start + idx
        arena.rows[node] = b
        arena.vals[node] = w
        arena.src[node] = k
        arena.seq[node] = seq
        self.fill_count.fetch_add(a, 1)
        arena.nxt[node] = self.head.exchange(a, node)


class RightLookingFactorizer(_Driver):

    def __init__(self, problem, seed, workers, watchdog, delay, trace,
                 arena_budget, capacity, random_sigma):
        super().__init__(problem, seed, workers, watchdog, delay, trace,
                         arena_budget, with_links=False)
        if capacity is None:
            capacity = default_workspace_capacity(problem)
        self.workspace = HashWorkspace(capacity, self.n, seed=self.seed,
                                       random_sigma=random_sigma)

    def gather(self, k):
        count = self.fill_count.load(k)
        return self.workspace.gather(k, count)

    def place(self, k, rows, vals, samples):
        ncol = len(rows)
        start = self.arena.reserve(ncol, k)
        self.arena.rows[start:start + ncol] = rows
        self.arena.vals[start:start + ncol] = vals
        self.col_start[k] = start
        self.col_len[k] = ncol
        return start + ncol

    def push(self, k, start, idx, a, b, w, seq):
        offset = self.fill_count.fetch_add(a, 1)
        self.workspace.insert(a, offset, b, w, k, seq)


def factor_parallel_left(graph, ordering=None, seed=0, workers=1,
                         arena_budget=None, watchdog=60.0, trace=None,
                         delay=None):
    """Left-looking parallel factorization (fill lists in an arena).

    ``delay``, when given, is called as ``delay(where, k)`` at the
    ``"claim"``, ``"sample"`` and ``"decrement"`` checkpoints of vertex
    position ``k``; stress tests use it to perturb thread interleavings.

    Produces a factor bitwise identical to
    :func:`parac.factor.factor_randomized` for the same graph, ordering and
    seed, whatever the number of workers.
    """
    problem = EliminationProblem(graph, ordering)
    return LeftLookingFactorizer(problem, seed, workers, watchdog, delay,
                                 trace, arena_budget).run()


def factor_parallel_right(graph, ordering=None, seed=0, workers=1,
                          workspace_capacity=None, random_sigma=True,
                          arena_budget=None, watchdog=60.0, trace=None,
                          delay=None):
    """Right-looking parallel factorization (hash-map fill workspace)."""
    problem = EliminationProblem(graph, ordering)
    return RightLookingFactorizer(problem, seed, workers, watchdog, delay,
                                  trace, arena_budget, workspace_capacity,
                                  random_sigma).run()
