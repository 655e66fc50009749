"""Indivisible read-modify-write primitives for worker threads.

Each array guards its slots with a small set of striped locks, so
operations on different slots rarely contend while every single operation
stays atomic with respect to the others on the same slot.
"""

import threading
import time

import numpy as np

from ..errors import QueueStall

_STRIPES = 64
EMPTY = -1


class AtomicIntArray:

    def __init__(self, values):
        self._v = [int(x) for x in values]
        self._locks = [threading.Lock() for _ in range(_STRIPES)]

    @classmethod
    def filled(cls, n, value):
        return cls([value] * n)

    def __len__(self):
        return len(self._v)

    def load(self, i):
        return self._v[i]

    def store(self, i, value):
        with self._locks[i % _STRIPES]:
            self._v[i] = value

    def fetch_add(self, i, delta):
        """Add ``delta`` and return the previous value."""
        with self._locks[i % _STRIPES]:
            old = self._v[i]
            self._v[i] = old + delta
        return old

    def add_fetch(self, i, delta):
        with self._locks[i % _STRIPES]:
            new = self._v[i] + delta
            self._v[i] = new
        return new

    def exchange(self, i, value):
        with self._locks[i % _STRIPES]:
            old = self._v[i]
            self._v[i] = value
        return old

    def compare_exchange(self, i, expected, value):
        with self._locks[i % _STRIPES]:
            if self._v[i] != expected:
                return False
            self._v[i] = value
            return True

    def snapshot(self):
        return np.array(self._v, dtype=np.int64)


class AtomicInt:

    def __init__(self, value=0):
        self._v = int(value)
        self._lock = threading.Lock()

    def load(self):
        return self._v

    def fetch_add(self, delta):
        with self._lock:
            old = self._v
            self._v = old + delta
        return old


class Backoff:
    """Bounded exponential sleep used by spin-waits."""

    def __init__(self, start=1e-6, limit=1e-3):
        self.delay = 0.0
        self.start = start
        self.limit = limit

    def pause(self):
        time.sleep(self.delay)
        self.delay = min(self.limit, max(self.start, 2 * self.delay))


class JobQueue:
    """Write-once slots filled in publication order behind a monotone tail."""

    def __init__(self, n, watchdog=60.0):
        self.slots = AtomicIntArray.filled(n, EMPTY)
        self.tail = AtomicInt(0)
        self.watchdog = watchdog
        self.last_publish = time.monotonic()

    def publish(self, v):
        pos = self.tail.fetch_add(1)
        self.slots.store(pos, v)
        self.last_publish = time.monotonic()
        return pos

    def wait(self, pos, abort, describe=None):
        """Spin until slot ``pos`` is published; ``None`` if aborted."""
        v = self.slots.load(pos)
        if v != EMPTY:
            return v
        backoff = Backoff()
        while True:
            if abort.is_set():
                return None
            v = self.slots.load(pos)
            if v != EMPTY:
                return v
            if time.monotonic() - self.last_publish > self.watchdog:
                info = describe() if describe is not None else ""
                raise QueueStall(
                    f"no vertex published for {self.watchdog:.1f}s while "
                    f"waiting on queue slot {pos} (tail {self.tail.load()})"
                    f"{'; ' + info if info else ''}")
            backoff.pause()


class Arena:
    """One contiguous output region handed out by an atomic bump offset."""

    def __init__(self, budget, with_links=False):
        self.budget = int(budget)
        self.offset = AtomicInt(0)
        self.rows = np.zeros(self.budget, dtype=np.int64)
        self.vals = np.zeros(self.budget, dtype=np.float64)
        if with_links:
            self.nxt = np.full(self.budget, EMPTY, dtype=np.int64)
            self.src = np.zeros(self.budget, dtype=np.int64)
            self.seq = np.zeros(self.budget, dtype=np.int64)
        self.chunks = []
        self._chunk_lock = threading.Lock()

    def reserve(self, size, vertex):
        from ..errors import ArenaExhausted
        start = self.offset.fetch_add(size)
        if start + size > self.budget:
            raise ArenaExhausted(start, vertex, size, self.budget)
        with self._chunk_lock:
            self.chunks.append((start, size, vertex))
        return start

    def check_disjoint(self):
        """Chunks never overlap and never pass the bump offset."""
        spans = sorted(self.chunks)
        end = 0
        for start, size, vertex in spans:
            if start < end:
                raise AssertionError(f"chunk of vertex {vertex} overlaps")
            end = start + size
        if end > self.offset.load() or self.offset.load() > self.budget:
            raise AssertionError("arena offset invariant broken")
        return True
