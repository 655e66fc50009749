"""Linear-probing fill-in workspace for the right-looking backend."""

import numpy as np

from ..errors import WorkspaceFull
from .atomics import AtomicInt, AtomicIntArray, Backoff

FREE, BUSY, OCCUPIED = 0, 1, 2


class HashWorkspace:
    """Fixed-capacity slot array holding pending Schur-complement updates.

    A slot moves ``FREE -> BUSY`` by compare-and-swap when an inserter claims
    it, ``BUSY -> OCCUPIED`` once its payload is written, and back to
    ``FREE`` when the target vertex gathers it. Each vertex ``v`` starts its
    probe window at ``sigma[v]``, a random bijection of the vertices scaled
    into the table; ``random_sigma=False`` uses the identity mapping instead.
    """

    def __init__(self, capacity, n, seed=0, random_sigma=True):
        self.capacity = int(capacity)
        if self.capacity < 1:
            raise ValueError("workspace capacity must be positive")
        self.state = AtomicIntArray.filled(self.capacity, FREE)
        self.target = np.zeros(self.capacity, dtype=np.int64)
        self.row = np.zeros(self.capacity, dtype=np.int64)
        self.src = np.zeros(self.capacity, dtype=np.int64)
        self.seq = np.zeros(self.capacity, dtype=np.int64)
        self.weight = np.zeros(self.capacity, dtype=np.float64)
        if random_sigma:
            base = np.random.default_rng(seed).permutation(n)
        else:
            base = np.arange(n)
        self.sigma = (base * self.capacity) // max(n, 1)
        self.inserted = AtomicInt(0)
        self.probes = AtomicInt(0)

    def insert(self, t, offset, row, weight, src, seq):
        """Park an update for ``t``, probing from ``sigma[t] + offset``."""
        cap = self.capacity
        start = int(self.sigma[t]) + offset
        for step in range(cap):
            slot = (start + step) % cap
            if self.state.load(slot) != FREE:
                continue
            if self.state.compare_exchange(slot, FREE, BUSY):
                self.target[slot] = t
                self.row[slot] = row
                self.weight[slot] = weight
                self.src[slot] = src
                self.seq[slot] = seq
                self.state.store(slot, OCCUPIED)
                self.inserted.fetch_add(1)
                self.probes.fetch_add(step + 1)
                return slot
        raise WorkspaceFull(
            f"no free slot for vertex {t} after probing all {cap} slots")

    def gather(self, k, count):
        """Remove and return the ``count`` entries parked for ``k``."""
        out = []
        if count == 0:
            return out
        cap = self.capacity
        start = int(self.sigma[k])
        for step in range(cap):
            slot = (start + step) % cap
            st = self.state.load(slot)
            if st == BUSY and self.target[slot] == k:
                # cannot happen once k is ready; wait defensively
                backoff = Backoff()
                while self.state.load(slot) == BUSY:
                    backoff.pause()
                st = self.state.load(slot)
            if st == OCCUPIED and self.target[slot] == k:
                out.append((int(self.row[slot]), int(self.src[slot]),
                            int(self.seq[slot]), float(self.weight[slot]), 1))
                self.state.store(slot, FREE)
                if len(out) == count:
                    return out
        return out

    def counts(self):
        """Number of slots in each state."""
        s = self.state.snapshot()
        return {"free": int((s == FREE).sum()), "busy": int((s == BUSY).sum()),
                "occupied": int((s == OCCUPIED).sum())}
