import numpy as np
import pytest

from parac.graph import LaplacianGraph, Ordering
from parac.io import gen_random_graph


def path3():
    return LaplacianGraph.from_edges(3, [0, 1], [1, 2], [1.0, 1.0])


def triangle():
    return LaplacianGraph.from_edges(3, [0, 0, 1], [1, 2, 2], [1.0] * 3)


def star(leaves=3):
    """Center 0 joined to leaves 1..leaves by unit edges."""
    return LaplacianGraph.from_edges(leaves + 1, [0] * leaves,
                                     list(range(1, leaves + 1)),
                                     [1.0] * leaves)


def edgeless(n):
    return LaplacianGraph.from_edges(n, [], [], [])


def cycle(n, weights=None):
    w = np.ones(n) if weights is None else weights
    return LaplacianGraph.from_edges(n, np.arange(n), (np.arange(n) + 1) % n,
                                     w)


def multi_component(sizes, seed=0):
    """Disjoint union of random connected graphs of the given sizes."""
    rows, cols, ws = [], [], []
    off = 0
    for i, s in enumerate(sizes):
        g = gen_random_graph(s, 2 * s, seed=seed + i)
        a, b, w = g.edges()
        rows.append(a + off)
        cols.append(b + off)
        ws.append(w)
        off += s
    return LaplacianGraph.from_edges(off, np.concatenate(rows),
                                     np.concatenate(cols), np.concatenate(ws))


def random_graphs(count, n_max=40, seed=0, n_min=2):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        m = int(rng.integers(n - 1, min(3 * n, n * (n - 1) // 2) + 1))
        out.append(gen_random_graph(n, m, seed=seed * 1000 + i))
    return out


@pytest.fixture
def p3():
    return path3()


@pytest.fixture
def k3():
    return triangle()


@pytest.fixture
def natural3():
    return Ordering.natural(3)
