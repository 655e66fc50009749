"""Elimination orderings."""

import numpy as np

from .errors import NotAPermutation
from .graph import Ordering


def ordering_natural(n):
    return Ordering.natural(n)


def ordering_random(n, seed=0):
    """Uniform random elimination order, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    return Ordering(rng.permutation(n))


def ordering_nnz_sort(graph, seed=0):
    """Ascending initial degree; ties ordered by a seeded random permutation.

    The tie-break keys are the random permutation :func:`ordering_random`
    would produce, so a regular graph yields exactly that ordering.
    """
    rng = np.random.default_rng(seed)
    ties = rng.permutation(graph.n)
    rank = np.empty(graph.n, dtype=np.int64)
    rank[ties] = np.arange(graph.n)
    return Ordering(np.lexsort((rank, graph.degree)))


def ordering_from_file(path, n=None):
    """Read a whitespace separated 0-based elimination sequence.

    The ``k``-th integer is the vertex eliminated at position ``k``.
    """
    with open(path) as fh:
        tokens = fh.read().split()
    try:
        order = np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError as exc:
        raise NotAPermutation(f"{path}: {exc}") from None
    if n is not None and len(order) != n:
        raise NotAPermutation(
            f"{path}: expected {n} entries, found {len(order)}")
    return Ordering(order)


def write_ordering(ordering, path):
    with open(path, "w") as fh:
        fh.write(" ".join(map(str, ordering.order.tolist())))
        fh.write("\n")


def make_ordering(spec, graph, seed=0):
    """Resolve ``natural``, ``random``, ``nnz-sort`` or ``file:<path>``."""
    if isinstance(spec, Ordering):
        return spec
    if spec == "natural":
        return ordering_natural(graph.n)
    if spec == "random":
        return ordering_random(graph.n, seed)
    if spec in ("nnz-sort", "nnz_sort"):
        return ordering_nnz_sort(graph, seed)
    if spec.startswith("file:"):
        return ordering_from_file(spec[5:], graph.n)
    raise ValueError(f"unknown ordering {spec!r}")
