"""Spanning-tree clique sampling for one eliminated vertex.

When vertex ``k`` with neighbor weights ``w_1 <= ... <= w_m`` is eliminated,
the exact Schur complement adds a clique with edge weights
``w_i * w_j / l_kk``. The sampler replaces it by ``m - 1`` edges forming a
spanning tree whose Laplacian equals the clique in expectation.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import TooManyNeighbors
from .rng import SampleStream, draw

ENUMERATION_LIMIT = 8


@dataclass(frozen=True)
class SampledEdge:
    i: int
    j: int
    weight: float


class NeighborList:
    """Merged neighbors of the vertex being eliminated.

    Entries are unique by vertex. ``is_sorted`` tells whether they are in the
    sampling order produced by :func:`sort_neighbors`.
    """

    def __init__(self, vertices, weights, multiplicity=None, owner=None,
                 is_sorted=False):
        self.vertices = [int(v) for v in vertices]
        self.weights = [float(w) for w in weights]
        if multiplicity is None:
            multiplicity = [1] * len(self.vertices)
        self.multiplicity = [int(m) for m in multiplicity]
        self.owner = owner
        self.is_sorted = is_sorted
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("neighbor list has repeated vertices")
        if any(w <= 0 for w in self.weights):
            raise ValueError("neighbor weights must be positive")

    def __len__(self):
        return len(self.vertices)

    @property
    def total(self):
        """``l_kk``, accumulated right to left over the current order."""
        return suffix_sums(self.weights)[0] if self.weights else 0.0

    def __repr__(self):
        pairs = ", ".join(f"({v}, {w:g})"
                          for v, w in zip(self.vertices, self.weights))
        return f"NeighborList([{pairs}])"


def suffix_sums(weights):
    """``suf[p] = weights[p] + ... + weights[-1]``, plus a trailing zero.

    Always accumulated sequentially from the right so that every backend
    produces the same bits.
    """
    m = len(weights)
    suf = [0.0] * (m + 1)
    acc = 0.0
    for p in range(m - 1, -1, -1):
        acc = acc + weights[p]
        suf[p] = acc
    return suf


def select(suf, lo, u):
    """Largest index ``p >= lo`` with ``suf[p] > u``.

    ``u`` is uniform on ``[0, suf[lo])`` so index ``p`` is hit with
    probability ``(suf[p] - suf[p+1]) / suf[lo]``. A draw landing exactly on
    ``suf[p+1]`` goes to the lower index ``p``.
    """
    hi = len(suf) - 2
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if suf[mid] > u:
            lo = mid
        else:
            hi = mid - 1
    return lo


def sort_neighbors(nlist):
    """Sort ascending by weight, ties broken by ascending vertex id."""
    idx = sorted(range(len(nlist)),
                 key=lambda p: (nlist.weights[p], nlist.vertices[p]))
    return NeighborList([nlist.vertices[p] for p in idx],
                        [nlist.weights[p] for p in idx],
                        [nlist.multiplicity[p] for p in idx],
                        owner=nlist.owner, is_sorted=True)


def sample_tree(vertices, weights, suf, seed, stream_id, counter=0):
    """Core sampler over an already sorted list.

    Yields ``(sample_index, a, b, weight)`` for the ``m - 1`` tree edges;
    draw ``i`` uses stream coordinates ``(seed, stream_id, counter + i)``.
    """
    m = len(vertices)
    total = suf[0]
    for i in range(m - 1):
        s = suf[i + 1]
        u = draw(seed, stream_id, counter + i) * s
        j = select(suf, i + 1, u)
        yield i, vertices[i], vertices[j], s * weights[i] / total


def sample_clique(nlist, stream):
    """Draw the spanning-tree replacement for the clique of ``nlist``.

    ``stream`` is a :class:`SampleStream` (its vertex id and seed select the
    random sequence) or an integer seed. Draws start at the stream's
    counter, which advances by the number of edges returned. Returns
    ``max(len - 1, 0)`` edges.
    """
    if not isinstance(stream, SampleStream):
        stream = SampleStream(stream, nlist.owner or 0)
    if not nlist.is_sorted:
        nlist = sort_neighbors(nlist)
    suf = suffix_sums(nlist.weights)
    out = [SampledEdge(a, b, w) for _, a, b, w in sample_tree(
        nlist.vertices, nlist.weights, suf, stream.seed, stream.vertex,
        stream.counter)]
    stream.counter += len(out)
    return out


def clique_edges(vertices, weights, total):
    """Exact clique ``(pair_index, a, b, w_a * w_b / total)`` over all pairs."""
    idx = 0
    m = len(vertices)
    for p in range(m - 1):
        for q in range(p + 1, m):
            yield idx, vertices[p], vertices[q], weights[q] * weights[p] / total
            idx += 1


def _local_laplacian(vertices, edges):
    """Dense Laplacian over ``sorted(vertices)`` from ``(a, b, w)`` edges."""
    labels = sorted(vertices)
    where = {v: p for p, v in enumerate(labels)}
    out = np.zeros((len(labels), len(labels)))
    for a, b, w in edges:
        i, j = where[a], where[b]
        out[i, i] += w
        out[j, j] += w
        out[i, j] -= w
        out[j, i] -= w
    return out


def exact_clique(nlist):
    """Dense Laplacian of the exact elimination clique.

    Rows and columns follow ascending vertex id of the neighbors.
    """
    srt = sort_neighbors(nlist)
    edges = [(a, b, w) for _, a, b, w in
             clique_edges(srt.vertices, srt.weights, srt.total)]
    return _local_laplacian(nlist.vertices, edges)


def enumerate_expectation(nlist):
    """Expected Laplacian of :func:`sample_clique` by full enumeration.

    Walks every outcome of the draw sequence (``(m-1)!`` of them), weighting
    each by its probability ``prod w_j / S_i``, using exact rational
    probabilities in floating point rather than the sampler's code path.
    """
    m = len(nlist)
    if m > ENUMERATION_LIMIT:
        raise TooManyNeighbors(
            f"{m} neighbors exceeds enumeration limit {ENUMERATION_LIMIT}")
    srt = sort_neighbors(nlist)
    v, w = srt.vertices, srt.weights
    total = float(sum(w))
    tails = [float(sum(w[i:])) for i in range(m + 1)] + [0.0]

    labels = sorted(v)
    where = {x: p for p, x in enumerate(labels)}
    out = np.zeros((m, m))
    for choice in product(*[range(i + 1, m) for i in range(m - 1)]):
        prob = 1.0
        edges = []
        for i, j in enumerate(choice):
            s = tails[i + 1]
            prob *= w[j] / s
            edges.append((v[i], v[j], s * w[i] / total))
        for a, b, wt in edges:
            p, q = where[a], where[b]
            out[p, p] += prob * wt
            out[q, q] += prob * wt
            out[p, q] -= prob * wt
            out[q, p] -= prob * wt
    return out
