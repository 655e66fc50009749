import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.sparse.csgraph import connected_components as cc

from parac.errors import TooManyNeighbors
from parac.rng import SampleStream, draw
from parac.sampling import (NeighborList, enumerate_expectation,
                            exact_clique, sample_clique, select,
                            sort_neighbors, suffix_sums)


def test_sort_by_weight():
    nl = sort_neighbors(NeighborList([2, 1], [3.0, 1.0]))
    assert nl.vertices == [1, 2] and nl.is_sorted


def test_sort_ties_by_id():
    nl = sort_neighbors(NeighborList([3, 1, 2], [1.0, 1.0, 1.0]))
    assert nl.vertices == [1, 2, 3]


def test_sort_empty():
    assert len(sort_neighbors(NeighborList([], []))) == 0


def test_k3_pair_exact():
    edges = sample_clique(NeighborList([1, 2], [1.0, 1.0]), 0)
    assert [(e.i, e.j, e.weight) for e in edges] == [(1, 2, 0.5)]


def test_weighted_pair_exact():
    nl = NeighborList([1, 2], [1.0, 3.0])
    (e,) = sample_clique(nl, 7)
    assert (e.i, e.j) == (1, 2) and e.weight == 0.75 == 1.0 * 3.0 / 4.0


def test_star_outcomes_and_probabilities():
    nl = NeighborList([1, 2, 3], [1.0, 1.0, 1.0])
    allowed = {((1, 2, 2 / 3), (2, 3, 1 / 3)), ((1, 3, 2 / 3), (2, 3, 1 / 3))}
    trials = 4000
    seen = Counter()
    for seed in range(trials):
        out = tuple((e.i, e.j, e.weight)
                    for e in sample_clique(nl, SampleStream(seed, 0)))
        assert out in allowed
        seen[out] += 1
    assert set(seen) == allowed
    # binomial(4000, 1/2): 5 standard deviations is about 158
    for c in seen.values():
        assert abs(c - trials / 2) < 5 * math.sqrt(trials / 4)


def test_exact_clique_examples():
    np.testing.assert_allclose(
        exact_clique(NeighborList([1, 2], [1.0, 1.0])),
        [[0.5, -0.5], [-0.5, 0.5]])
    c = exact_clique(NeighborList([1, 2, 3], [1.0, 1.0, 1.0]))
    off = c[~np.eye(3, dtype=bool)]
    np.testing.assert_allclose(off, -1 / 3)
    assert exact_clique(NeighborList([4], [2.0])).tolist() == [[0.0]]


def test_enumeration_star():
    nl = NeighborList([1, 2, 3], [1.0, 1.0, 1.0])
    np.testing.assert_allclose(enumerate_expectation(nl), exact_clique(nl),
                               atol=1e-15)


def test_enumeration_pair_exact():
    nl = NeighborList([5, 2], [0.3, 7.0])
    assert np.array_equal(enumerate_expectation(nl), exact_clique(nl))


def test_enumeration_weighted_triple():
    nl = NeighborList([1, 2, 3], [1.0, 2.0, 3.0])
    assert np.abs(enumerate_expectation(nl) - exact_clique(nl)).max() <= 1e-12


def test_enumeration_limit():
    with pytest.raises(TooManyNeighbors):
        enumerate_expectation(NeighborList(range(9), [1.0] * 9))


def test_suffix_sums_right_to_left():
    w = [0.1, 0.2, 0.3]
    assert suffix_sums(w) == [(0.3 + 0.2) + 0.1, 0.3 + 0.2, 0.3, 0.0]


def test_select_boundaries():
    suf = [3.0, 2.0, 1.0, 0.0]
    assert select(suf, 1, 0.0) == 2
    assert select(suf, 1, 0.999) == 2
    # a draw exactly on a partial sum goes to the lower index
    assert select(suf, 1, 1.0) == 1
    assert select(suf, 1, 1.999) == 1


def test_rng_pure_and_uniform_range():
    assert draw(3, 4, 5) == draw(3, 4, 5)
    vals = [draw(1, v, c) for v in range(50) for c in range(50)]
    assert all(0.0 <= x < 1.0 for x in vals)
    assert abs(np.mean(vals) - 0.5) < 0.02
    s = SampleStream(3, 4, 5)
    assert s.draw() == draw(3, 4, 5) and s.counter == 6


neighbor_lists = st.lists(
    st.tuples(st.integers(0, 60),
              st.floats(1e-3, 1e3, allow_nan=False, allow_infinity=False)),
    min_size=0, max_size=12, unique_by=lambda t: t[0])


@settings(max_examples=200, deadline=None)
@given(neighbor_lists, st.integers(0, 2**63 - 1), st.integers(0, 1000))
def test_sampled_edges_form_spanning_tree(entries, seed, counter):
    verts = [v for v, _ in entries]
    nl = NeighborList(verts, [w for _, w in entries])
    edges = sample_clique(nl, SampleStream(seed, 0, counter))
    assert len(edges) == max(len(nl) - 1, 0)
    assert all(e.weight > 0 and e.i != e.j for e in edges)
    # emitted weight never exceeds l_kk
    assert sum(e.weight for e in edges) <= nl.total * (1 + 1e-12)
    if len(nl) > 1:
        where = {v: p for p, v in enumerate(verts)}
        a = np.zeros((len(verts), len(verts)))
        for e in edges:
            a[where[e.i], where[e.j]] = a[where[e.j], where[e.i]] = 1
        assert cc(a)[0] == 1  # m - 1 edges and connected: a tree
    again = sample_clique(nl, SampleStream(seed, 0, counter))
    assert again == edges


@settings(max_examples=150, deadline=None)
@given(st.lists(st.floats(0.05, 20.0), min_size=1, max_size=6),
       st.integers(0, 100))
def test_enumeration_matches_clique(weights, shift):
    nl = NeighborList([shift + 3 * i for i in range(len(weights))], weights)
    assert np.abs(enumerate_expectation(nl) - exact_clique(nl)).max() <= 1e-12
