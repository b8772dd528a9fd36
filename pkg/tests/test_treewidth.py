from __future__ import annotations

import itertools

import networkx as nx
from hypothesis import given, strategies as st

from mimicnet.generators import k5, wagner_graph
from mimicnet.graph import Graph
from mimicnet.treewidth import adjacency_of, elimination_width, treewidth, treewidth_at_most

from helpers import random_graph


def brute_treewidth(g: Graph) -> int:
    adj = adjacency_of(g)
    return min(elimination_width(adj, list(order)) for order in itertools.permutations(range(g.n)))


def test_tree_has_width_one():
    t = nx.random_labeled_tree(12, seed=4)
    g = Graph(12, sorted(t.edges()))
    td = treewidth_at_most(g, 1)
    assert td is not None and td.width == 1 and td.is_valid_for(adjacency_of(g))


def test_k5():
    assert treewidth(k5()) == 4
    assert treewidth_at_most(k5(), 3) is None


def test_wagner_matches_exhaustive_orders():
    g = wagner_graph()
    assert treewidth(g) == brute_treewidth(g) == 4
    td = treewidth_at_most(g, 4)
    assert td.is_valid_for(adjacency_of(g))


@given(st.integers(0, 10_000), st.integers(1, 7))
def test_agrees_with_all_orders(seed, n):
    g = random_graph(seed, n, 0.5)
    w = brute_treewidth(g)
    assert treewidth(g) == w
    td = treewidth_at_most(g, w)
    assert td is not None and td.width <= w and td.is_valid_for(adjacency_of(g))
    if w > 0:
        assert treewidth_at_most(g, w - 1) is None
