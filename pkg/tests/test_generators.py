from __future__ import annotations

import random

import networkx as nx
import pytest

from mimicnet.decompose import decompose
from mimicnet.generators import GenSpec, generate, is_connected, k5, random_planar, wagner_graph
from mimicnet.graph import embedding_is_planar, is_perfect_matching, is_planar
from mimicnet.treewidth import treewidth

from helpers import has_k33_minor_bruteforce, k33_minor_free_by_structure


def test_wagner_graph():
    g = wagner_graph()
    assert g.n == 8 and g.m == 12
    assert all(len(nb) == 3 for nb in g.neighbor_sets)
    assert not is_planar(g)
    assert treewidth(g) == 4
    assert not has_k33_minor_bruteforce(k5())


@pytest.mark.parametrize("n", [3, 4, 50])
def test_random_planar(n):
    g, rot = random_planar(n, seed=n)
    assert g.n == n and is_connected(g)
    assert embedding_is_planar(g, rot)
    assert g.m <= 3 * n - 6 or n < 3


def test_random_planar_rejects_tiny():
    with pytest.raises(ValueError):
        random_planar(2)


def test_spec_validation():
    with pytest.raises(ValueError):
        GenSpec(10, "grid")
    with pytest.raises(ValueError):
        GenSpec(0)


@pytest.mark.parametrize("family", ["planar", "k33-free", "k5-free", "bounded-tw"])
def test_same_seed_same_graph(family):
    a = generate(GenSpec(70, family, 9, plant_pm=True, weight_range=(-5, 5)))
    b = generate(GenSpec(70, family, 9, plant_pm=True, weight_range=(-5, 5)))
    c = generate(GenSpec(70, family, 10, plant_pm=True, weight_range=(-5, 5)))
    assert a.graph.edges == b.graph.edges and a.graph.weights == b.graph.weights
    assert a.planted == b.planted
    assert a.graph.edges != c.graph.edges


@pytest.mark.parametrize("family", ["planar", "k33-free", "k5-free", "bounded-tw"])
def test_instances_are_connected_and_decomposable(family):
    for seed in range(5):
        inst = generate(GenSpec(60, family, seed, plant_pm=True))
        g = inst.graph
        assert is_connected(g)
        assert abs(g.n - 60) <= 12
        assert is_perfect_matching(g, inst.planted)
        decompose(g)
        if family == "planar":
            assert is_planar(g)


def test_small_k33_free_instances_have_no_k33_minor():
    for seed in range(40):
        g = generate(GenSpec(random.Random(seed).randint(5, 12), "k33-free", seed, max_piece=6)).graph
        if g.n > 12:
            continue
        assert not has_k33_minor_bruteforce(g)
        assert k33_minor_free_by_structure(g)


def test_larger_k33_free_instances_pass_the_structure_check():
    for seed in range(10):
        g = generate(GenSpec(150, "k33-free", seed, sporadic_rate=0.4)).graph
        assert k33_minor_free_by_structure(g)


def test_k5_free_pieces_are_planar_or_wagner():
    wagner = wagner_graph().to_networkx()
    for seed in range(6):
        inst = generate(GenSpec(80, "k5-free", seed, sporadic_rate=0.4))
        h = inst.graph.to_networkx()
        assert inst.sporadic
        for verts in inst.pieces:
            sub = h.subgraph(verts)
            if nx.check_planarity(sub)[0]:
                continue
            assert len(verts) == 8 and verts in inst.sporadic
            matcher = nx.algorithms.isomorphism.GraphMatcher(wagner, sub)
            assert matcher.subgraph_is_monomorphic()


def test_ranges_respected():
    inst = generate(GenSpec(90, "k5-free", 3, weight_range=(-7, 4), capacity_range=(2, 11)))
    g = inst.graph
    assert all(-7 <= w <= 4 for w in g.weights)
    assert all(2 <= c <= 11 for c in g.capacities)
    assert len(g.weights) == len(g.capacities) == g.m


def test_tiny_sizes():
    assert generate(GenSpec(1)).graph.n == 1
    inst = generate(GenSpec(2, plant_pm=True))
    assert inst.graph.m == 1 and inst.planted == [0]
