from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from mimicnet.errors import MissingCapacities, TooManyTerminals
from mimicnet.flowmimic import (
    combine,
    expand_flow,
    external_cuts,
    flow_mimick,
    mimick_parts,
    planar_flow_mimick3,
)
from mimicnet.graph import Graph
from mimicnet.mimic_matching import outerplanar_embedding
from mimicnet.oracle import oracle_external_flow, oracle_max_flow

from helpers import flow_violations, random_graph


def edge_part(g: Graph, names=None):
    names = names or list(range(g.n))
    return ("edges", list(range(g.m)), [(names[u], names[v]) for u, v in g.edges], list(g.capacities))


def test_series_path_collapses_to_bottleneck():
    g = Graph(3, [(0, 1), (1, 2)], None, [3, 7])
    m = flow_mimick(g, [0, 2])
    assert m.graph.n == 2 and m.graph.edges == ((0, 1),)
    assert m.graph.capacities == (3,)
    assert m.external_cuts == {1: 3}


def test_parallel_paths_add():
    g = Graph(4, [(0, 1), (1, 3), (0, 2), (2, 3)], None, [4, 9, 6, 2])
    m = flow_mimick(g, [0, 3])
    assert m.external_cuts == {1: 6}
    assert sum(m.graph.capacities) == 6


def test_terminal_order_is_kept():
    g = Graph(3, [(0, 1), (1, 2)], None, [3, 7])
    m = flow_mimick(g, [2, 1, 0])
    # vertex 1 in the mimick is original vertex 1; cut {2} alone costs 7
    assert m.terminals == (2, 1, 0)
    assert m.external_cuts[1] == 7
    assert m.external_cuts == oracle_external_flow(g, [2, 1, 0])


def test_chain_combined_matches_oracle():
    rng = random.Random(3)
    caps = [rng.randint(1, 9) for _ in range(5)]
    g = Graph(6, [(i, i + 1) for i in range(5)], None, caps)
    acc = flow_mimick(Graph(2, [(0, 1)], None, [caps[0]]), [0, 1])
    for i in range(1, 5):
        nxt = mimick_parts([("edges", [i], [(i, i + 1)], [caps[i]])], [i, i + 1])
        acc = combine(acc, nxt, [i])
    assert acc.terminals == (0, 5)
    assert acc.external_cuts[1] == oracle_max_flow(g, 0, 5)[0] == min(caps)


def test_idempotent():
    g = random_graph(11, 9, 0.5, capacities=(1, 9))
    T = [0, 3, 5, 8]
    m = flow_mimick(g, T)
    again = flow_mimick(m.graph, list(range(len(T))))
    assert again.graph.n == m.graph.n and again.graph.m == m.graph.m
    assert again.external_cuts == m.external_cuts


def test_errors():
    with pytest.raises(MissingCapacities):
        flow_mimick(Graph(2, [(0, 1)]), [0, 1])
    g = random_graph(1, 9, 0.5, capacities=(1, 3))
    with pytest.raises(TooManyTerminals):
        flow_mimick(g, list(range(7)))
    with pytest.raises(ValueError):
        flow_mimick(g, [0, 0])


@given(st.integers(0, 10_000), st.integers(2, 10), st.integers(2, 6))
def test_cut_preservation(seed, n, k):
    k = min(k, n)
    g = random_graph(seed, n, 0.45, capacities=(0, 9))
    T = random.Random(seed).sample(range(n), k)
    m = flow_mimick(g, T)
    want = oracle_external_flow(g, T)
    assert m.external_cuts == want
    assert oracle_external_flow(m.graph, list(range(k))) == want
    assert m.graph.n <= 2 ** (2 ** (k - 1) - 1) + k


@given(st.integers(0, 10_000))
def test_combination_is_associative(seed):
    # three blocks glued in a line on shared pairs of vertices
    blocks = [random_graph(seed + i, 5, 0.6, capacities=(1, 9)) for i in range(3)]
    names = [["a", "b", ("x", 0), ("y", 0), "c"],
             ["c", ("x", 1), ("y", 1), "d", "b"],
             ["d", ("x", 2), "e", ("y", 2), "f"]]
    ms = [mimick_parts([edge_part(b, nm)], [v for v in nm if isinstance(v, str)]) for b, nm in zip(blocks, names)]
    final_terms = ["a", "e", "f"]
    left = combine(combine(ms[0], ms[1], ["b", "c"]), ms[2], ["d"], final_terms)
    right = combine(ms[0], combine(ms[1], ms[2], ["d"]), ["b", "c"], final_terms)
    flat = mimick_parts([edge_part(b, nm) for b, nm in zip(blocks, names)], final_terms)
    assert left.external_cuts == right.external_cuts == flat.external_cuts


def test_planar_three_terminal():
    for seed in range(40):
        g = random_graph(seed, 8, 0.5, capacities=(1, 9))
        m = planar_flow_mimick3(g, [0, 1, 2])
        assert m.external_cuts == oracle_external_flow(g, [0, 1, 2])
        assert outerplanar_embedding(m.graph, [0, 1, 2]) is not None
        assert external_cuts(m.graph, 3) == m.external_cuts


@given(st.integers(0, 10_000), st.integers(3, 10))
def test_expand_flow_is_a_max_flow(seed, n):
    g = random_graph(seed, n, 0.45, capacities=(1, 9))
    s, t = 0, n - 1
    m = mimick_parts([edge_part(g)], [s, t])
    value = m.external_cuts[1]
    assert value == oracle_max_flow(g, s, t)[0]
    flow: dict[int, int] = {}
    if value:
        expand_flow(m, {s: value, t: -value}, flow)
    assert flow_violations(g, s, t, value, flow) == []


def test_expand_through_nested_networks():
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (2, 4)], None, [4, 5, 3, 6, 2, 1])
    inner1 = mimick_parts([("edges", [0, 1, 4], [(0, 1), (1, 2), (0, 2)], [4, 5, 2])], [0, 2])
    inner2 = mimick_parts([("edges", [2, 3, 5], [(2, 3), (3, 4), (2, 4)], [3, 6, 1])], [2, 4])
    top = mimick_parts([("net", inner1), ("net", inner2)], [0, 4])
    value = top.external_cuts[1]
    assert value == oracle_max_flow(g, 0, 4)[0] == 4
    flow: dict[int, int] = {}
    expand_flow(top, {0: value, 4: -value}, flow)
    assert flow_violations(g, 0, 4, value, flow) == []
