from __future__ import annotations

import json

import pytest
from hypothesis import assume, given, strategies as st

from mimicnet.errors import MissingCapacities, NotInFamily
from mimicnet.flowengine import find_max_flow, run_max_flow
from mimicnet.generators import GenSpec, generate
from mimicnet.graph import Graph
from mimicnet.oracle import oracle_max_flow

from helpers import flow_violations, random_graph


def grid(r: int, c: int, caps) -> Graph:
    edges = []
    for i in range(r):
        for j in range(c):
            v = i * c + j
            if j + 1 < c:
                edges.append((v, v + 1))
            if i + 1 < r:
                edges.append((v, v + c))
    return Graph(r * c, edges, None, [caps[k % len(caps)] for k in range(len(edges))])


def test_single_edge():
    g = Graph(2, [(0, 1)], None, [5])
    value, flow = find_max_flow(g, 0, 1)
    assert value == 5 and flow == {0: 5}
    value, flow = find_max_flow(g, 1, 0)
    assert value == 5 and flow == {0: -5}


def test_grid_corners():
    g = grid(4, 4, [3, 1, 4, 1, 5, 9, 2, 6])
    value, flow = find_max_flow(g, 0, 15)
    assert value == oracle_max_flow(g, 0, 15)[0]
    assert flow_violations(g, 0, 15, value, flow) == []


def test_disconnected_terminals():
    g = Graph(4, [(0, 1), (2, 3)], None, [4, 4])
    assert find_max_flow(g, 0, 3) == (0, {0: 0, 1: 0})


def test_argument_errors():
    with pytest.raises(MissingCapacities):
        find_max_flow(Graph(2, [(0, 1)]), 0, 1)
    g = Graph(2, [(0, 1)], None, [1])
    with pytest.raises(ValueError):
        find_max_flow(g, 0, 0)
    with pytest.raises(ValueError):
        find_max_flow(g, 0, 2)


@given(st.integers(0, 10_000), st.integers(2, 14), st.floats(0.15, 0.6))
def test_agrees_with_oracle(seed, n, p):
    g = random_graph(seed, n, p, capacities=(0, 12))
    s, t = 0, n - 1
    try:
        value, flow = find_max_flow(g, s, t)
    except NotInFamily:
        assume(False)
    assert value == oracle_max_flow(g, s, t)[0]
    assert flow_violations(g, s, t, value, flow) == []


@pytest.mark.parametrize("family", ["k5-free", "k33-free", "planar"])
def test_generated_networks(family):
    for seed in range(3):
        g = generate(GenSpec(100, family, seed, capacity_range=(1, 20))).graph
        s, t = 0, g.n - 1
        value, flow = find_max_flow(g, s, t)
        assert value == oracle_max_flow(g, s, t)[0]
        assert flow_violations(g, s, t, value, flow) == []


def test_threads_and_log():
    g = generate(GenSpec(80, "k33-free", 4, capacity_range=(1, 20))).graph
    runs = [run_max_flow(g, 0, 1, threads) for threads in (1, 3)]
    assert runs[0].value == runs[1].value
    assert runs[0].flow == runs[1].flow
    assert runs[0].log.dump() == runs[1].log.dump()
    docs = [json.loads(line) for line in runs[0].log.dump().splitlines()]
    assert docs[-1]["parent"] is None
    assert docs[-1]["cuts"]["1"] == runs[0].value
    assert all(len(d["terminals"]) <= 6 for d in docs)
