from __future__ import annotations

import json
import math
import random
from itertools import combinations

import pytest
from hypothesis import assume, given, strategies as st

from mimicnet.decompose import decompose
from mimicnet.errors import NotInFamily
from mimicnet.engine import (
    MatchingEngine,
    NoPerfectMatching,
    find_min_weight_pm,
    find_perfect_matching,
    node_sides,
    run_matching,
)
from mimicnet.generators import GenSpec, generate, k5, wagner_graph
from mimicnet.graph import Graph, connected_components, embedding_is_planar, is_perfect_matching
from mimicnet.oracle import oracle_min_weight_pm, oracle_perfect_matching

from helpers import random_graph

K4 = Graph(4, list(combinations(range(4), 2)))


def claw_on_ladder() -> Graph:
    """A ladder with a claw hanging off one corner: no perfect matching."""
    edges = [(i, i + 1) for i in range(0, 20, 2)] + [(i, i + 2) for i in range(18)]
    edges += [(0, 20), (20, 21), (20, 22), (19, 23)]
    return Graph(24, edges)


class TestSmall:
    def test_k4(self):
        m = find_perfect_matching(K4)
        assert m is not None and len(m.edges) == 2
        assert is_perfect_matching(K4, m.edges)

    def test_odd_graphs(self):
        assert find_perfect_matching(Graph(5, [(i, (i + 1) % 5) for i in range(5)])) is None
        assert find_perfect_matching(Graph(4, [(0, 1), (1, 2), (1, 3)])) is None

    def test_empty_graph(self):
        m = find_perfect_matching(Graph(0, []))
        assert m is not None and not m.edges

    def test_weighted_four_cycle(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [1, 5, 3, 2])
        w, m = find_min_weight_pm(g)
        assert w == 4 and m.sorted_edges() == [0, 2]

    def test_negative_weights(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [1, -5, 3, -2])
        assert find_min_weight_pm(g)[0] == -7

    def test_disconnected(self):
        g = Graph(6, [(0, 1), (2, 3), (3, 4), (4, 5)])
        assert find_perfect_matching(g).sorted_edges() == [0, 1, 3]
        assert find_perfect_matching(Graph(6, [(0, 1), (1, 2), (3, 4), (4, 5)])) is None

    def test_sporadic_pieces(self):
        assert len(find_perfect_matching(wagner_graph()).edges) == 4
        assert find_perfect_matching(k5()) is None


class TestSides:
    def test_clique_has_itself_on_both_sides(self):
        t = decompose(claw_on_ladder())
        parents = t.parents()
        for x in t.nodes:
            if x.kind == "clique":
                assert node_sides(t, [x.id], x.id, parents) == (x.vertices, x.vertices)

    def test_piece_sides(self):
        t = decompose(claw_on_ladder())
        parents = t.parents()
        root = t.root
        kid = t.children()[root][0]
        lo, hi = node_sides(t, [root, kid], root, parents)
        assert hi == () and lo == tuple(t.nodes[kid].vertices)
        leaf = next(x.id for x in t.nodes if x.kind == "piece" and not t.children()[x.id])
        lo, hi = node_sides(t, [leaf], leaf, parents)
        assert lo == () and hi == tuple(t.nodes[parents[leaf]].vertices)


def in_family(g: Graph) -> bool:
    try:
        for comp in connected_components(g):
            decompose(g, comp)
    except NotInFamily:
        return False
    return True


@given(st.integers(0, 10_000), st.integers(1, 7), st.floats(0.15, 0.6))
def test_decision_agrees_with_oracle(seed, half, p):
    g = random_graph(seed, 2 * half, p)
    assume(in_family(g))
    got = find_perfect_matching(g)
    want = oracle_perfect_matching(g)
    assert (got is None) == (want is None)
    if got is not None:
        assert is_perfect_matching(g, got.edges)


@given(st.integers(0, 10_000), st.integers(1, 7), st.floats(0.2, 0.6))
def test_weight_agrees_with_oracle(seed, half, p):
    g = random_graph(seed, 2 * half, p, weights=(-20, 20))
    assume(in_family(g))
    got = find_min_weight_pm(g)
    want = oracle_min_weight_pm(g)
    assert (got is None) == (want is None)
    if got is not None:
        assert got[0] == want[0] == got[1].weight(g)
        assert is_perfect_matching(g, got[1].edges)


@pytest.mark.parametrize("family", ["k33-free", "k5-free"])
def test_generated_instances_with_planted_matching(family):
    for seed in range(4):
        inst = generate(GenSpec(60, family, seed, plant_pm=True, weight_range=(-9, 9)))
        g = inst.graph
        m = find_perfect_matching(g)
        assert m is not None and is_perfect_matching(g, m.edges)
        w, wm = find_min_weight_pm(g)
        assert w <= sum(g.weight(e) for e in inst.planted)
        assert is_perfect_matching(g, wm.edges)


def test_thread_count_does_not_change_output():
    g = generate(GenSpec(80, "k33-free", 5, plant_pm=True, weight_range=(-9, 9))).graph
    runs = [run_matching(g, True, threads) for threads in (1, 2, 4)]
    dumps = {"".join(log.dump() for log in r.logs) for r in runs}
    assert len(dumps) == 1
    assert len({r.matching.sorted_edges().__repr__() for r in runs}) == 1


def test_witness_log_dump_is_json_lines():
    run = run_matching(generate(GenSpec(40, "k33-free", 2, plant_pm=True)).graph)
    text = run.logs[0].dump()
    docs = [json.loads(line) for line in text.splitlines()]
    assert docs and docs[-1]["terminals"] == [] and docs[-1]["pattern"] is None
    assert [d["id"] for d in docs] == list(range(len(docs)))
    for d in docs[:-1]:
        assert d["pattern"] and "network" in d


def test_stage_bound_and_matrix_size():
    for seed in range(6):
        g = generate(GenSpec(120, "k33-free", seed, plant_pm=True)).graph
        run = run_matching(g)
        assert run.matching is not None
        for log, tree in zip(run.logs, run.trees):
            assert log.iterations <= math.floor(math.log2(g.n)) + 1
            assert log.max_dim[0] <= 4 and log.max_dim[1] <= 4


def test_planar_hosts_stay_planar_after_gluing():
    g = generate(GenSpec(80, "planar", 3, plant_pm=True)).graph
    tree = decompose(g)
    eng = MatchingEngine(g, tree, False)
    eng.reverse(eng.run())
    merged = [r for r in eng.log.records if r.merged]
    assert merged
    for node in eng.nodes:
        if node.label == "planar":
            assert embedding_is_planar(node.host, node.host_rot)


def test_empty_pattern_aborts_early():
    g = claw_on_ladder()
    eng = MatchingEngine(g, decompose(g), False)
    with pytest.raises(NoPerfectMatching):
        eng.run()
    assert eng.log.iterations < len(eng.hpd.ranks_in_order())
    assert find_perfect_matching(g) is None
