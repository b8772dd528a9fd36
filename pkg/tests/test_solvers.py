from __future__ import annotations

import random
from itertools import combinations

import networkx as nx
from hypothesis import given, strategies as st

from mimicnet.graph import Graph
from mimicnet.oracle import oracle_min_weight_pm, oracle_perfect_matching
from mimicnet.solvers import TDSolver, max_matching, min_weight_perfect_matching, perfect_matching
from mimicnet.treewidth import treewidth_at_most

from helpers import random_graph


def local_edges(g: Graph):
    return [(u, v, g.weight(e), ("g", e)) for e, (u, v) in enumerate(g.edges)]


def test_c4_cover_all():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    found = perfect_matching(range(4), local_edges(g))
    assert found is not None and len(found) == 2


def test_k4_by_tree_decomposition():
    g = Graph(4, list(combinations(range(4), 2)))
    solver = TDSolver([tuple(range(4))], [-1], local_edges(g))
    value, edges = solver.solve(range(4), weighted=False)
    assert len(edges) == 2


@given(st.integers(0, 10_000), st.integers(1, 14))
def test_max_matching_size(seed, n):
    g = random_graph(seed, n, 0.3)
    adj = [sorted(g.neighbor_sets[v]) for v in range(n)]
    mate = max_matching(n, adj)
    for v, w in enumerate(mate):
        assert w == -1 or (mate[w] == v and g.has_edge(v, w))
    size = sum(1 for v, w in enumerate(mate) if w > v)
    assert size == len(nx.max_weight_matching(g.to_networkx(), maxcardinality=True))


@given(st.integers(0, 10_000), st.integers(2, 12))
def test_blossom_matches_oracle(seed, n):
    g = random_graph(seed, n, 0.35, weights=(-20, 20))
    edges = local_edges(g)
    exists = perfect_matching(range(n), edges) is not None
    ref = oracle_perfect_matching(g)
    assert exists == (ref is not None)
    best = min_weight_perfect_matching(range(n), edges)
    ref_w = oracle_min_weight_pm(g)
    assert (best is None) == (ref_w is None)
    if best is not None:
        assert best[0] == ref_w[0]
        assert sum(e[2] for e in best[1]) == best[0]


@given(st.integers(0, 10_000), st.integers(2, 12))
def test_tree_decomposition_solver_matches_oracle(seed, n):
    g = random_graph(seed, n, 0.3, weights=(-20, 20))
    td = treewidth_at_most(g, 8)
    if td is None:
        return
    solver = TDSolver(td.bags, td.parent, local_edges(g))
    rng = random.Random(seed)
    for _ in range(4):
        cover = sorted(rng.sample(range(n), rng.randrange(0, n + 1, 2)))
        inside = set(cover)
        keep = [e for e, (u, v) in enumerate(g.edges) if u in inside and v in inside]
        idx = {v: i for i, v in enumerate(cover)}
        h = Graph(len(cover), [(idx[g.edges[e][0]], idx[g.edges[e][1]]) for e in keep],
                  [g.weights[e] for e in keep])
        ref = oracle_min_weight_pm(h)
        got = solver.solve(cover, weighted=True)
        assert (got is None) == (ref is None)
        if got is not None:
            assert got[0] == ref[0]
            covered = sorted(x for e in got[1] for x in e[:2])
            assert covered == cover
        exists = solver.solve(cover, weighted=False)
        assert (exists is None) == (ref is None)
