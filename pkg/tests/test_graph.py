from __future__ import annotations

from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from mimicnet.errors import BadIdentification, FormatError, InvalidEmbedding, NotAClique
from mimicnet.generators import k5, random_planar, wagner_graph
from mimicnet.graph import (
    Graph,
    Matching,
    clique_sum,
    connected_components,
    drawing_face_count,
    embedding_is_planar,
    faces,
    format_edge_list,
    is_matching,
    is_perfect_matching,
    is_planar,
    parse_dimacs_flow,
    parse_edge_list,
    planar_embedding,
)

from helpers import random_graph

K4 = Graph(4, list(combinations(range(4), 2)))
K33 = Graph(6, [(a, b) for a in range(3) for b in range(3, 6)])
TRIANGLE = Graph(3, [(0, 1), (1, 2), (0, 2)])


def cube() -> Graph:
    g = nx.hypercube_graph(3)
    idx = {v: i for i, v in enumerate(sorted(g))}
    return Graph(8, sorted((idx[u], idx[v]) for u, v in g.edges()))


class TestConstruction:
    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            Graph(2, [(1, 1)])

    def test_endpoint_outside(self):
        with pytest.raises(ValueError):
            Graph(2, [(0, 2)])

    def test_negative_capacity(self):
        with pytest.raises(ValueError):
            Graph(2, [(0, 1)], capacities=[-1])

    def test_parallel_edges_keep_ids(self):
        g = Graph(2, [(0, 1), (0, 1)], weights=[3, 5])
        assert g.m == 2 and g.weight(1) == 5
        assert is_perfect_matching(g, [1])


class TestCliqueSum:
    def test_diamond(self):
        g = clique_sum(TRIANGLE, TRIANGLE, {0: 0, 1: 1})
        assert g.n == 4 and g.m == 5
        assert g.has_edge(0, 1)

    def test_two_k5_on_a_vertex(self):
        g = clique_sum(k5(), k5(), {0: 0})
        assert g.n == 9
        assert g.degree(0) == 8

    def test_triangle_dropped(self):
        g1, _ = random_planar(8, seed=1, keep=1.0)
        g2, _ = random_planar(7, seed=2, keep=1.0)
        t1 = next(t for t in combinations(range(g1.n), 3) if all(g1.has_edge(a, b) for a, b in combinations(t, 2)))
        t2 = next(t for t in combinations(range(g2.n), 3) if all(g2.has_edge(a, b) for a, b in combinations(t, 2)))
        ident = dict(zip(t1, t2))
        g = clique_sum(g1, g2, ident, drop_edges=list(combinations(t1, 2)))
        assert g.m == g1.m + g2.m - 6
        assert g.n == g1.n + g2.n - 3

    def test_not_a_clique(self):
        path = Graph(3, [(0, 1), (1, 2)])
        with pytest.raises(NotAClique):
            clique_sum(path, TRIANGLE, {0: 0, 2: 1})

    def test_bad_identification(self):
        with pytest.raises(BadIdentification):
            clique_sum(TRIANGLE, TRIANGLE, {0: 0, 1: 0})
        with pytest.raises(BadIdentification):
            clique_sum(TRIANGLE, TRIANGLE, {0: 7})
        with pytest.raises(BadIdentification):
            clique_sum(K4, K4, {0: 0, 1: 1, 2: 2, 3: 3})

    def test_drop_outside_clique(self):
        with pytest.raises(BadIdentification):
            clique_sum(TRIANGLE, TRIANGLE, {0: 0, 1: 1}, drop_edges=[(0, 2)])

    @given(st.integers(0, 10_000), st.integers(0, 3), st.data())
    def test_counts(self, seed, k, data):
        g1 = Graph(6, list(combinations(range(3), 2)) + [(2, 3), (3, 4), (4, 5)])
        g2 = random_graph(seed, 6, 0.5)
        g2 = Graph(6, sorted(set(g2.edges) | set(combinations(range(3), 2))))
        ident = {i: i for i in range(k)}
        pairs = list(combinations(range(k), 2))
        drops = data.draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
        g = clique_sum(g1, g2, ident, drops)
        assert g.n == g1.n + g2.n - k
        assert g.m == g1.m + g2.m - len(pairs) - len(drops)


class TestPlanarity:
    def test_k4(self):
        rot = planar_embedding(K4)
        assert rot is not None and len(faces(K4, rot)) == 4

    @pytest.mark.parametrize("g", [k5(), K33, wagner_graph()], ids=["K5", "K33", "wagner"])
    def test_nonplanar(self, g):
        assert not is_planar(g)
        assert planar_embedding(g) is None

    def test_triangle_faces(self):
        fs = faces(TRIANGLE, planar_embedding(TRIANGLE))
        assert sorted(len(f) for f in fs) == [3, 3]

    def test_cube_faces(self):
        g = cube()
        fs = faces(g, planar_embedding(g))
        assert sorted(len(f) for f in fs) == [4] * 6

    def test_bad_rotation_is_detected(self):
        rot = planar_embedding(K4)
        broken = [list(r) for r in rot]
        broken[0] = broken[0][:1]
        with pytest.raises(InvalidEmbedding):
            faces(K4, broken)

    @given(st.integers(0, 10_000), st.integers(3, 30))
    def test_random_planar_euler(self, seed, n):
        g, rot = random_planar(n, seed)
        assert embedding_is_planar(g, rot)
        comps = len(connected_components(g))
        assert g.n - g.m + drawing_face_count(g, rot) == 1 + comps

    @given(st.integers(0, 10_000), st.integers(1, 8), st.floats(0.1, 0.9))
    def test_agrees_with_edge_bound_and_kuratowski(self, seed, n, p):
        g = random_graph(seed, n, p)
        planar = is_planar(g)
        if n >= 3 and g.m > 3 * n - 6:
            assert not planar
        assert planar == _no_kuratowski_subgraph(g)
        rot = planar_embedding(g)
        if planar:
            comps = len(connected_components(g))
            assert g.n - g.m + drawing_face_count(g, rot) == 1 + comps


def _no_kuratowski_subgraph(g: Graph) -> bool:
    """Brute force: no subdivision of K5 or K3,3 after smoothing, on at most 8 vertices."""
    h = g.to_networkx()
    for r in range(5, g.n + 1):
        for keep in combinations(range(g.n), r):
            sub = h.subgraph(keep)
            for es in _edge_subsets(sub):
                x = nx.Graph(es)
                if _is_kuratowski_subdivision(x):
                    return False
    return True


def _edge_subsets(sub: nx.Graph):
    edges = list(sub.edges())
    # only subsets with every vertex of degree >= 2 matter; prune by edge count
    for m in range(9, len(edges) + 1):
        for es in combinations(edges, m):
            yield es


def _is_kuratowski_subdivision(x: nx.Graph) -> bool:
    if any(d < 2 for _, d in x.degree()) or not nx.is_connected(x):
        return False
    branch = [v for v, d in x.degree() if d > 2]
    if len(branch) == 5 and all(x.degree(v) == 4 for v in branch):
        return _smoothed(x, branch) == 10
    if len(branch) == 6 and all(x.degree(v) == 3 for v in branch):
        if _smoothed(x, branch) != 9:
            return False
        return not nx.check_planarity(x)[0]
    return False


def _smoothed(x: nx.Graph, branch) -> int:
    """Number of distinct branch-vertex pairs joined by internally disjoint paths of degree-2 vertices."""
    pairs = set()
    for b in branch:
        for nb in x[b]:
            prev, cur = b, nb
            while cur not in branch:
                nxt = next(w for w in x[cur] if w != prev)
                prev, cur = cur, nxt
            if cur == b:
                return -1
            pairs.add(frozenset((b, cur)))
    return len(pairs)


class TestComponents:
    def test_path_cut(self):
        g = Graph(3, [(0, 1), (1, 2)])
        assert sorted(map(sorted, connected_components(g, {1}))) == [[0], [2]]

    def test_k4(self):
        assert len(connected_components(K4)) == 1

    def test_two_triangles(self):
        g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        assert len(connected_components(g)) == 2


class TestMatchings:
    def test_predicates(self):
        assert is_matching(K4, [0, 5])
        assert not is_matching(K4, [0, 1])
        assert is_perfect_matching(K4, [0, 5])
        assert not is_perfect_matching(K4, [0])

    def test_from_edges(self):
        m = Matching.from_edges(K4, [0, 5])
        assert m.covered == frozenset(range(4))
        with pytest.raises(ValueError):
            Matching.from_edges(K4, [0, 1])


class TestFormats:
    @given(st.integers(0, 10_000), st.integers(1, 9), st.sampled_from(["plain", "weighted", "capacitated"]))
    def test_roundtrip(self, seed, n, kind):
        g = random_graph(seed, n, 0.4,
                         weights=(-9, 9) if kind == "weighted" else None,
                         capacities=(0, 9) if kind == "capacitated" else None)
        assert parse_edge_list(format_edge_list(g)) == g

    @pytest.mark.parametrize("text", [
        "e 0 1\n",
        "p 2 1\ne 0 0\n",
        "p 2 2\ne 0 1\n",
        "p 2 1 weighted\ne 0 1\n",
        "p 2 1 capacitated\ne 0 1 -3\n",
        "p 2 1 weighted\ne 0 1 2000000000\n",
        "p 2 1\nx 0 1\n",
        "p two 1\n",
    ])
    def test_rejects(self, text):
        with pytest.raises(FormatError):
            parse_edge_list(text)

    def test_dimacs(self):
        text = "c example\np max 3 2\nn 1 s\nn 3 t\na 1 2 4\na 2 3 5\n"
        g, s, t = parse_dimacs_flow(text)
        assert (g.n, s, t) == (3, 0, 2)
        assert g.edges == ((0, 1), (1, 2)) and g.capacities == (4, 5)
