"""Shared test utilities: random graphs and independent checkers."""

from __future__ import annotations

import random
from itertools import combinations

import networkx as nx

from mimicnet.graph import Graph


def random_graph(seed: int, n: int, p: float, weights=None, capacities=None) -> Graph:
    rng = random.Random(seed)
    edges = [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p]
    w = [rng.randint(*weights) for _ in edges] if weights else None
    c = [rng.randint(*capacities) for _ in edges] if capacities else None
    return Graph(n, edges, w, c)


def random_connected(seed: int, n: int, p: float, **kw) -> Graph:
    for k in range(1000):
        g = random_graph(seed * 1000 + k, n, p, **kw)
        if n <= 1 or nx.is_connected(g.to_networkx()):
            return g
    raise RuntimeError("no connected sample")


def flow_violations(g: Graph, s: int, t: int, value: int, flow: dict) -> list[str]:
    bad = []
    excess = [0] * g.n
    for e, (u, v) in enumerate(g.edges):
        f = flow.get(e, 0)
        if abs(f) > g.capacities[e]:
            bad.append(f"edge {e} carries {f} over capacity {g.capacities[e]}")
        excess[u] -= f
        excess[v] += f
    for v in range(g.n):
        want = value if v == t else -value if v == s else 0
        if excess[v] != want:
            bad.append(f"vertex {v} has excess {excess[v]}, expected {want}")
    return bad


# -- K3,3 minors -------------------------------------------------------------


def _contains_k33_subgraph(h: nx.Graph) -> bool:
    nodes = list(h)
    for six in combinations(nodes, 6):
        first = six[0]
        for rest in combinations(six[1:], 2):
            a = (first, *rest)
            b = [v for v in six if v not in a]
            if all(h.has_edge(x, y) for x in a for y in b):
                return True
    return False


def has_k33_minor_bruteforce(g: Graph | nx.Graph) -> bool:
    """Exhaustive minor search by deletions and contractions (small graphs only)."""
    h = g.to_networkx() if isinstance(g, Graph) else nx.Graph(g)
    seen: set = set()

    def reduce(x: nx.Graph) -> nx.Graph:
        # drop vertices of degree < 2 and smooth degree-2 vertices; both are minor operations
        x = nx.Graph(x)
        changed = True
        while changed:
            changed = False
            for v in list(x):
                d = x.degree(v)
                if d < 2:
                    x.remove_node(v)
                    changed = True
                elif d == 2:
                    a, b = list(x[v])
                    x.remove_node(v)
                    x.add_edge(a, b)
                    changed = True
        return x

    def rec(x: nx.Graph) -> bool:
        x = reduce(x)
        if x.number_of_nodes() < 6 or x.number_of_edges() < 9:
            return False
        exact = frozenset(frozenset(e) for e in x.edges())
        if exact in seen:
            return False
        seen.add(exact)
        if x.number_of_nodes() == 6:
            return _contains_k33_subgraph(x)
        for v in list(x):
            y = x.copy()
            y.remove_node(v)
            if rec(y):
                return True
        for u, v in list(x.edges()):
            if rec(nx.contracted_nodes(x, u, v, self_loops=False)):
                return True
        for u, v in list(x.edges()):
            y = x.copy()
            y.remove_edge(u, v)
            if rec(y):
                return True
        return False

    return rec(h)


def k33_minor_free_by_structure(g: Graph | nx.Graph) -> bool:
    """K3,3-minor-free test: every 3-connected part of every block is planar or K5.

    Splits blocks at 2-separators (adding the virtual edge) by brute force.
    """
    h = g.to_networkx() if isinstance(g, Graph) else nx.Graph(g)
    todo = [h.subgraph(b).copy() for b in nx.biconnected_components(h)]
    while todo:
        x = todo.pop()
        if x.number_of_nodes() <= 4:
            continue
        split = None
        for a, b in combinations(sorted(x), 2):
            rest = x.subgraph([v for v in x if v not in (a, b)])
            comps = list(nx.connected_components(rest))
            if len(comps) >= 2:
                split = (a, b, comps)
                break
        if split is None:
            n, m = x.number_of_nodes(), x.number_of_edges()
            if not (nx.check_planarity(x)[0] or (n == 5 and m == 10)):
                return False
            continue
        a, b, comps = split
        for c in comps:
            part = x.subgraph(set(c) | {a, b}).copy()
            part.add_edge(a, b)
            todo.append(part)
    return True


def minimal_separators_bruteforce(g: Graph) -> list[tuple[int, ...]]:
    """Every vertex set of size 1-3 with two full components, by trying them all."""
    h = g.to_networkx()
    out = []
    for r in (1, 2, 3):
        for S in combinations(range(g.n), r):
            rest = h.subgraph(v for v in range(g.n) if v not in S)
            full = 0
            for comp in nx.connected_components(rest):
                touched = {s for v in comp for s in h[v] if s in S}
                full += len(touched) == len(S)
            if full >= 2:
                out.append(S)
    return out
