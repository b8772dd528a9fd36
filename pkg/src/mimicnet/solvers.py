"""Matching solvers used on individual pieces.

* ``max_matching``: Edmonds' blossom algorithm (cardinality), started from
  an optional initial matching and a greedy pass.
* ``min_weight_perfect_matching``: networkx's weighted blossom on
  transformed weights.
* ``TDSolver``: dynamic programming over a tree decomposition, in both
  existence and (min, +) modes.

All three work on a small local edge-list representation: vertices are
arbitrary hashable ids, edges are ``(u, v, weight, key)`` tuples where
``key`` identifies the edge to the caller.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

import networkx as nx

INF = float("inf")

Edge = tuple  # (u, v, weight, key)


def max_matching(n: int, adj: Sequence[Sequence[int]], mate: list[int] | None = None) -> list[int]:
    """Maximum-cardinality matching of the graph ``0..n-1`` given by ``adj``.

    Returns ``mate`` with ``mate[v] = -1`` for exposed vertices.
    """
    mate = [-1] * n if mate is None else list(mate)
    for v in range(n):
        if mate[v] == -1:
            for w in adj[v]:
                if mate[w] == -1:
                    mate[v] = w
                    mate[w] = v
                    break

    parent = [-1] * n
    base = list(range(n))
    used = [False] * n

    def lca(a: int, b: int) -> int:
        seen = set()
        while True:
            a = base[a]
            seen.add(a)
            if mate[a] == -1:
                break
            a = parent[mate[a]]
        while True:
            b = base[b]
            if b in seen:
                return b
            b = parent[mate[b]]

    def mark_path(v: int, b: int, child: int, blossom: set) -> None:
        while base[v] != b:
            blossom.add(base[v])
            blossom.add(base[mate[v]])
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    def find_path(root: int, touched: list[int]) -> int:
        used[root] = True
        touched.append(root)
        queue = [root]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for to in adj[v]:
                if base[v] == base[to] or mate[v] == to:
                    continue
                if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                    cur = lca(v, to)
                    blossom: set[int] = set()
                    mark_path(v, cur, to, blossom)
                    mark_path(to, cur, v, blossom)
                    # every vertex whose base can change is already in the tree
                    for i in touched[:]:
                        if base[i] in blossom:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    touched.append(to)
                    if mate[to] == -1:
                        return to
                    m = mate[to]
                    used[m] = True
                    touched.append(m)
                    queue.append(m)
        return -1

    for root in range(n):
        if mate[root] != -1:
            continue
        touched: list[int] = []
        v = find_path(root, touched)
        while v != -1:
            pv = parent[v]
            ppv = mate[pv]
            mate[v] = pv
            mate[pv] = v
            v = ppv
        for i in touched:
            used[i] = False
            base[i] = i
            parent[i] = -1
    return mate


def _local(vertices: Iterable[Hashable], edges: Iterable[Edge]):
    vs = sorted(vertices)
    index = {v: i for i, v in enumerate(vs)}
    local = []
    for e in edges:
        u, v = e[0], e[1]
        if u in index and v in index and u != v:
            local.append((index[u], index[v], e))
    return vs, index, local


def perfect_matching(vertices: Iterable[Hashable], edges: Iterable[Edge]) -> list[Edge] | None:
    """Some perfect matching of the graph induced on ``vertices``, or ``None``."""
    vs, index, local = _local(vertices, edges)
    n = len(vs)
    if n % 2:
        return None
    adj: list[list[int]] = [[] for _ in range(n)]
    pick: dict[tuple[int, int], Edge] = {}
    for a, b, e in local:
        key = (min(a, b), max(a, b))
        if key not in pick:
            pick[key] = e
            adj[a].append(b)
            adj[b].append(a)
    mate = max_matching(n, adj)
    if any(m == -1 for m in mate):
        return None
    return [pick[(a, mate[a])] for a in range(n) if a < mate[a]]


def min_weight_perfect_matching(
    vertices: Iterable[Hashable], edges: Iterable[Edge]
) -> tuple[int, list[Edge]] | None:
    """Minimum-weight perfect matching of the induced graph, or ``None``."""
    vs, index, local = _local(vertices, edges)
    n = len(vs)
    if n % 2:
        return None
    if n == 0:
        return 0, []
    best: dict[tuple[int, int], Edge] = {}
    for a, b, e in local:
        key = (min(a, b), max(a, b))
        if key not in best or (e[2], _edge_order(e)) < (best[key][2], _edge_order(best[key])):
            best[key] = e
    if not best:
        return None
    top = max(e[2] for e in best.values())
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for (a, b), e in sorted(best.items()):
        g.add_edge(a, b, weight=top + 1 - e[2])
    mate = nx.max_weight_matching(g, maxcardinality=True)
    if 2 * len(mate) != n:
        return None
    chosen = [best[(min(a, b), max(a, b))] for a, b in mate]
    chosen.sort(key=_edge_order)
    return sum(e[2] for e in chosen), chosen


def _edge_order(e: Edge):
    return repr(e[3])


# -- tree-decomposition dynamic programming ------------------------------


class TDSolver:
    """Matching DP over a fixed tree decomposition of a small graph.

    ``bags`` is a list of vertex collections, ``parent[i]`` the parent bag
    index (``-1`` for the root).  Each call restricts the decomposition to
    the required cover set, so one solver answers many cover queries.
    """

    def __init__(self, bags: Sequence[Iterable[Hashable]], parent: Sequence[int], edges: Sequence[Edge]):
        self.bags = [sorted(b) for b in bags]
        self.parent = list(parent)
        self.edges = list(edges)
        nb = len(self.bags)
        self.children: list[list[int]] = [[] for _ in range(nb)]
        roots = []
        for i, p in enumerate(self.parent):
            if p == -1:
                roots.append(i)
            else:
                self.children[p].append(i)
        if len(roots) != 1:
            raise ValueError("tree decomposition must have exactly one root")
        self.root = roots[0]
        order, stack = [], [self.root]
        depth = [0] * nb
        while stack:
            t = stack.pop()
            order.append(t)
            for c in self.children[t]:
                depth[c] = depth[t] + 1
                stack.append(c)
        self.preorder = order
        self.depth = depth
        top: dict[Hashable, int] = {}
        for t in order:
            for v in self.bags[t]:
                if v not in top:
                    top[v] = t
        self.top = top
        self.edge_home: list[int] = []
        for e in self.edges:
            a, b = top[e[0]], top[e[1]]
            home = a if depth[a] >= depth[b] else b
            if e[0] not in self.bags[home] or e[1] not in self.bags[home]:
                raise ValueError("edge not contained in any bag")
            self.edge_home.append(home)

    def solve(self, cover: Iterable[Hashable], weighted: bool) -> tuple[int, list[Edge]] | None:
        cover = set(cover)
        if len(cover) % 2:
            return None
        for v in cover:
            if v not in self.top:
                return None  # isolated vertex that must be covered
        at: list[list[int]] = [[] for _ in self.bags]
        for i, e in enumerate(self.edges):
            if e[0] in cover and e[1] in cover:
                at[self.edge_home[i]].append(i)
        bags = [[v for v in b if v in cover] for b in self.bags]
        bit = [{v: 1 << j for j, v in enumerate(b)} for b in bags]
        final: list[dict[int, int] | None] = [None] * len(bags)
        history: list[list] = [[] for _ in bags]
        for t in reversed(self.preorder):
            table = {0: 0}
            steps = history[t]
            for c in self.children[t]:
                ctab = final[c]
                must = 0
                for v in bags[c]:
                    if v not in bit[t]:
                        must |= bit[c][v]
                proj: dict[int, tuple[int, int]] = {}
                for cm, val in ctab.items():
                    if cm & must != must:
                        continue
                    pm = 0
                    for v in bags[c]:
                        if cm & bit[c][v] and v in bit[t]:
                            pm |= bit[t][v]
                    old = proj.get(pm)
                    if old is None or val < old[0] or (val == old[0] and cm < old[1]):
                        proj[pm] = (val, cm)
                new: dict[int, int] = {}
                back: dict[int, tuple[int, int]] = {}
                for m1, v1 in table.items():
                    for pm, (v2, cm) in proj.items():
                        if m1 & pm:
                            continue
                        m = m1 | pm
                        val = v1 + v2
                        if m not in new or val < new[m]:
                            new[m] = val
                            back[m] = (m1, cm)
                table = new
                steps.append(("child", c, back))
                if not table:
                    return None
            for i in at[t]:
                e = self.edges[i]
                eb = bit[t][e[0]] | bit[t][e[1]]
                w = e[2] if weighted else 0
                new = dict(table)
                used: dict[int, int] = {}
                for m, val in table.items():
                    if m & eb:
                        continue
                    nm = m | eb
                    cand = val + w
                    if nm not in new or cand < new[nm]:
                        new[nm] = cand
                        used[nm] = m
                table = new
                steps.append(("edge", i, used))
            final[t] = table
        full = (1 << len(bags[self.root])) - 1
        if full not in final[self.root]:
            return None
        value = final[self.root][full]
        chosen: list[Edge] = []
        todo = [(self.root, full)]
        while todo:
            t, m = todo.pop()
            for step in reversed(history[t]):
                kind, ref, back = step
                if kind == "edge":
                    if m in back:
                        chosen.append(self.edges[ref])
                        m = back[m]
                else:
                    m, cm = back[m]
                    todo.append((ref, cm))
            if m != 0:  # pragma: no cover - DP bookkeeping guard
                raise AssertionError("tree-decomposition DP backtrack failed")
        return value, chosen
