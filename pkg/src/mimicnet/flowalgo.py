"""Dinic max-flow on small undirected/directed networks, plus feasible flows."""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Mapping, Sequence

INF = float("inf")


class FlowNetwork:
    """Residual network over vertices ``0..n-1``.

    Each call to :meth:`add` creates a pair of opposite arcs; an undirected
    edge of capacity ``c`` is ``add(u, v, c, c)``.  The flow on the pair is
    read back with :meth:`flow_on` (positive means tail to head).
    """

    def __init__(self, n: int) -> None:
        self.n = n
        self.head: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[float] = []
        self.flow: list[float] = []

    def add(self, u: int, v: int, cap_uv: float, cap_vu: float = 0) -> int:
        a = len(self.to)
        self.head[u].append(a)
        self.to.append(v)
        self.cap.append(cap_uv)
        self.flow.append(0)
        self.head[v].append(a + 1)
        self.to.append(u)
        self.cap.append(cap_vu)
        self.flow.append(0)
        return a // 2

    def flow_on(self, pair: int) -> float:
        return self.flow[2 * pair]

    def _levels(self, s: int) -> list[int]:
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        to, cap, flow, head = self.to, self.cap, self.flow, self.head
        while q:
            v = q.popleft()
            for a in head[v]:
                w = to[a]
                if level[w] < 0 and cap[a] - flow[a] > 0:
                    level[w] = level[v] + 1
                    q.append(w)
        return level

    def max_flow(self, s: int, t: int, limit: float = INF) -> float:
        to, cap, flow, head = self.to, self.cap, self.flow, self.head
        total = 0
        while total < limit:
            level = self._levels(s)
            if level[t] < 0:
                break
            it = [0] * self.n
            while total < limit:
                path: list[int] = []
                v = s
                pushed = 0
                while True:
                    if v == t:
                        pushed = min(limit - total, min(cap[a] - flow[a] for a in path))
                        for a in path:
                            flow[a] += pushed
                            flow[a ^ 1] -= pushed
                        break
                    lst = head[v]
                    advanced = False
                    while it[v] < len(lst):
                        a = lst[it[v]]
                        w = to[a]
                        if cap[a] - flow[a] > 0 and level[w] == level[v] + 1:
                            path.append(a)
                            v = w
                            advanced = True
                            break
                        it[v] += 1
                    if not advanced:
                        if v == s:
                            break
                        level[v] = -1
                        a = path.pop()
                        v = to[a ^ 1]
                        it[v] += 1
                if not pushed:
                    break
                total += pushed
        return total

    def source_side(self, s: int) -> set[int]:
        """Vertices reachable from ``s`` in the residual network (minimal source side)."""
        seen = {s}
        q = deque([s])
        while q:
            v = q.popleft()
            for a in self.head[v]:
                w = self.to[a]
                if w not in seen and self.cap[a] - self.flow[a] > 0:
                    seen.add(w)
                    q.append(w)
        return seen


def undirected_max_flow(
    n: int, edges: Sequence[tuple[int, int]], caps: Sequence[int], s: int, t: int
) -> tuple[int, list[int], set[int]]:
    net = FlowNetwork(n)
    for (u, v), c in zip(edges, caps):
        net.add(u, v, c, c)
    value = net.max_flow(s, t)
    return int(value), [int(net.flow_on(i)) for i in range(len(edges))], net.source_side(s)


def min_cut_side(
    n: int,
    edges: Sequence[tuple[int, int]],
    caps: Sequence[int],
    sources: Iterable[int],
    sinks: Iterable[int],
) -> tuple[int, set[int]]:
    """Min cut separating ``sources`` from ``sinks``; returns value and minimal source side."""
    net = FlowNetwork(n + 2)
    for (u, v), c in zip(edges, caps):
        net.add(u, v, c, c)
    src, snk = n, n + 1
    for v in sources:
        net.add(src, v, INF)
    for v in sinks:
        net.add(v, snk, INF)
    value = net.max_flow(src, snk)
    side = net.source_side(src)
    side.discard(src)
    return int(value), side


def feasible_flow(
    vertices: Sequence[Hashable],
    edges: Sequence[tuple[Hashable, Hashable, int]],
    demand: Mapping[Hashable, int],
) -> list[int] | None:
    """Flow on undirected capacitated ``edges`` meeting net out-flow ``demand``.

    ``demand[v] > 0`` means ``v`` emits that much flow; vertices not listed
    must conserve flow.  Returns signed flows per edge (tail to head as
    given) or ``None`` when infeasible.
    """
    index = {v: i for i, v in enumerate(vertices)}
    n = len(vertices)
    net = FlowNetwork(n + 2)
    for u, v, c in edges:
        net.add(index[u], index[v], c, c)
    src, snk = n, n + 1
    need = 0
    for v, d in sorted(demand.items(), key=lambda kv: index[kv[0]]):
        if d > 0:
            net.add(src, index[v], d)
            need += d
        elif d < 0:
            net.add(index[v], snk, -d)
    if sum(demand.values()) != 0:
        return None
    got = net.max_flow(src, snk)
    if got != need:
        return None
    return [int(net.flow_on(i)) for i in range(len(edges))]
