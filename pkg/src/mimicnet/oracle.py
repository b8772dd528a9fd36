"""Brute-force reference implementations.

Everything here is deliberately simple and independent of the engine: the
matching oracles enumerate matchings by branching on the lowest vertex
still undecided (memoised on the set of decided vertices), and the flow
oracle is a plain Edmonds-Karp augmenting-path loop.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .errors import MissingCapacities, TooLarge
from .graph import Graph, Matching
from .pattern import MatchingPattern

EXHAUSTIVE_LIMIT = 22


@dataclass(frozen=True)
class OracleResult:
    pattern: MatchingPattern
    best_weight: dict | None = None
    max_flow_value: int | None = None


def _check_size(g: Graph) -> None:
    if g.n > EXHAUSTIVE_LIMIT:
        raise TooLarge(f"{g.n} vertices exceeds the exhaustive bound {EXHAUSTIVE_LIMIT}")


def _bit_adjacency(g: Graph) -> list[list[tuple[int, int]]]:
    return [sorted(g.adj[v]) for v in range(g.n)]


def oracle_matching_pattern(g: Graph, T: Sequence[int]) -> MatchingPattern:
    """Covered terminal subsets over all matchings covering every nonterminal."""
    _check_size(g)
    tindex = {v: i for i, v in enumerate(T)}
    if len(tindex) != len(T):
        raise ValueError("terminals must be distinct")
    adj = _bit_adjacency(g)
    full = (1 << g.n) - 1
    memo: dict[int, frozenset] = {}

    def rec(done: int) -> frozenset:
        if done == full:
            return frozenset((0,))
        hit = memo.get(done)
        if hit is not None:
            return hit
        v = (~done & (done + 1)).bit_length() - 1
        out: set[int] = set()
        vbit = 1 << tindex[v] if v in tindex else 0
        if v in tindex:
            out |= rec(done | 1 << v)
        for w, _ in adj[v]:
            if done >> w & 1:
                continue
            add = vbit | (1 << tindex[w] if w in tindex else 0)
            for s in rec(done | 1 << v | 1 << w):
                out.add(s | add)
        res = frozenset(out)
        memo[done] = res
        return res

    return MatchingPattern.of(len(T), rec(0))


def oracle_perfect_matching(g: Graph) -> Matching | None:
    _check_size(g)
    if g.n % 2:
        return None
    adj = _bit_adjacency(g)
    full = (1 << g.n) - 1
    dead: set[int] = set()

    def rec(done: int) -> list[int] | None:
        if done == full:
            return []
        if done in dead:
            return None
        v = (~done & (done + 1)).bit_length() - 1
        for w, e in adj[v]:
            if done >> w & 1:
                continue
            rest = rec(done | 1 << v | 1 << w)
            if rest is not None:
                rest.append(e)
                return rest
        dead.add(done)
        return None

    found = rec(0)
    return None if found is None else Matching.from_edges(g, found)


def oracle_min_weight_pm(g: Graph) -> tuple[int, Matching] | None:
    _check_size(g)
    if g.n % 2:
        return None
    adj = _bit_adjacency(g)
    full = (1 << g.n) - 1
    memo: dict[int, tuple[int, int, int] | None] = {}

    def rec(done: int):
        # returns (weight, edge, next state) or None
        if done == full:
            return (0, -1, -1)
        if done in memo:
            return memo[done]
        v = (~done & (done + 1)).bit_length() - 1
        best = None
        for w, e in adj[v]:
            if done >> w & 1:
                continue
            nxt = done | 1 << v | 1 << w
            sub = rec(nxt)
            if sub is None:
                continue
            cand = sub[0] + g.weight(e)
            if best is None or cand < best[0]:
                best = (cand, e, nxt)
        memo[done] = best
        return best

    top = rec(0)
    if top is None:
        return None
    edges, state = [], 0
    while state != full:
        _, e, state = memo[state]
        edges.append(e)
    return top[0], Matching.from_edges(g, edges)


# -- flows ---------------------------------------------------------------


def _require_caps(g: Graph) -> None:
    if g.capacities is None:
        raise MissingCapacities("the network has no capacities")


def _edmonds_karp(
    n: int, edges: Sequence[tuple[int, int]], caps: Sequence[int], s: int, t: int
) -> tuple[int, list[int], set[int]]:
    """Undirected max flow; returns value, flow per edge (tail to head), source side."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for e, (u, v) in enumerate(edges):
        adj[u].append(e)
        adj[v].append(e)
    flow = [0] * len(edges)

    def residual(e: int, x: int) -> int:
        u, _ = edges[e]
        return caps[e] - flow[e] if x == u else caps[e] + flow[e]

    value = 0
    while True:
        pred: list[int | None] = [None] * n
        pred[s] = -1
        q = deque([s])
        while q and pred[t] is None:
            x = q.popleft()
            for e in adj[x]:
                u, v = edges[e]
                y = v if x == u else u
                if pred[y] is None and residual(e, x) > 0:
                    pred[y] = e
                    q.append(y)
        if pred[t] is None:
            break
        path, y = [], t
        while y != s:
            e = pred[y]
            u, v = edges[e]
            x = u if y == v else v
            path.append((e, x))
            y = x
        push = min(residual(e, x) for e, x in path)
        for e, x in path:
            if x == edges[e][0]:
                flow[e] += push
            else:
                flow[e] -= push
        value += push
    side = {v for v in range(n) if pred[v] is not None}
    return value, flow, side


def oracle_max_flow(g: Graph, s: int, t: int) -> tuple[int, dict[int, int]]:
    """Maximum s-t flow; the flow map gives the signed flow along each edge's stored direction."""
    _require_caps(g)
    if s == t:
        raise ValueError("source and sink coincide")
    value, flow, side = _edmonds_karp(g.n, g.edges, g.capacities, s, t)
    cut = sum(
        c for (u, v), c in zip(g.edges, g.capacities) if (u in side) != (v in side)
    )
    if cut != value:  # pragma: no cover - internal consistency check
        raise AssertionError("max-flow value differs from the saturated cut")
    return value, {e: f for e, f in enumerate(flow)}


def bipartition_masks(k: int) -> list[int]:
    """Masks of the side containing terminal 0, for every nontrivial bipartition."""
    return [m for m in range(1, (1 << k) - 1) if m & 1]


def oracle_external_flow(g: Graph, T: Sequence[int]) -> dict[int, int]:
    """Min-cut value of every nontrivial terminal bipartition, keyed by side mask."""
    _require_caps(g)
    k = len(T)
    big = sum(g.capacities) + 1
    out = {}
    for mask in bipartition_masks(k):
        src, snk = g.n, g.n + 1
        edges = list(g.edges)
        caps = list(g.capacities)
        for i, v in enumerate(T):
            edges.append((src, v) if mask >> i & 1 else (v, snk))
            caps.append(big)
        value, _, _ = _edmonds_karp(g.n + 2, edges, caps, src, snk)
        out[mask] = value
    return out
