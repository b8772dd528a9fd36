"""Tree decompositions from elimination orderings.

``treewidth_at_most`` first tries the min-fill and min-degree heuristics;
if neither reaches the bound it computes a minor-min-width lower bound and,
for small graphs, runs an exact search over elimination orderings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .graph import Graph

EXACT_LIMIT = 16


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[tuple[int, ...], ...]
    parent: tuple[int, ...]  # parent bag index, -1 for the root

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    @property
    def root(self) -> int:
        return self.parent.index(-1)

    def is_valid_for(self, adj: Mapping[Hashable, Iterable[Hashable]]) -> bool:
        """Edges covered, and the bags holding each vertex form a subtree."""
        if list(self.parent).count(-1) != 1:
            return False
        bag_sets = [set(b) for b in self.bags]
        for v, nbrs in adj.items():
            holders = [i for i, b in enumerate(bag_sets) if v in b]
            if not holders:
                return False
            # connected: exactly one holder whose parent does not hold v
            tops = [i for i in holders if self.parent[i] == -1 or v not in bag_sets[self.parent[i]]]
            if len(tops) != 1:
                return False
            for w in nbrs:
                if not any(v in b and w in b for b in bag_sets):
                    return False
        return True


def adjacency_of(g: Graph) -> dict[int, set[int]]:
    return {v: set(g.neighbor_sets[v]) for v in range(g.n)}


def _copy(adj: Mapping) -> dict:
    return {v: set(ns) for v, ns in adj.items()}


def greedy_order(adj: Mapping, rule: str = "min_fill") -> list:
    work = _copy(adj)
    order = []
    while work:
        best = None
        for v in sorted(work):
            ns = work[v]
            if rule == "min_degree":
                score = len(ns)
            else:
                nl = sorted(ns)
                score = sum(1 for i, a in enumerate(nl) for b in nl[i + 1 :] if b not in work[a])
            if best is None or score < best[0]:
                best = (score, v)
                if score == 0:
                    break
        v = best[1]
        _eliminate(work, v)
        order.append(v)
    return order


def _eliminate(work: dict, v) -> None:
    ns = work.pop(v)
    for a in ns:
        work[a].discard(v)
        work[a] |= ns - {a}


def decomposition_from_order(adj: Mapping, order: list) -> TreeDecomposition:
    if not adj:
        return TreeDecomposition(((),), (-1,))
    work = _copy(adj)
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    later: list[set] = []
    for v in order:
        ns = set(work[v])
        bags.append(tuple(sorted([v, *ns])))
        later.append(ns)
        _eliminate(work, v)
    parent = []
    for i, v in enumerate(order):
        if later[i]:
            nxt = min(later[i], key=lambda w: pos[w])
            parent.append(pos[nxt])
        else:
            parent.append(-1)
    roots = [i for i, p in enumerate(parent) if p == -1]
    for r in roots[:-1]:
        parent[r] = roots[-1]
    return TreeDecomposition(tuple(bags), tuple(parent))


def elimination_width(adj: Mapping, order: list) -> int:
    work = _copy(adj)
    width = -1 if not adj else 0
    for v in order:
        width = max(width, len(work[v]))
        _eliminate(work, v)
    return width


def minor_min_width(adj: Mapping) -> int:
    """Lower bound: repeatedly contract a min-degree vertex into its min-degree neighbour."""
    work = _copy(adj)
    lb = 0
    while len(work) > 1:
        v = min(work, key=lambda x: (len(work[x]), x))
        lb = max(lb, len(work[v]))
        ns = work[v]
        if not ns:
            del work[v]
            continue
        u = min(ns, key=lambda x: (len(work[x]), x))
        for w in ns:
            work[w].discard(v)
            if w != u:
                work[w].add(u)
                work[u].add(w)
        del work[v]
    return lb


def _exact_order(adj: Mapping, k: int) -> list | None:
    """An elimination order of width <= k, by memoised search over eliminated sets."""
    verts = sorted(adj)
    idx = {v: i for i, v in enumerate(verts)}
    nbr = [0] * len(verts)
    for v, ns in adj.items():
        for w in ns:
            nbr[idx[v]] |= 1 << idx[w]
    n = len(verts)
    full = (1 << n) - 1
    dead: set[int] = set()

    def q_size(elim: int, i: int) -> int:
        # vertices outside elim reachable from i through elim
        seen = 1 << i
        frontier = nbr[i]
        reach = 0
        while frontier:
            b = frontier & -frontier
            frontier ^= b
            if seen & b:
                continue
            seen |= b
            j = b.bit_length() - 1
            if elim & b:
                frontier |= nbr[j] & ~seen
            else:
                reach |= b
        return bin(reach).count("1")

    def rec(elim: int) -> list | None:
        if elim == full:
            return []
        if elim in dead:
            return None
        if n - bin(elim).count("1") <= k + 1:
            return [i for i in range(n) if not elim >> i & 1]
        for i in range(n):
            if elim >> i & 1:
                continue
            if q_size(elim, i) <= k:
                rest = rec(elim | 1 << i)
                if rest is not None:
                    return [i, *rest]
        dead.add(elim)
        return None

    found = rec(0)
    return None if found is None else [verts[i] for i in found]


def treewidth_at_most_adj(adj: Mapping, k: int) -> TreeDecomposition | None:
    if len(adj) <= k + 1:
        order = sorted(adj)
        return decomposition_from_order(adj, order)
    for rule in ("min_fill", "min_degree"):
        order = greedy_order(adj, rule)
        if elimination_width(adj, order) <= k:
            return decomposition_from_order(adj, order)
    if minor_min_width(adj) > k:
        return None
    if len(adj) > EXACT_LIMIT:
        return None
    order = _exact_order(adj, k)
    return None if order is None else decomposition_from_order(adj, order)


def treewidth_at_most(g: Graph | Mapping, k: int) -> TreeDecomposition | None:
    """A tree decomposition of width at most ``k``, or ``None``."""
    adj = adjacency_of(g) if isinstance(g, Graph) else g
    return treewidth_at_most_adj(adj, k)


def treewidth(g: Graph | Mapping) -> int:
    """Exact treewidth of a small graph."""
    adj = adjacency_of(g) if isinstance(g, Graph) else g
    k = 0
    while treewidth_at_most_adj(adj, k) is None:
        k += 1
    return k
