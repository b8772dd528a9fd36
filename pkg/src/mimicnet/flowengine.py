"""Maximum s-t flow via flow-mimicking replacement along heavy paths.

The tree path between a piece holding ``s`` and a piece holding ``t`` is
the root path.  Everything else hangs off it as a forest whose heavy paths
are processed by increasing rank.  A path is summarized bottom-up: every
node contributes its own edges and the networks already attached to it,
is collapsed onto its two sides, and the node summaries are combined in a
balanced binary tree.  The result, a network on the top side, is attached
to the parent node.  The root path ends with ``{s}`` and ``{t}`` as its
outer sides, so its summary is a single s-t edge whose capacity is the
flow value.  Expanding the recorded unions in reverse turns that value
into a flow on the input edges.
"""

from __future__ import annotations

import json
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .decompose import DecompositionTree, decompose
from .errors import MissingCapacities
from .flowmimic import FlowMimick, expand_flow, mimick_parts
from .graph import Graph, connected_components
from .heavypath import HeavyPathDecomposition, heavy_path_decomposition


@dataclass
class FlowReplacement:
    id: int
    rank: int
    path: tuple[int, ...]  # top first
    terminals: tuple[int, ...]
    network: FlowMimick
    parent_node: int | None


@dataclass
class FlowLog:
    records: list[FlowReplacement] = field(default_factory=list)
    iterations: int = 0

    def dump(self) -> str:
        """One JSON object per replacement, in processing order."""
        lines = []
        for r in self.records:
            g = r.network.graph
            doc = {
                "id": r.id,
                "rank": r.rank,
                "path": list(r.path),
                "terminals": list(r.terminals),
                "parent": r.parent_node,
                "vertices": g.n,
                "edges": [list(e) for e in g.edges],
                "capacities": list(g.capacities),
                "cuts": {str(k): v for k, v in sorted(r.network.external_cuts.items())},
            }
            lines.append(json.dumps(doc, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")


def _tree_path(adj: Sequence[Sequence[int]], a: int, b: int) -> list[int]:
    prev = {a: None}
    dq = deque([a])
    while dq:
        x = dq.popleft()
        if x == b:
            break
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                dq.append(y)
    out = [b]
    while out[-1] != a:
        out.append(prev[out[-1]])
    return out[::-1]


class FlowEngine:
    """Staged replacement for one component holding both ``s`` and ``t``."""

    def __init__(self, g: Graph, tree: DecompositionTree, s: int, t: int, threads: int = 1) -> None:
        self.g = g
        self.tree = tree
        self.s, self.t = s, t
        self.threads = max(1, threads)
        self.log = FlowLog()
        holding_s = min(x.id for x in tree.pieces if s in x.vertices)
        holding_t = min(x.id for x in tree.pieces if t in x.vertices)
        self.root_path = _tree_path(tree.adj, holding_s, holding_t)
        on_root = set(self.root_path)
        # orient the rest of the tree away from the root path
        n = len(tree.nodes)
        self.parent = [-1] * n
        self.kids: list[list[int]] = [[] for _ in range(n)]
        hanging_roots = []
        dq = deque(self.root_path)
        seen = set(self.root_path)
        while dq:
            x = dq.popleft()
            for y in sorted(tree.adj[x]):
                if y in seen:
                    continue
                seen.add(y)
                self.parent[y] = x
                if x in on_root:
                    hanging_roots.append(y)
                else:
                    self.kids[x].append(y)
                dq.append(y)
        self.hanging_roots = sorted(hanging_roots)
        weight = [1 if x.kind == "piece" else 0 for x in tree.nodes]
        self.hpd: HeavyPathDecomposition = heavy_path_decomposition(self.kids, self.hanging_roots, weight)
        self.attached: list[list[FlowMimick]] = [[] for _ in range(n)]

    def _side(self, a: int, b: int) -> tuple[int, ...]:
        return tuple(sorted(set(self.tree.nodes[a].vertices) & set(self.tree.nodes[b].vertices)))

    def _node_parts(self, x: int) -> list[tuple]:
        g = self.g
        eids = self.tree.edges_of(x)
        parts: list[tuple] = [("edges", eids, [g.edges[e] for e in eids], [g.capacities[e] for e in eids])]
        parts.extend(("net", m) for m in self.attached[x])
        return parts

    def summarize(self, nodes: Sequence[int], sides: Sequence[tuple[tuple[int, ...], tuple[int, ...]]]) -> FlowMimick:
        """Network of a path (listed top first) on its outer sides, combined in a balanced tree."""
        leaves = []
        for x, (lo, hi) in zip(nodes, sides):
            terms = tuple(dict.fromkeys((*hi, *lo)))
            leaves.append((mimick_parts(self._node_parts(x), terms), lo, hi))

        def build(i: int, j: int):
            if j - i == 1:
                return leaves[i]
            mid = (i + j + 1) // 2
            top, bottom = build(i, mid), build(mid, j)
            hi, lo = top[2], bottom[1]
            terms = tuple(dict.fromkeys((*hi, *lo)))
            return mimick_parts([("net", top[0]), ("net", bottom[0])], terms), lo, hi

        return build(0, len(leaves))[0]

    def replace_path(self, pid: int) -> FlowMimick:
        path = self.hpd.paths[pid]
        sides = []
        for i, x in enumerate(path):
            lo = self._side(x, path[i + 1]) if i + 1 < len(path) else ()
            up = path[i - 1] if i else self.parent[x]
            sides.append((lo, self._side(x, up)))
        return self.summarize(path, sides)

    def run(self) -> FlowMimick:
        ranks = self.hpd.ranks_in_order()
        pieces = sum(1 for x in self.tree.nodes if x.kind == "piece")
        # the root path is one extra stage above every hanging rank
        bound = pieces.bit_length() + 1
        if len(ranks) + 1 > bound:
            raise AssertionError(f"{len(ranks) + 1} rank stages exceed the bound {bound}")
        pool = ThreadPoolExecutor(self.threads) if self.threads > 1 else None
        try:
            for r in ranks:
                pids = self.hpd.paths_with_rank(r)
                if pool is None:
                    nets = [self.replace_path(p) for p in pids]
                else:
                    nets = list(pool.map(self.replace_path, pids))
                self.log.iterations += 1
                for pid, net in zip(pids, nets):
                    path = self.hpd.paths[pid]
                    par = self.parent[path[0]]
                    self.log.records.append(FlowReplacement(
                        len(self.log.records), r, tuple(path), net.terminals, net, par))
                    self.attached[par].append(net)
        finally:
            if pool is not None:
                pool.shutdown()
        rp = self.root_path
        sides = []
        for i, x in enumerate(rp):
            lo = self._side(x, rp[i - 1]) if i else (self.s,)
            hi = self._side(x, rp[i + 1]) if i + 1 < len(rp) else (self.t,)
            # listed top first: the t end plays the role of the top
            sides.append((lo, hi))
        final = self.summarize(rp[::-1], sides[::-1])
        self.log.iterations += 1
        top_rank = (max(ranks) + 1) if ranks else 0
        self.log.records.append(FlowReplacement(
            len(self.log.records), top_rank, tuple(rp), final.terminals, final, None))
        return final


@dataclass
class FlowRun:
    value: int
    flow: dict[int, int]
    log: FlowLog | None
    tree: DecompositionTree | None


def run_max_flow(g: Graph, s: int, t: int, threads: int = 1) -> FlowRun:
    """Max flow with the decomposition and replacement log kept for inspection."""
    if g.capacities is None:
        raise MissingCapacities("the network has no capacities")
    if s == t:
        raise ValueError("source and sink must differ")
    for v in (s, t):
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} is not in the graph")
    flow = {e: 0 for e in range(g.m)}
    comp = next(c for c in connected_components(g) if s in c)
    if t not in set(comp):
        return FlowRun(0, flow, None, None)
    tree = decompose(g, comp)
    eng = FlowEngine(g, tree, s, t, threads)
    final = eng.run()
    value = final.external_cuts[1]
    if value:
        expand_flow(final, {s: value, t: -value}, flow)
    return FlowRun(value, flow, eng.log, tree)


def find_max_flow(g: Graph, s: int, t: int, threads: int = 1) -> tuple[int, dict[int, int]]:
    """Maximum flow value from ``s`` to ``t`` and a flow achieving it.

    The flow maps every edge id to a signed amount, positive in the
    direction of the edge as stored.
    """
    run = run_max_flow(g, s, t, threads)
    return run.value, run.flow
