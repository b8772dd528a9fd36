"""Perfect matchings and minimum-weight perfect matchings via path replacement.

Outline for one connected component:

1. decompose the graph into pieces glued along cliques of size <= 3;
2. split the decomposition tree into heavy paths and process them by
   increasing rank; within a rank every path is independent;
3. for a path, multiply the transfer matrices of its nodes (leaf end
   first); the resulting row vector is the matching pattern of everything
   hanging below the path's top side, which is then replaced by a small
   catalog network attached to the parent node (glued into a face when the
   parent is a planar piece);
4. the last path contains the root and decides the answer; the matching
   itself is rebuilt by walking the witness log back down.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .decompose import DecompositionTree, decompose
from .errors import CorruptLog, NotAFace
from .graph import Graph, Matching, connected_components
from .heavypath import HeavyPathDecomposition, heavy_path_decomposition
from .mimic_matching import MimickingNetwork, assign_weights, glue_into_face, network_for
from .pattern import MatchingPattern
from .solvers import TDSolver, min_weight_perfect_matching, perfect_matching
from .transfer import (
    BOOLEAN,
    INF,
    TROPICAL,
    TransferMatrix,
    cover_set,
    semiring_product,
    trace,
    transfer_matrix,
)

MAX_MATRIX_DIM = 4


class NoPerfectMatching(Exception):
    """Internal signal: some subtree has an empty matching pattern."""


# ---------------------------------------------------------------------------
# per-node subgraphs
# ---------------------------------------------------------------------------


@dataclass
class NodeGraph:
    """Associated subgraph of a tree node: real edges plus attached networks.

    Edges are ``(u, v, weight, key)`` with ``key = ("g", eid)`` for input
    edges and ``("m", record, j)`` for edge ``j`` of a replacement network.
    """

    node: int
    label: str  # "planar", "bounded-treewidth" or "clique"
    vertices: set[int]
    edges: list[tuple]
    bags: list[tuple[int, ...]] = field(default_factory=list)
    parent: list[int] = field(default_factory=list)
    host: Graph | None = None  # torso with glued networks, planar pieces only
    host_rot: list | None = None
    host_id: dict[int, int] = field(default_factory=dict)
    attached: list[int] = field(default_factory=list)
    _td: TDSolver | None = field(default=None, repr=False)

    def solve(self, cover: Sequence[int], weighted: bool):
        """Best matching covering exactly ``cover``: ``(value, edges)`` or ``None``."""
        return piece_solver(self, cover, weighted)


def piece_solver(node: NodeGraph, cover: Sequence[int], weighted: bool):
    """Matching of ``node`` covering exactly ``cover`` (min weight when ``weighted``).

    Planar pieces go to a general blossom solver; bounded-treewidth pieces
    and clique nodes to dynamic programming over their tree decomposition.
    """
    if len(cover) % 2:
        return None
    if node.label == "planar":
        if weighted:
            return min_weight_perfect_matching(cover, node.edges)
        found = perfect_matching(cover, node.edges)
        return None if found is None else (0, found)
    if node._td is None:
        node._td = TDSolver(node.bags, node.parent, node.edges)
    return node._td.solve(cover, weighted)


def _node_graphs(g: Graph, tree: DecompositionTree, weighted: bool) -> list[NodeGraph]:
    out = []
    for x in tree.nodes:
        edges = [(g.edges[e][0], g.edges[e][1], g.weight(e) if weighted else 0, ("g", e))
                 for e in tree.edges_of(x.id)]
        if x.kind == "clique":
            ng = NodeGraph(x.id, "clique", set(x.vertices), edges, [tuple(x.vertices)], [-1])
        elif x.label == "planar":
            ng = NodeGraph(x.id, "planar", set(x.vertices), edges)
            ng.host = x.torso
            ng.host_rot = [list(r) for r in x.embedding]
            ng.host_id = {v: i for i, v in enumerate(x.vertices)}
        else:
            ng = NodeGraph(x.id, "bounded-treewidth", set(x.vertices), edges,
                           list(x.td.bags), list(x.td.parent))
        out.append(ng)
    return out


# ---------------------------------------------------------------------------
# witness log
# ---------------------------------------------------------------------------


@dataclass
class Replacement:
    id: int
    rank: int
    path: tuple[int, ...]  # tree nodes, top first
    terminals: tuple[int, ...]  # top side, sorted; empty for the root path
    product: TransferMatrix
    pattern: MatchingPattern | None
    network: MimickingNetwork | None
    vertex_map: tuple[int, ...] = ()  # network vertex -> graph-level vertex id
    parent_node: int | None = None
    merged: bool = False  # glued into a planar parent's face
    cells: dict = field(default_factory=dict)


@dataclass
class WitnessLog:
    records: list[Replacement] = field(default_factory=list)
    iterations: int = 0
    max_dim: tuple[int, int] = (0, 0)

    def dump(self) -> str:
        """Canonical text form: one JSON object per record."""
        lines = []
        for r in self.records:
            prod = r.product
            doc = {
                "id": r.id,
                "rank": r.rank,
                "path": list(r.path),
                "terminals": list(r.terminals),
                "pattern": None if r.pattern is None else list(r.pattern.subsets),
                "row": [_fmt(v) for v in prod.entries[0]] if prod.rows else [],
                "witness": _witness_summary(prod),
                "parent": r.parent_node,
                "merged": r.merged,
            }
            if r.network is not None:
                doc["network"] = {
                    "vertices": list(r.vertex_map),
                    "edges": [list(e) for e in r.network.graph.edges],
                    "weights": None if r.network.graph.weights is None else list(r.network.graph.weights),
                }
            lines.append(json.dumps(doc, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")


def _fmt(v):
    if v is True or v is False:
        return int(v)
    return "inf" if v == INF else v


def _witness_summary(m: TransferMatrix) -> list:
    if m.left is None:
        return [m.leaf]
    return [m.witness, _witness_summary(m.left), _witness_summary(m.right)]


# ---------------------------------------------------------------------------
# sides and paths
# ---------------------------------------------------------------------------


def node_sides(tree: DecompositionTree, path: Sequence[int], node: int,
               parents: Sequence[int] | None = None) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Leafward and rootward sides of ``node`` on ``path`` (listed top first).

    A clique node has its own vertex set on both sides.  A piece has the
    next clique down the path (empty at the bottom) and its parent clique
    (empty at the root).
    """
    x = tree.nodes[node]
    if x.kind == "clique":
        return tuple(x.vertices), tuple(x.vertices)
    i = list(path).index(node)
    lo = tuple(tree.nodes[path[i + 1]].vertices) if i + 1 < len(path) else ()
    par = (parents if parents is not None else tree.parents())[node]
    hi = tuple(tree.nodes[par].vertices) if par >= 0 else ()
    return lo, hi


@dataclass
class _PathOutcome:
    pid: int
    product: TransferMatrix
    row: dict
    pattern: MatchingPattern | None
    network: MimickingNetwork | None
    max_dim: tuple[int, int]


class MatchingEngine:
    """Runs the staged replacement on one decomposition tree."""

    def __init__(self, g: Graph, tree: DecompositionTree, weighted: bool, threads: int = 1,
                 first_fresh: int | None = None) -> None:
        self.g = g
        self.tree = tree
        self.weighted = weighted
        self.semiring = TROPICAL if weighted else BOOLEAN
        self.threads = max(1, threads)
        self.kids = tree.children()
        self.parents = tree.parents()
        self.nodes = _node_graphs(g, tree, weighted)
        weight = [1 if x.kind == "piece" else 0 for x in tree.nodes]
        self.hpd: HeavyPathDecomposition = heavy_path_decomposition(self.kids, tree.root, weight)
        self.log = WitnessLog()
        self.fresh = g.n if first_fresh is None else first_fresh
        self.record_of_path: dict[int, int] = {}
        self.networks: dict[int, tuple[MimickingNetwork, tuple[int, ...]]] = {}

    # -- one path -----------------------------------------------------------

    def replace_path(self, pid: int) -> _PathOutcome:
        """Multiply the path's matrices and turn the row vector into a network."""
        path = self.hpd.paths[pid]
        sides = [node_sides(self.tree, path, x, self.parents) for x in path]
        # leaf end first
        order = list(range(len(path)))[::-1]
        below = 0  # vertices strictly below the current leafward side
        mats = []
        dim = (0, 0)
        for i in order:
            node = self.nodes[path[i]]
            lo, hi = sides[i]
            interior = sorted(node.vertices - set(lo) - set(hi))
            # vertices of this node outside hi appear nowhere further up
            own = len(node.vertices - set(hi))
            row_par = below % 2
            col_par = (below + own) % 2
            m = transfer_matrix(
                lambda cover, node=node: self._entry(node, cover),
                interior, lo, hi, self.semiring, row_par, col_par,
            )
            if m.shape[0] > MAX_MATRIX_DIM or m.shape[1] > MAX_MATRIX_DIM:
                raise AssertionError(f"transfer matrix of shape {m.shape} exceeds 4x4")
            dim = max(dim, m.shape)
            mats.append(m)
            below += own
        prod = semiring_product(mats, self.semiring)
        row = prod.row_vector()
        top_hi = sides[0][1]
        if not top_hi:
            return _PathOutcome(pid, prod, row, None, None, dim)
        k = len(top_hi)
        if self.weighted:
            masks = [c for c, v in row.items() if v != INF]
        else:
            masks = [c for c, v in row.items() if v]
        pattern = MatchingPattern.of(k, masks)
        if pattern.is_empty:
            raise NoPerfectMatching(f"subtree below path {pid} cannot be matched")
        net = network_for(pattern)
        if self.weighted:
            anchor = min(masks, key=lambda c: (row[c], c))
            net = assign_weights(net, {c: row[c] - row[anchor] for c in masks})
        return _PathOutcome(pid, prod, row, pattern, net, dim)

    def _entry(self, node: NodeGraph, cover: list[int]):
        res = node.solve(cover, self.weighted)
        if self.weighted:
            return INF if res is None else res[0]
        return res is not None

    # -- attaching results ----------------------------------------------------

    def _attach(self, out: _PathOutcome, rank: int) -> Replacement:
        path = self.hpd.paths[out.pid]
        top = path[0]
        rid = len(self.log.records)
        rec = Replacement(rid, rank, tuple(path), (), out.product, out.pattern, out.network)
        self.record_of_path[out.pid] = rid
        self.log.records.append(rec)
        if out.network is None:
            return rec
        lo, hi = node_sides(self.tree, path, top, self.parents)
        rec.terminals = tuple(hi)
        net = out.network
        vmap = [0] * net.graph.n
        for i, t in enumerate(net.terminals):
            vmap[t] = hi[i]
        fresh = []
        for v in net.nonterminals():
            vmap[v] = self.fresh
            fresh.append(self.fresh)
            self.fresh += 1
        rec.vertex_map = tuple(vmap)
        parent = self.parents[top]
        rec.parent_node = parent
        host = self.nodes[parent]
        host.vertices.update(fresh)
        host.attached.append(rid)
        for j, (a, b) in enumerate(net.graph.edges):
            w = net.graph.weight(j) if self.weighted else 0
            host.edges.append((vmap[a], vmap[b], w, ("m", rid, j)))
        if host.label == "planar":
            merge_shallow_clique(host, net, hi, fresh)
            rec.merged = True
        else:
            bag = tuple(sorted(set(hi) | set(fresh)))
            anchor = next(
                (i for i, b in enumerate(host.bags) if set(hi) <= set(b)), None
            )
            if anchor is None:  # pragma: no cover - cliques always sit in a bag
                raise AssertionError("attachment clique not contained in any bag")
            host.bags.append(bag)
            host.parent.append(anchor)
        self.networks[rid] = (net, tuple(vmap))
        return rec

    # -- driver ---------------------------------------------------------------

    def run(self) -> Replacement:
        ranks = self.hpd.ranks_in_order()
        pieces = sum(1 for x in self.tree.nodes if x.kind == "piece")
        bound = pieces.bit_length()  # floor(log2 pieces) + 1
        if len(ranks) > bound:
            raise AssertionError(f"{len(ranks)} rank stages exceed the bound {bound}")
        final = None
        pool = ThreadPoolExecutor(self.threads) if self.threads > 1 else None
        try:
            for r in ranks:
                pids = self.hpd.paths_with_rank(r)
                if pool is None:
                    outs = [self.replace_path(p) for p in pids]
                else:
                    outs = list(pool.map(self.replace_path, pids))
                self.log.iterations += 1
                # barrier: results are applied in path order
                for out in outs:
                    self.log.max_dim = max(self.log.max_dim, out.max_dim)
                    rec = self._attach(out, r)
                    if out.network is None:
                        final = rec
        finally:
            if pool is not None:
                pool.shutdown()
        if final is None:  # pragma: no cover
            raise AssertionError("root path was never processed")
        return final

    # -- reversal ---------------------------------------------------------------

    def reverse(self, final: Replacement) -> list[int]:
        """Input-graph edge ids of a perfect matching, by expanding the log."""
        row = final.product.row_vector()
        value = row[0]
        if (self.weighted and value == INF) or (not self.weighted and not value):
            raise NoPerfectMatching("root row vector is empty")
        chosen: list[int] = []
        todo = [(final.id, 0)]
        while todo:
            rid, col_mask = todo.pop()
            rec = self.log.records[rid]
            prod = rec.product
            if col_mask not in prod.cols:
                raise CorruptLog(f"record {rid} has no column {col_mask}")
            ci = prod.cols.index(col_mask)
            if self.weighted:
                ok = prod.entries[0][ci] != INF
            else:
                ok = bool(prod.entries[0][ci])
            if not ok:
                raise CorruptLog(f"record {rid} cannot cover terminal subset {col_mask}")
            cells = trace(prod, 0, ci)
            rec.cells = dict(cells)
            path = rec.path
            sides = [node_sides(self.tree, path, x, self.parents) for x in path]
            n = len(path)
            for leaf_pos, (ri, cj) in cells.items():
                i = n - 1 - leaf_pos
                node = self.nodes[path[i]]
                lo, hi = sides[i]
                factor = _factor(prod, leaf_pos)
                rmask, cmask = factor.rows[ri], factor.cols[cj]
                interior = sorted(node.vertices - set(lo) - set(hi))
                cover = cover_set(interior, lo, hi, rmask, cmask)
                res = node.solve(cover, self.weighted)
                if res is None:
                    raise CorruptLog(f"node {node.node} cannot realize its witnessed entry")
                by_net: dict[int, list[int]] = {}
                for e in res[1]:
                    key = e[3]
                    if key[0] == "g":
                        chosen.append(key[1])
                    else:
                        by_net.setdefault(key[1], []).append(key[2])
                for sub in node.attached:
                    net, vmap = self.networks[sub]
                    covered = set()
                    for j in by_net.get(sub, ()):
                        a, b = net.graph.edges[j]
                        covered.update((a, b))
                    mask = sum(1 << i2 for i2, t in enumerate(net.terminals) if t in covered)
                    todo.append((sub, mask))
        return sorted(chosen)


def _factor(prod: TransferMatrix, leaf: int) -> TransferMatrix:
    m = prod
    while m.left is not None:
        if _contains_leaf(m.left, leaf):
            m = m.left
        else:
            m = m.right
    return m


def _contains_leaf(m: TransferMatrix, leaf: int) -> bool:
    lo = m
    while lo.left is not None:
        lo = lo.left
    hi = m
    while hi.right is not None:
        hi = hi.right
    return lo.leaf <= leaf <= hi.leaf


def merge_shallow_clique(host: NodeGraph, net: MimickingNetwork, terminals: Sequence[int],
                         fresh: Sequence[int]) -> None:
    """Glue a replacement network into the face of a planar parent spanned by ``terminals``.

    The parent's embedded graph (torso plus earlier networks) stays planar;
    :class:`NotAFace` means the decomposition broke its facial-clique promise.
    """
    face = [host.host_id[t] for t in terminals]
    union, rot = glue_into_face(host.host, host.host_rot, face, net)
    next_local = host.host.n
    for v in fresh:
        host.host_id[v] = next_local
        next_local += 1
    host.host = union
    host.host_rot = rot


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------


@dataclass
class MatchingRun:
    matching: Matching | None
    weight: int | None
    logs: list[WitnessLog]
    trees: list[DecompositionTree]


def _run(g: Graph, weighted: bool, threads: int) -> MatchingRun:
    if g.n % 2:
        return MatchingRun(None, None, [], [])
    chosen: list[int] = []
    logs, trees = [], []
    fresh = g.n
    for comp in connected_components(g):
        if len(comp) % 2:
            return MatchingRun(None, None, logs, trees)
        tree = decompose(g, comp)
        trees.append(tree)
        eng = MatchingEngine(g, tree, weighted, threads, fresh)
        logs.append(eng.log)
        try:
            final = eng.run()
            chosen.extend(eng.reverse(final))
        except NoPerfectMatching:
            return MatchingRun(None, None, logs, trees)
        fresh = eng.fresh
    m = Matching.from_edges(g, chosen)
    return MatchingRun(m, m.weight(g) if weighted else None, logs, trees)


def find_perfect_matching(g: Graph, threads: int = 1) -> Matching | None:
    """A perfect matching of ``g``, or ``None`` when there is none."""
    return _run(g, False, threads).matching


def find_min_weight_pm(g: Graph, threads: int = 1) -> tuple[int, Matching] | None:
    """Minimum total weight and a perfect matching achieving it, or ``None``."""
    run = _run(g, True, threads)
    if run.matching is None:
        return None
    return run.weight, run.matching


def run_matching(g: Graph, weighted: bool = False, threads: int = 1) -> MatchingRun:
    """Like the finders, but also returns the decompositions and witness logs."""
    return _run(g, weighted, threads)
